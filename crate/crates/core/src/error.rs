use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("deformation parameter must satisfy mu > -1/2, got {0}")]
    InvalidMu(f64),
    #[error("time parameter must satisfy t > 0, got {0}")]
    InvalidTime(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("Bessel order |nu| must not exceed 50, got {0}")]
    OrderOutOfRange(f64),
    #[error("density is not defined at z = 0")]
    DensityAtOrigin,
    #[error("series for exp_mu did not converge within {terms} terms (|z| = {modulus})")]
    SeriesNonConvergence { terms: usize, modulus: f64 },
    #[error("series for exp_mu overflowed (|z| = {0})")]
    SeriesOverflow(f64),
    #[error("quadrature did not converge by level {level}: last estimates {previous} and {last}")]
    QuadratureNonConvergence {
        level: u32,
        previous: Complex64,
        last: Complex64,
    },
    #[error("translation series error bound {residual} exceeds {tolerance}")]
    TranslationTruncation { residual: f64, tolerance: f64 },
    #[error("declared growth rate {rate} is not below the integrability limit {limit}")]
    GrowthOutOfClass { rate: f64, limit: f64 },
    #[error("Gaussian rate {0} leaves the polynomial-Gaussian class (rate must be >= 0)")]
    RateOutOfClass(f64),
}

/// Holds the first error raised inside an infallible integrand closure so the
/// caller can surface it once quadrature returns.
#[derive(Default)]
pub(crate) struct Trap(core::cell::Cell<Option<Error>>);

impl Trap {
    pub(crate) fn catch(&self, r: Result<Complex64>) -> Complex64 {
        r.unwrap_or_else(|e| {
            let first = self.0.take().unwrap_or(e);
            self.0.set(Some(first));
            Complex64::new(0.0, 0.0)
        })
    }

    pub(crate) fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}
