//! Scalar special functions: the μ-deformed factorial `γ_μ(n)`, the μ-deformed
//! exponential `exp_μ` and its derivative, Euler's Γ, and the Macdonald
//! function `K_ν`.
//!
//! `exp_μ(z) = Σ z^n / γ_μ(n)` is summed directly. When the terms cancel (large
//! `|z|` away from the positive real axis) the sum is recomputed in
//! double-double arithmetic so that `|exp_μ(ix)| ≤ 1` stays visible at
//! `|x| ≈ 20` and beyond.

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};

/// Relative truncation threshold for the `exp_μ` series.
pub const EXP_MU_EPS: f64 = 1e-15;
/// Hard cap on the number of series terms.
pub const EXP_MU_MAX_TERMS: usize = 10_000;

// Plain sums whose absolute-term total exceeds the result by more than this
// factor are redone in double-double.
const CANCELLATION_LIMIT: f64 = 8.0;
// Beyond this modulus double-double cannot recover relative accuracy either;
// the plain sum (absolutely accurate to ε·exp_μ(|z|)) is returned.
const DD_MAX_MODULUS: f64 = 64.0;
const DD_EPS: f64 = 1e-32;
const RESCALE_ABOVE: f64 = 1e280;
const RESCALE_FACTOR: f64 = 1e-280;
const LN_RESCALE: f64 = 644.724_440_043_961_9; // ln(1e280)

/// Validated deformation parameter μ together with the time (Planck)
/// parameter `t = ħ`; the dilation parameter is `λ = 1/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MuParam {
    mu: f64,
    t: f64,
}

impl MuParam {
    pub fn new(mu: f64, t: f64) -> Result<Self> {
        check_mu(mu)?;
        check_time(t)?;
        Ok(MuParam { mu, t })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn lambda(&self) -> f64 {
        1.0 / self.t
    }

    /// Same μ, different time.
    pub fn with_time(&self, t: f64) -> Result<Self> {
        MuParam::new(self.mu, t)
    }
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > -0.5 {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu))
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

#[inline]
fn step(n: u32, mu: f64) -> f64 {
    if n % 2 == 1 {
        n as f64 + 2.0 * mu
    } else {
        n as f64
    }
}

/// `γ_μ(n)` by the recursion `γ_μ(0) = 1`, `γ_μ(n) = (n + 2μ χ_odd(n)) γ_μ(n-1)`.
///
/// Overflows to `+∞` past `n ≈ 170`; use [`ln_gamma_mu`] there.
pub fn gamma_mu(n: u32, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok((1..=n).fold(1.0, |acc, k| acc * step(k, mu)))
}

pub fn ln_gamma_mu(n: u32, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok((1..=n).map(|k| step(k, mu).ln()).sum())
}

/// Series value at `±w` with a common scale: `f(w) = plus · e^{log_scale}`,
/// `f(-w) = minus · e^{log_scale}`. Both come from one pass over the even and
/// odd powers, combined before rounding on the extended-precision path.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledSplit {
    pub(crate) plus: Complex64,
    pub(crate) minus: Complex64,
    pub(crate) log_scale: f64,
}

impl ScaledSplit {
    pub(crate) fn value(&self) -> Complex64 {
        self.plus * self.log_scale.exp()
    }
}

/// Which series to sum: `exp_μ` itself or its termwise derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Series {
    Value,
    Derivative,
}

impl Series {
    // Index offset s in  Σ_m w(m) z^m / γ_μ(m + s).
    fn shift(self) -> u32 {
        match self {
            Series::Value => 0,
            Series::Derivative => 1,
        }
    }

    fn weight(self, m: u32) -> f64 {
        match self {
            Series::Value => 1.0,
            Series::Derivative => (m + 1) as f64,
        }
    }
}

struct PlainSum {
    split: ScaledSplit,
    sum_abs: f64,
}

fn sum_plain(z: Complex64, mu: f64, series: Series) -> Result<PlainSum> {
    let s = series.shift();
    let mut coeff = Complex64::new(1.0 / (1..=s).fold(1.0, |a, k| a * step(k, mu)), 0.0);
    let mut even = coeff * series.weight(0);
    let mut odd = Complex64::new(0.0, 0.0);
    let mut sum_abs = even.norm();
    let mut log_scale = 0.0;
    let modulus = z.norm();
    let mut quiet = 0;
    for m in 1..EXP_MU_MAX_TERMS as u32 {
        coeff = coeff * z / step(m + s, mu);
        let term = coeff * series.weight(m);
        if m % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
        let size = term.norm();
        sum_abs += size;
        if !sum_abs.is_finite() {
            return Err(Error::SeriesOverflow(modulus));
        }
        if coeff.norm() > RESCALE_ABOVE {
            coeff *= RESCALE_FACTOR;
            even *= RESCALE_FACTOR;
            odd *= RESCALE_FACTOR;
            sum_abs *= RESCALE_FACTOR;
            log_scale += LN_RESCALE;
        }
        if (m as f64) > modulus + 1.0 {
            let reference = (even + odd).norm().max((even - odd).norm());
            if size <= EXP_MU_EPS * reference.max(f64::MIN_POSITIVE) || size == 0.0 {
                quiet += 1;
                if quiet == 3 {
                    return Ok(PlainSum {
                        split: ScaledSplit {
                            plus: even + odd,
                            minus: even - odd,
                            log_scale,
                        },
                        sum_abs,
                    });
                }
            } else {
                quiet = 0;
            }
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: EXP_MU_MAX_TERMS,
        modulus,
    })
}

fn sum_double_double(z: Complex64, mu: f64, series: Series) -> Result<ScaledSplit> {
    let s = series.shift();
    let mut start = Dd::new(1.0);
    for k in 1..=s {
        start = start * Dd::sum(k as f64, if k % 2 == 1 { 2.0 * mu } else { 0.0 }).recip();
    }
    let mut coeff = DdComplex::from_real(start);
    let mut even = coeff.scale(series.weight(0));
    let mut odd = DdComplex::ZERO;
    let mut log_scale = 0.0;
    let modulus = z.norm();
    let mut quiet = 0;
    for m in 1..EXP_MU_MAX_TERMS as u32 {
        let n = m + s;
        let divisor = Dd::sum(n as f64, if n % 2 == 1 { 2.0 * mu } else { 0.0 });
        coeff = coeff.mul_c64(z.re, z.im).mul_dd(divisor.recip());
        let term = coeff.scale(series.weight(m));
        if m % 2 == 0 {
            even = even.add(term);
        } else {
            odd = odd.add(term);
        }
        let (tr, ti) = term.to_parts();
        let size = tr.hypot(ti);
        let (cr, ci) = coeff.to_parts();
        if cr.hypot(ci) > RESCALE_ABOVE {
            coeff = coeff.scale(RESCALE_FACTOR);
            even = even.scale(RESCALE_FACTOR);
            odd = odd.scale(RESCALE_FACTOR);
            log_scale += LN_RESCALE;
        }
        if (m as f64) > modulus + 1.0 {
            let (er, ei) = even.to_parts();
            let (or, oi) = odd.to_parts();
            let reference = (er + or).hypot(ei + oi).max((er - or).hypot(ei - oi));
            if size <= DD_EPS * reference.max(f64::MIN_POSITIVE) || size == 0.0 {
                quiet += 1;
                if quiet == 3 {
                    let (pr, pi) = even.add(odd).to_parts();
                    let (mr, mi) = even.add(odd.scale(-1.0)).to_parts();
                    return Ok(ScaledSplit {
                        plus: Complex64::new(pr, pi),
                        minus: Complex64::new(mr, mi),
                        log_scale,
                    });
                }
            } else {
                quiet = 0;
            }
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: EXP_MU_MAX_TERMS,
        modulus,
    })
}

/// Sums the requested series at `z`. With `reflect`, the result is also meant
/// to be read at `-z`, so cancellation is judged on both signs.
pub(crate) fn series_split(
    z: Complex64,
    mu: f64,
    series: Series,
    reflect: bool,
) -> Result<ScaledSplit> {
    let plain = sum_plain(z, mu, series)?;
    let sp = plain.split;
    let mut result = sp.plus.norm();
    if reflect {
        result = result.min(sp.minus.norm());
    }
    if plain.sum_abs > CANCELLATION_LIMIT * result && z.norm() <= DD_MAX_MODULUS {
        sum_double_double(z, mu, series)
    } else {
        Ok(sp)
    }
}

/// `exp_μ` split without the double-double fallback. The error is then about
/// `ε·Σ|z|^n/γ_μ(n)` absolutely, which suffices wherever the result is
/// multiplied by a Gaussian that undoes the growth of that sum.
pub(crate) fn series_split_plain(z: Complex64, mu: f64) -> Result<ScaledSplit> {
    Ok(sum_plain(z, mu, Series::Value)?.split)
}

/// The μ-deformed exponential `exp_μ(z) = Σ_n z^n / γ_μ(n)`.
pub fn exp_mu(z: Complex64, mu: f64) -> Result<Complex64> {
    check_mu(mu)?;
    Ok(series_split(z, mu, Series::Value, false)?.value())
}

/// Termwise derivative `Σ_n n z^{n-1} / γ_μ(n)`.
pub fn exp_mu_prime(z: Complex64, mu: f64) -> Result<Complex64> {
    check_mu(mu)?;
    Ok(series_split(z, mu, Series::Derivative, false)?.value())
}

/// Euler's Γ for positive real arguments.
pub fn gamma_euler(x: f64) -> Result<f64> {
    positive("x", x)?;
    Ok(libm::tgamma(x))
}

pub fn ln_gamma_euler(x: f64) -> Result<f64> {
    positive("x", x)?;
    Ok(libm::lgamma(x))
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Macdonald function `K_ν(x)` for real order `|ν| ≤ 50` and `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

/// `e^x K_ν(x)`, from the trapezoidal rule applied to
/// `∫_0^∞ e^{-x (cosh u - 1)} cosh(ν u) du`.
///
/// The integrand decays double-exponentially, so the plain trapezoidal sum
/// converges geometrically in the number of halvings of the step.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    positive("x", x)?;
    if !nu.is_finite() || nu.abs() > 50.0 {
        return Err(Error::OrderOutOfRange(nu));
    }
    let nu = nu.abs();
    let integrand = |u: f64| {
        let s = (0.5 * u).sinh();
        let damp = -2.0 * x * s * s;
        0.5 * ((nu * u + damp).exp() + (-nu * u + damp).exp())
    };
    let peak = (nu / x).asinh();
    // Sum of f(k h) for k = first, first + stride, ... out to the decayed tail.
    let tail_sum = |h: f64, first: u64, stride: u64, reference: f64| {
        let mut acc = 0.0;
        let mut k = first;
        loop {
            let u = k as f64 * h;
            let v = integrand(u);
            acc += v;
            if u > peak && v <= 1e-18 * (reference + acc) {
                break;
            }
            k += stride;
        }
        acc
    };
    let mut h = 0.5;
    let mut raw = 0.5 * integrand(0.0) + tail_sum(h, 1, 1, 0.0);
    let mut estimate = h * raw;
    for halving in 0..12 {
        h *= 0.5;
        raw += tail_sum(h, 1, 2, raw);
        let next = h * raw;
        let converged = (next - estimate).abs() <= 1e-15 * next;
        estimate = next;
        if converged && halving >= 1 {
            break;
        }
    }
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_mu_examples() {
        assert_eq!(gamma_mu(0, 0.7).unwrap(), 1.0);
        assert_eq!(gamma_mu(3, 0.0).unwrap(), 6.0);
        assert_eq!(gamma_mu(3, 1.0).unwrap(), 30.0);
        assert!(matches!(gamma_mu(2, -0.5), Err(Error::InvalidMu(_))));
    }

    #[test]
    fn gamma_mu_is_factorial_at_zero() {
        let mut fact = 1.0;
        for n in 0..=20u32 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!(rel(gamma_mu(n, 0.0).unwrap(), fact) <= 1e-14);
        }
    }

    #[test]
    fn gamma_mu_positive_on_grid() {
        for &mu in &[-0.49, -0.25, 0.0, 0.5, 1.0, 5.0] {
            for n in 0..=200 {
                assert!(gamma_mu(n, mu).unwrap() > 0.0);
                assert!(ln_gamma_mu(n, mu).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn exp_mu_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(exp_mu(Complex64::new(0.0, 0.0), 0.7).unwrap(), one);
        let e = exp_mu(one, 0.0).unwrap();
        assert!((e.re - core::f64::consts::E).abs() < 1e-15 && e.im == 0.0);
        assert!(exp_mu(one, -0.6).is_err());
    }

    #[test]
    fn exp_mu_prime_examples() {
        let d0 = exp_mu_prime(Complex64::new(0.0, 0.0), 0.0).unwrap();
        assert!((d0.re - 1.0).abs() < 1e-16);
        let d = exp_mu_prime(Complex64::new(0.5, 0.0), 0.0).unwrap();
        assert!(rel(d.re, 0.5f64.exp()) < 1e-15);
    }

    #[test]
    fn exp_mu_large_imaginary_is_bounded() {
        for &mu in &[0.0, 0.5, 2.0] {
            for k in -40..=40 {
                let x = 0.5 * k as f64;
                let v = exp_mu(Complex64::new(0.0, x), mu).unwrap();
                assert!(v.norm() <= 1.0 + 1e-12, "mu={mu} x={x} |v|={}", v.norm());
            }
        }
    }

    #[test]
    fn gamma_euler_values() {
        assert!(rel(gamma_euler(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert_eq!(gamma_euler(1.0).unwrap(), 1.0);
        assert!(rel(gamma_euler(4.0).unwrap(), 6.0) < 1e-15);
        assert!(gamma_euler(0.0).is_err());
        assert!(gamma_euler(-1.5).is_err());
    }

    #[test]
    fn bessel_k_half_order() {
        let expect = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!(rel(bessel_k(0.5, 1.0).unwrap(), expect) < 1e-12);
        assert!(rel(bessel_k(-0.5, 1.0).unwrap(), expect) < 1e-12);
        assert!(bessel_k(0.5, 0.0).is_err());
        assert!(bessel_k(51.0, 1.0).is_err());
    }
}
