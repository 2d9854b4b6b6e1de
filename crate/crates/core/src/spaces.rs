//! Measures and Hilbert-space structure: the planar Macdonald densities
//! `ν_{e,μ,λ}`, `ν_{o,μ,λ}`, the Gaussian density, the ground-state measure
//! `dρ_{μ,t}`, the `B²_{μ,t}` and `C²_{μ,t}` inner products, the change of
//! measure `U_{μ,t}` and the dilation `T_λ`.
//!
//! Throughout, `λ = 1/t`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_2, PI};
use core::fmt;

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::heat::{sigma, sigma_polygauss};
use crate::polygauss::PolyGauss;
use crate::quadrature::{integrate_line_weighted, Estimate};
use crate::special::{bessel_k_scaled, check_mu, check_time, MuParam};

/// Relative agreement (against `‖f‖‖g‖`) required between successive planar
/// refinement levels.
pub const PLANE_TOLERANCE: f64 = 1e-10;
/// First planar level: radial step `2^-level`, `2^{level+2}` angles.
pub const PLANE_START_LEVEL: u32 = 3;
pub const PLANE_DEFAULT_MAX_LEVEL: u32 = 7;
// ∫|f|² dν beyond the radial cutoff is below e^{-CUTOFF_EXPONENT} relative.
const CUTOFF_EXPONENT: f64 = 120.0;
// Quadratic growth assumed for samples that declare none: that of transform
// outputs, |f(z)|² ν(z) ~ e^{-2|z|²/3t}.
const DEFAULT_GROWTH_FRACTION: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Parity {
    Even,
    Odd,
}

/// `ν_{e,μ,λ}` or `ν_{o,μ,λ}`; defined for `z ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlanarDensity {
    parity: Parity,
    mu: f64,
    lambda: f64,
}

impl PlanarDensity {
    pub fn new(parity: Parity, mu: f64, lambda: f64) -> Result<Self> {
        check_mu(mu)?;
        positive("lambda", lambda)?;
        Ok(PlanarDensity { parity, mu, lambda })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eval(&self, z: Complex64) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::DensityAtOrigin);
        }
        self.at_radius(r)
    }

    /// Value at `|z| = r > 0`. The argument `x = λr²` of the Macdonald
    /// function is handled in logarithms so that radii near the underflow
    /// threshold stay usable.
    pub fn at_radius(&self, r: f64) -> Result<f64> {
        positive("r", r)?;
        let mu = self.mu;
        let ln_x = self.lambda.ln() + 2.0 * r.ln();
        let x = ln_x.exp();
        let order = match self.parity {
            Parity::Even => mu - 0.5,
            Parity::Odd => mu + 0.5,
        };
        let k = bessel_k_scaled(order, x)?;
        let ln_nu = self.lambda.ln() + (0.5 - mu) * LN_2 - PI.ln() - libm::lgamma(mu + 0.5) + k.ln() - x
            + (mu + 0.5) * ln_x;
        Ok(ln_nu.exp())
    }
}

pub fn density_even(mu: f64, lambda: f64, z: Complex64) -> Result<f64> {
    PlanarDensity::new(Parity::Even, mu, lambda)?.eval(z)
}

pub fn density_odd(mu: f64, lambda: f64, z: Complex64) -> Result<f64> {
    PlanarDensity::new(Parity::Odd, mu, lambda)?.eval(z)
}

/// `ν_{Gauss,ħ}(z) = e^{-|z|²/ħ} / (πħ)`.
pub fn gauss_density(hbar: f64, z: Complex64) -> Result<f64> {
    positive("hbar", hbar)?;
    Ok((-z.norm_sqr() / hbar).exp() / (PI * hbar))
}

pub type HoloFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A holomorphic function known only through evaluation.
///
/// `growth`, when declared, is a rate `a` with
/// `|f(z)| ≤ C (1 + |z|)^k e^{a|z|²}`; it is used to reject samples that are
/// not square integrable and to place the radial cutoff.
#[derive(Clone)]
pub struct HoloSample {
    f: HoloFn,
    growth: Option<f64>,
    parity: Option<Parity>,
}

impl fmt::Debug for HoloSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloSample")
            .field("growth", &self.growth)
            .field("parity", &self.parity)
            .finish_non_exhaustive()
    }
}

impl HoloSample {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        HoloSample {
            f: Arc::new(f),
            growth: None,
            parity: None,
        }
    }

    /// `z^n`, of growth rate 0 and parity `(-1)^n`.
    pub fn monomial(n: u32) -> Self {
        let parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
        HoloSample::new(move |z: Complex64| z.powu(n))
            .with_growth(0.0)
            .with_parity(parity)
    }

    pub fn with_growth(mut self, rate: f64) -> Self {
        self.growth = Some(rate);
        self
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = Some(parity);
        self
    }

    pub fn growth(&self) -> Option<f64> {
        self.growth
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    /// `(f_e(z), f_o(z))`, skipping the reflected evaluation when the parity
    /// is declared.
    pub fn split(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.parity {
            Some(Parity::Even) => (self.eval(z), zero),
            Some(Parity::Odd) => (zero, self.eval(z)),
            None => {
                let (a, b) = (self.eval(z), self.eval(-z));
                ((a + b) * 0.5, (a - b) * 0.5)
            }
        }
    }
}

/// Fixed planar rule for `B²_{μ,t}` inner products.
///
/// Angles come in antipodal pairs, so only the half-set `θ_j = 2πj/N`,
/// `j < N/2`, is stored: the even and odd parts at `-z` are `±` those at
/// `z`, which makes both halves contribute equally. Callers supply samples
/// of `f` at [`PlaneRule::nodes`] and at their negatives.
#[derive(Debug, Clone)]
pub struct PlaneRule {
    level: u32,
    radii: Vec<f64>,
    weight_even: Vec<f64>,
    weight_odd: Vec<f64>,
    phases: Vec<Complex64>,
}

impl PlaneRule {
    pub fn new(mu: f64, t: f64, level: u32, r_max: f64) -> Result<Self> {
        check_mu(mu)?;
        check_time(t)?;
        positive("r_max", r_max)?;
        let lambda = 1.0 / t;
        let even = PlanarDensity::new(Parity::Even, mu, lambda)?;
        let odd = PlanarDensity::new(Parity::Odd, mu, lambda)?;
        // Near the origin ν r dr ~ r^{p-1} dr; stop where the mass left out
        // is ~1e-18.
        let p = (4.0 * mu + 2.0).min(2.0);
        let r_min = t.sqrt() * 1e-18f64.powf(1.0 / p);
        let u_lo = (r_min.ln() / FRAC_PI_2).asinh();
        let u_hi = (r_max.ln() / FRAC_PI_2).asinh();
        let h = 0.5f64.powi(level as i32);
        let n_angles = 1usize << (level + 2);
        let angular = 2.0 * PI / n_angles as f64;
        let mut radii = Vec::new();
        let mut weight_even = Vec::new();
        let mut weight_odd = Vec::new();
        for k in (u_lo / h).ceil() as i64..=(u_hi / h).floor() as i64 {
            let u = k as f64 * h;
            let ln_r = FRAC_PI_2 * u.sinh();
            let r = ln_r.exp();
            // r dr = r² (π/2) cosh u du; the factor 2 accounts for -z.
            let base = 2.0 * angular * h * (2.0 * ln_r + (FRAC_PI_2 * u.cosh()).ln()).exp();
            radii.push(r);
            weight_even.push(base * even.at_radius(r)?);
            weight_odd.push(base * odd.at_radius(r)?);
        }
        let phases = (0..n_angles / 2)
            .map(|j| Complex64::from_polar(1.0, j as f64 * angular))
            .collect();
        Ok(PlaneRule {
            level,
            radii,
            weight_even,
            weight_odd,
            phases,
        })
    }

    /// Rule with the radial cutoff matched to the growth rate `a`.
    pub fn for_growth(mu: f64, t: f64, level: u32, growth: Option<f64>) -> Result<Self> {
        let a = growth.unwrap_or(DEFAULT_GROWTH_FRACTION / t);
        let limit = 0.5 / t;
        if !(a < limit) {
            return Err(Error::GrowthOutOfClass { rate: a, limit });
        }
        let r_max = (CUTOFF_EXPONENT / (1.0 / t - 2.0 * a)).sqrt();
        PlaneRule::new(mu, t, level, r_max)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The same rule restricted to rings with `r ≤ r_max`. Rules differing
    /// only in their cutoff share the inner rings, so samples taken for the
    /// larger rule serve the smaller one as a prefix.
    pub fn truncated(&self, r_max: f64) -> PlaneRule {
        let keep = self.radii.partition_point(|&r| r <= r_max);
        PlaneRule {
            level: self.level,
            radii: self.radii[..keep].to_vec(),
            weight_even: self.weight_even[..keep].to_vec(),
            weight_odd: self.weight_odd[..keep].to_vec(),
            phases: self.phases.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Half-set nodes, radius-major.
    pub fn nodes(&self) -> Vec<Complex64> {
        self.radii
            .iter()
            .flat_map(|&r| self.phases.iter().map(move |&p| p * r))
            .collect()
    }

    /// `Σ w_e f_e conj(g_e) + w_o f_o conj(g_o)` from samples at the nodes
    /// (`*_plus`) and at their negatives (`*_minus`).
    pub fn inner(
        &self,
        f_plus: &[Complex64],
        f_minus: &[Complex64],
        g_plus: &[Complex64],
        g_minus: &[Complex64],
    ) -> Complex64 {
        let m = self.phases.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&we, &wo)) in self.weight_even.iter().zip(&self.weight_odd).enumerate() {
            let mut ring_e = Complex64::new(0.0, 0.0);
            let mut ring_o = Complex64::new(0.0, 0.0);
            for k in i * m..(i + 1) * m {
                let (fe, fo) = ((f_plus[k] + f_minus[k]) * 0.5, (f_plus[k] - f_minus[k]) * 0.5);
                let (ge, go) = ((g_plus[k] + g_minus[k]) * 0.5, (g_plus[k] - g_minus[k]) * 0.5);
                ring_e += fe * ge.conj();
                ring_o += fo * go.conj();
            }
            acc += ring_e * we + ring_o * wo;
        }
        acc
    }
}

fn samples(rule: &PlaneRule, f: &HoloSample) -> (Vec<Complex64>, Vec<Complex64>) {
    let nodes = rule.nodes();
    let mut plus = Vec::with_capacity(nodes.len());
    let mut minus = Vec::with_capacity(nodes.len());
    for z in nodes {
        let (e, o) = f.split(z);
        plus.push(e + o);
        minus.push(e - o);
    }
    (plus, minus)
}

/// `⟨f, g⟩_{B²_{μ,t}} = ⟨f_e, g_e⟩_{L²(ν_e)} + ⟨f_o, g_o⟩_{L²(ν_o)}`.
///
/// Levels are refined until successive values agree to
/// [`PLANE_TOLERANCE`]`·‖f‖‖g‖`.
pub fn inner_b2(f: &HoloSample, g: &HoloSample, mu: f64, t: f64, max_level: u32) -> Result<Estimate> {
    let growth = match (f.growth, g.growth) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    let mut previous: Option<Complex64> = None;
    let start = PLANE_START_LEVEL.min(max_level.saturating_sub(1));
    for level in start..=max_level.max(start + 1) {
        let rule = PlaneRule::for_growth(mu, t, level, growth)?;
        let (fp, fm) = samples(&rule, f);
        let (gp, gm) = samples(&rule, g);
        let value = rule.inner(&fp, &fm, &gp, &gm);
        let scale = (rule.inner(&fp, &fm, &fp, &fm).re * rule.inner(&gp, &gm, &gp, &gm).re).sqrt();
        if let Some(prev) = previous {
            let residual = (value - prev).norm();
            if residual <= PLANE_TOLERANCE * scale {
                return Ok(Estimate {
                    value,
                    residual,
                    level,
                });
            }
            if level >= max_level {
                return Err(Error::QuadratureNonConvergence {
                    level,
                    previous: prev,
                    last: value,
                });
            }
        }
        previous = Some(value);
    }
    unreachable!("refinement loop always returns")
}

pub fn norm_b2(f: &HoloSample, mu: f64, t: f64, max_level: u32) -> Result<f64> {
    Ok(inner_b2(f, f, mu, t, max_level)?.value.re.max(0.0).sqrt())
}

/// Density of `dρ_{μ,t}(q) = σ_{μ,t}(q)|q|^{2μ} dq`.
pub fn measure_rho_density(mu: f64, t: f64, q: f64) -> Result<f64> {
    let p = MuParam::new(mu, t)?;
    Ok(sigma(&p, q) * q.abs().powf(2.0 * mu))
}

/// `∫ dρ_{μ,t}`, which equals 1.
pub fn rho_measure_mass(mu: f64, t: f64, max_level: u32) -> Result<Estimate> {
    let p = MuParam::new(mu, t)?;
    integrate_line_weighted(|q| Complex64::new(sigma(&p, q), 0.0), mu, max_level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    /// `U_{μ,t}`: `L²_μ → L²(dρ_{μ,t})`, division by `√σ_{μ,t}`.
    ToGroundState,
    /// `U_{μ,t}^{-1}`: multiplication by `√σ_{μ,t}`.
    FromGroundState,
}

/// `U_{μ,t}` or its inverse, exactly: `√σ_{μ,t} = √N e^{-q²/4t}`, so the
/// Gaussian rate moves by `∓1/4t` and the coefficients scale by `N^{∓1/2}`.
///
/// Dividing by `√σ` fails with [`Error::RateOutOfClass`] when `ψ` decays
/// more slowly than `e^{-q²/4t}`.
pub fn change_of_measure(psi: &PolyGauss, mu: f64, t: f64, direction: Direction) -> Result<PolyGauss> {
    let p = MuParam::new(mu, t)?;
    let sqrt_n = sigma_polygauss(&p).coeffs()[0].re.sqrt();
    let quarter = 1.0 / (4.0 * t);
    match direction {
        Direction::ToGroundState => Ok(psi.shift_rate(-quarter)? * (1.0 / sqrt_n)),
        Direction::FromGroundState => Ok(psi.shift_rate(quarter)? * sqrt_n),
    }
}

/// `T_λ f(z) = f(λ^{1/2} z)`, unitary from `B²_{μ,1}` onto `B²_{μ,1/λ}`.
pub fn dilate(f: &HoloSample, lambda: f64) -> Result<HoloSample> {
    positive("lambda", lambda)?;
    let inner = f.clone();
    let s = lambda.sqrt();
    Ok(HoloSample {
        f: Arc::new(move |z: Complex64| inner.eval(z * s)),
        growth: f.growth.map(|a| a * lambda),
        parity: f.parity,
    })
}

/// `ln` of `1/M(0) = 2^{μ+1/2} t^{μ/2+1/4} Γ(μ+1/2)^{1/2}`.
fn ln_twist_denominator(mu: f64, t: f64) -> f64 {
    (mu + 0.5) * LN_2 + (0.5 * mu + 0.25) * t.ln() + 0.5 * libm::lgamma(mu + 0.5)
}

/// `M(z) = e^{-z²/4t} / (2^{μ+1/2} t^{μ/2+1/4} Γ(μ+1/2)^{1/2})`.
pub fn twist(mu: f64, t: f64, z: Complex64) -> Result<Complex64> {
    check_mu(mu)?;
    check_time(t)?;
    Ok((-z * z / (4.0 * t) - ln_twist_denominator(mu, t)).exp())
}

/// `Gf(z) = f(2z) / M(2z)`, the map carrying `C²_{μ,t}` onto `B²_{μ,t/2}`.
pub fn g_map(f: &HoloSample, mu: f64, t: f64) -> Result<HoloSample> {
    check_mu(mu)?;
    check_time(t)?;
    let inner = f.clone();
    let ln_den = ln_twist_denominator(mu, t);
    Ok(HoloSample {
        f: Arc::new(move |z: Complex64| {
            let w = z * 2.0;
            inner.eval(w) * (w * w / (4.0 * t) + ln_den).exp()
        }),
        growth: None,
        parity: f.parity,
    })
}

/// `⟨f₁, f₂⟩_{C²_{μ,t}} = ⟨Gf₁, Gf₂⟩_{B²_{μ,t/2}}`.
pub fn inner_c2(f1: &HoloSample, f2: &HoloSample, mu: f64, t: f64, max_level: u32) -> Result<Estimate> {
    inner_b2(&g_map(f1, mu, t)?, &g_map(f2, mu, t)?, mu, 0.5 * t, max_level)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
