//! The μ-deformed heat kernel
//!
//! `ρ_{μ,t}(z,q) = (2t)^{-(μ+1/2)} Γ(μ+1/2)^{-1} e^{-(z²+q²)/2t} exp_μ(zq/t)`,
//! its one-variable restriction `σ_{μ,t}(q) = ρ_{μ,t}(0,q)`, the heat
//! semigroup `e^{tD_μ²/2}` and μ-convolution.

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result, Trap};
use crate::polygauss::PolyGauss;
use crate::quadrature::{integrate_line_weighted, Estimate, QuadratureRule};
use crate::special::{check_mu, exp_mu_prime, series_split, series_split_plain, MuParam, Series};

pub type HeatKernelParams = MuParam;

/// Below this log-magnitude the kernel is returned as exactly zero.
const LN_NEGLIGIBLE: f64 = -760.0;
/// Relative bound on the neglected tail of a truncated translation series.
pub const TRANSLATION_TOLERANCE: f64 = 1e-8;

// Multiplies machine epsilon times the absolute series mass.
const ROUNDING_SLACK: f64 = 16.0;
// Below this |x| the reflection quotient (f(x) - f(-x))/x is replaced by 2f'(0).
const REFLECTION_CUTOFF: f64 = 1e-6;

/// `ln((2t)^{-(μ+1/2)} / Γ(μ+1/2))`.
pub fn ln_normalization(p: &HeatKernelParams) -> f64 {
    let a = p.mu() + 0.5;
    -a * (2.0 * p.t()).ln() - libm::lgamma(a)
}

/// `(ρ(z,q), ρ(z,-q))`; the second value equals `ρ(-z,q)`.
pub(crate) fn rho_pair(p: &HeatKernelParams, z: Complex64, q: f64) -> Result<(Complex64, Complex64)> {
    let t = p.t();
    let exponent = -(z * z + q * q) / (2.0 * t) + ln_normalization(p);
    let w = z * (q / t);
    let zero = Complex64::new(0.0, 0.0);
    if exponent.re + w.norm() < LN_NEGLIGIBLE {
        return Ok((zero, zero));
    }
    let split = series_split(w, p.mu(), Series::Value, true)?;
    let factor = (exponent + split.log_scale).exp();
    Ok((factor * split.plus, factor * split.minus))
}

/// As [`rho_pair`] but without the factor `N e^{-(z²+q²)/2t}` and without the
/// extended-precision fallback; the returned log-scale must be added back.
pub(crate) fn exp_mu_pair_plain(p: &HeatKernelParams, z: Complex64, q: f64) -> Result<(Complex64, Complex64, f64)> {
    let split = series_split_plain(z * (q / p.t()), p.mu())?;
    Ok((split.plus, split.minus, split.log_scale))
}

/// `ρ_{μ,t}(z,q)`, analytically continued in the first argument.
///
/// Fails only if `exp_μ` cannot be summed, which needs `|zq|/t` in the
/// thousands.
pub fn rho(p: &HeatKernelParams, z: Complex64, q: f64) -> Result<Complex64> {
    Ok(rho_pair(p, z, q)?.0)
}

pub fn rho_real(p: &HeatKernelParams, x: f64, q: f64) -> Result<f64> {
    Ok(rho(p, Complex64::new(x, 0.0), q)?.re)
}

/// `σ_{μ,t}(q) = ρ_{μ,t}(0,q)`.
pub fn sigma(p: &HeatKernelParams, q: f64) -> f64 {
    (ln_normalization(p) - q * q / (2.0 * p.t())).exp()
}

/// `σ_{μ,t}` as the exact polynomial-Gaussian `N e^{-q²/2t}`.
pub fn sigma_polygauss(p: &HeatKernelParams) -> PolyGauss {
    PolyGauss::from_real(&[ln_normalization(p).exp()], 1.0 / (2.0 * p.t()))
        .expect("rate 1/2t is positive")
}

/// `ψ(x,t) = (e^{tD_μ²/2} φ₀)(x) = ∫ |q|^{2μ} ρ_{μ,t}(x,q) φ₀(q) dq`.
pub fn heat_solve(phi0: &PolyGauss, p: &HeatKernelParams, x: f64, max_level: u32) -> Result<Estimate> {
    heat_solve_complex(phi0, p, Complex64::new(x, 0.0), max_level)
}

/// [`heat_solve`] with the kernel continued to complex `z`.
pub fn heat_solve_complex(phi0: &PolyGauss, p: &HeatKernelParams, z: Complex64, max_level: u32) -> Result<Estimate> {
    let trap = Trap::default();
    let est = integrate_line_weighted(
        |q| trap.catch(rho(p, z, q)) * phi0.eval(q),
        p.mu(),
        max_level,
    );
    trap.finish(est)
}

/// `∫ |q|^{2μ} ρ_{μ,t}(x,q) dq`, which equals 1.
pub fn heat_mass(p: &HeatKernelParams, x: f64, max_level: u32) -> Result<Estimate> {
    let one = PolyGauss::from_real(&[1.0], 0.0)?;
    heat_solve(&one, p, x, max_level)
}

/// Left factor of a μ-convolution.
#[derive(Debug, Clone, Copy)]
pub enum ConvolutionKernel<'a> {
    /// `σ_{μ,t}`, whose translates are known in closed form:
    /// `(T_q σ)(x) = ρ_{μ,t}(x,q)`.
    Sigma { t: f64 },
    /// A general polynomial-Gaussian, translated by its series truncated to
    /// `terms` terms.
    Poly { f: &'a PolyGauss, terms: usize },
}

/// `(ψ₁ *_μ ψ₂)(x) = ∫ |q|^{2μ} (T_q ψ₁)(x) ψ₂(q) dq`.
pub fn mu_convolve(
    psi1: ConvolutionKernel<'_>,
    psi2: &PolyGauss,
    mu: f64,
    x: f64,
    max_level: u32,
) -> Result<Estimate> {
    check_mu(mu)?;
    match psi1 {
        ConvolutionKernel::Sigma { t } => {
            // The translate is read off as a function of its own argument,
            // (T_q σ)(x) = ρ(q, x), rather than as the heat kernel at x.
            let p = MuParam::new(mu, t)?;
            let trap = Trap::default();
            let est = integrate_line_weighted(
                |q| trap.catch(rho(&p, Complex64::new(q, 0.0), x)) * psi2.eval(q),
                mu,
                max_level,
            );
            trap.finish(est)
        }
        ConvolutionKernel::Poly { f, terms } => {
            if terms == 0 {
                return Ok(Estimate {
                    value: Complex64::new(0.0, 0.0),
                    residual: 0.0,
                    level: 0,
                });
            }
            // (T_q f)(x) = Σ_n (-q)^n (D_μ^n f)(x) / γ_μ(n) is a polynomial in q.
            let mut a = alloc::vec::Vec::with_capacity(terms);
            // The 1/γ_μ(n) factor is folded into each step; kept separate it
            // underflows beyond n ≈ 170.
            let mut term = f.clone();
            a.push(term.eval(x));
            for n in 1..terms {
                let step = if n % 2 == 1 { n as f64 + 2.0 * mu } else { n as f64 };
                term = term.dunkl(mu)? * (-1.0 / step);
                a.push(term.eval(x));
            }
            let horner = |q: f64| a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * q + c);
            let est = integrate_line_weighted(|q| horner(q) * psi2.eval(q), mu, max_level)?;
            // Odd or even coefficients can vanish identically (e.g. x = 0), so
            // the tail is judged on the last two kept terms. The absolute
            // mass of the whole series bounds the rounding error of the
            // alternating sum, which dominates once |q| reaches the scale
            // where the terms grow like e^{rate·q²}.
            let first_tail = terms.saturating_sub(2);
            let tail = integrate_line_weighted(
                |q| {
                    let size: f64 = (first_tail..terms)
                        .map(|n| (a[n] * q.powi(n as i32)).norm())
                        .sum();
                    Complex64::new(size * psi2.eval(q).norm(), 0.0)
                },
                mu,
                max_level,
            )?
            .value
            .re;
            // Only the order of magnitude matters here, so one fixed rule at
            // the converged level suffices.
            let q_max = if psi2.rate() > 0.0 { (70.0 / psi2.rate()).sqrt() } else { 1e3 };
            let mass = QuadratureRule::line_weighted(mu, est.level, q_max)?
                .integrate(|q| {
                    let size: f64 = a.iter().enumerate().map(|(n, c)| (*c * q.powi(n as i32)).norm()).sum();
                    Complex64::new(size * psi2.eval(q).norm(), 0.0)
                })
                .re;
            let rounding = if mass.is_finite() { ROUNDING_SLACK * f64::EPSILON * mass } else { f64::INFINITY };
            let tail = tail + rounding;
            let bound = TRANSLATION_TOLERANCE * est.value.norm().max(1.0);
            if tail > bound {
                return Err(Error::TranslationTruncation {
                    residual: tail,
                    tolerance: bound,
                });
            }
            Ok(Estimate {
                residual: est.residual.max(tail),
                ..est
            })
        }
    }
}

// ∂_x ρ(x,q) from the termwise derivative of exp_μ.
fn rho_dx(p: &HeatKernelParams, x: f64, q: f64) -> Result<f64> {
    let t = p.t();
    let w = Complex64::new(x * q / t, 0.0);
    let e = series_split(w, p.mu(), Series::Value, false)?.value().re;
    let de = exp_mu_prime(w, p.mu())?.re;
    let gauss = (ln_normalization(p) - (x * x + q * q) / (2.0 * t)).exp();
    Ok(gauss * (-x / t * e + q / t * de))
}

/// `(D_μ ρ(·,q))(x)` computed from the derivative of the kernel and the
/// reflection term.
pub fn rho_dunkl(p: &HeatKernelParams, x: f64, q: f64) -> Result<f64> {
    let dx = rho_dx(p, x, q)?;
    if x.abs() < REFLECTION_CUTOFF {
        let d0 = rho_dx(p, 0.0, q)?;
        return Ok(dx + 2.0 * p.mu() * d0);
    }
    let (plus, minus) = rho_pair(p, Complex64::new(x, 0.0), q)?;
    Ok(dx + p.mu() / x * (plus.re - minus.re))
}

/// `|∂_t ρ − ½ D_μ² ρ|` at `(x, q0)`. The time derivative is a central
/// difference with step `h`; both Dunkl derivatives are analytic, so the
/// residual is `O(h²)`.
pub fn pde_residual(p: &HeatKernelParams, x: f64, q0: f64, h: f64) -> Result<f64> {
    let t = p.t();
    if !(h > 0.0 && h < t) {
        return Err(Error::NonPositive {
            name: "t - h",
            value: t - h,
        });
    }
    let later = rho_real(&p.with_time(t + h)?, x, q0)?;
    let earlier = rho_real(&p.with_time(t - h)?, x, q0)?;
    let dt = (later - earlier) / (2.0 * h);

    // Outer Dunkl derivative of g = D_μρ, using g'(x) from the closed form
    // g(x) = (q0 - x) ρ(x,q0) / t.
    let g_prime = |y: f64| -> Result<f64> {
        let r = rho_real(p, y, q0)?;
        Ok((-r + (q0 - y) * rho_dx(p, y, q0)?) / t)
    };
    let dd = if x.abs() < REFLECTION_CUTOFF {
        g_prime(x)? + 2.0 * p.mu() * g_prime(0.0)?
    } else {
        g_prime(x)? + p.mu() / x * (rho_dunkl(p, x, q0)? - rho_dunkl(p, -x, q0)?)
    };
    Ok((dt - 0.5 * dd).abs())
}

/// `|∫ |q|^{2μ} ρ_{μ,s}(x,q) ρ_{μ,t}(q,y) dq − ρ_{μ,s+t}(x,y)|`.
pub fn semigroup_defect(mu: f64, s: f64, t: f64, x: f64, y: f64, max_level: u32) -> Result<f64> {
    let ps = MuParam::new(mu, s)?;
    let pt = MuParam::new(mu, t)?;
    let total = rho_real(&MuParam::new(mu, s + t)?, x, y)?;
    let trap = Trap::default();
    let est = integrate_line_weighted(
        |q| {
            let a = trap.catch(rho(&ps, Complex64::new(x, 0.0), q));
            let b = trap.catch(rho(&pt, Complex64::new(q, 0.0), y));
            a * b
        },
        mu,
        max_level,
    );
    let est = trap.finish(est)?;
    Ok((est.value - total).norm())
}
