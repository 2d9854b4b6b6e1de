//! Double-exponential quadrature for the weighted line integral
//! `∫_R |q|^{2μ} g(q) dq` and for radial planar integrals
//! `∫_0^∞ r dr ∫_0^{2π} dθ g(r e^{iθ}) w(r)`.
//!
//! Both half-lines are mapped with `q = exp((π/2) sinh u)`. The trapezoidal
//! rule in `u` then handles the `|q|^{2μ}` endpoint singularity (any
//! `μ > -1/2`) and Gaussian tails alike. The weight `q^{2μ+1}` is formed from
//! `ln q`, so nodes far below the smallest positive double remain usable.
//! Accuracy is certified by halving the step until two successive estimates
//! agree.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::check_mu;

/// Relative agreement required between successive refinement levels.
pub const TOLERANCE: f64 = 1e-12;
/// First level examined by the refining integrators (step `2^-level`).
pub const START_LEVEL: u32 = 3;
/// Default refinement ceiling.
pub const DEFAULT_MAX_LEVEL: u32 = 9;

// Marching stops once this many consecutive nodes contribute less than
// TAIL_EPS of the absolute mass accumulated so far.
const TAIL_RUN: u32 = 4;
const TAIL_EPS: f64 = 1e-19;
const LN_TINY: f64 = -690.0;
const LN_HUGE: f64 = 690.0;

/// Quadrature result together with its certified residual: the difference
/// between the last two refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate<T = Complex64> {
    pub value: T,
    pub residual: f64,
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RuleKind {
    /// Positive half-line nodes for `∫_R |q|^{2μ} g(q) dq`; each node stands
    /// for the pair `±q`.
    LineWeighted,
    /// Radial nodes for `∫_0^∞ h(r) r dr`.
    Radial,
    /// Equispaced angles for `∫_0^{2π} dθ`.
    Angular,
}

/// Fixed node/weight set.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    mu: f64,
    level: u32,
}

#[inline]
fn log_node(u: f64) -> f64 {
    FRAC_PI_2 * u.sinh()
}

#[inline]
fn log_jacobian(u: f64) -> f64 {
    (FRAC_PI_2 * u.cosh()).ln()
}

// Grid indices k with k·h in [u_lo, u_hi].
fn grid(level: u32, u_lo: f64, u_hi: f64) -> impl Iterator<Item = f64> {
    let h = 0.5f64.powi(level as i32);
    let k_lo = (u_lo / h).ceil() as i64;
    let k_hi = (u_hi / h).floor() as i64;
    (k_lo..=k_hi).map(move |k| k as f64 * h)
}

impl QuadratureRule {
    /// Rule for `∫_R |q|^{2μ} g(q) dq ≈ Σ_k w_k (g(q_k) + g(-q_k))`, with
    /// nodes in `(0, q_max]` at step `2^-level` in the double-exponential
    /// variable. Below the lowest node the weight `q^{2μ+1}` is under `1e-20`.
    pub fn line_weighted(mu: f64, level: u32, q_max: f64) -> Result<Self> {
        check_mu(mu)?;
        positive("q_max", q_max)?;
        let power = 2.0 * mu + 1.0;
        let ln_lo = (-46.0 / power).max(LN_TINY);
        let u_lo = (ln_lo / FRAC_PI_2).asinh();
        let u_hi = (q_max.ln() / FRAC_PI_2).asinh();
        let h = 0.5f64.powi(level as i32);
        let (nodes, weights) = grid(level, u_lo, u_hi)
            .map(|u| {
                let ln_q = log_node(u);
                (ln_q.exp(), h * (log_jacobian(u) + power * ln_q).exp())
            })
            .unzip();
        Ok(QuadratureRule {
            kind: RuleKind::LineWeighted,
            nodes,
            weights,
            mu,
            level,
        })
    }

    /// Rule for `∫_0^∞ h(r) r dr ≈ Σ_k w_k h(r_k)` on `[r_min, r_max]`.
    pub fn radial(level: u32, r_min: f64, r_max: f64) -> Result<Self> {
        positive("r_min", r_min)?;
        positive("r_max", r_max)?;
        let u_lo = (r_min.ln() / FRAC_PI_2).asinh();
        let u_hi = (r_max.ln() / FRAC_PI_2).asinh();
        let h = 0.5f64.powi(level as i32);
        let (nodes, weights) = grid(level, u_lo, u_hi)
            .map(|u| {
                let ln_r = log_node(u);
                (ln_r.exp(), h * (log_jacobian(u) + 2.0 * ln_r).exp())
            })
            .unzip();
        Ok(QuadratureRule {
            kind: RuleKind::Radial,
            nodes,
            weights,
            mu: 0.0,
            level,
        })
    }

    /// Trapezoidal rule with `n` equispaced angles `2πj/n`.
    pub fn angular(n: usize) -> Self {
        let w = 2.0 * PI / n as f64;
        QuadratureRule {
            kind: RuleKind::Angular,
            nodes: (0..n).map(|j| j as f64 * w).collect(),
            weights: alloc::vec![w; n],
            mu: 0.0,
            level: 0,
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule; line rules pair each node with its reflection.
    pub fn integrate<G: Fn(f64) -> Complex64>(&self, g: G) -> Complex64 {
        let pairs = self.nodes.iter().zip(&self.weights);
        match self.kind {
            RuleKind::LineWeighted => pairs.map(|(&q, &w)| (g(q) + g(-q)) * w).sum(),
            RuleKind::Radial | RuleKind::Angular => pairs.map(|(&x, &w)| g(x) * w).sum(),
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

struct LevelSum {
    value: Complex64,
    mass: f64,
}

// Trapezoidal sum of F(u) over the grid k·h, marching outward from u = 0 in
// both directions until the contributions die out.
// `f` returns the node contribution and its absolute size (the integral of
// |integrand| over the node's share), which drives the tail cutoff and the
// rounding floor.
fn march<F: FnMut(f64) -> Option<(Complex64, f64)>>(level: u32, mut f: F) -> LevelSum {
    let h = 0.5f64.powi(level as i32);
    let mut value = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    if let Some((v, size)) = f(0.0) {
        value += v;
        mass += size;
    }
    for dir in [1.0, -1.0] {
        let mut run = 0;
        let mut k = 1u64;
        loop {
            let u = dir * k as f64 * h;
            let Some((v, size)) = f(u) else { break };
            value += v;
            mass += size;
            if size <= TAIL_EPS * mass {
                run += 1;
                if run == TAIL_RUN {
                    break;
                }
            } else {
                run = 0;
            }
            k += 1;
        }
    }
    LevelSum {
        value: value * h,
        mass: mass * h,
    }
}

fn refine<S: FnMut(u32) -> LevelSum>(mut sum_at: S, max_level: u32) -> Result<Estimate> {
    let start = START_LEVEL.min(max_level.saturating_sub(1));
    let mut previous = sum_at(start);
    for level in start + 1..=max_level.max(start + 1) {
        let current = sum_at(level);
        let residual = (current.value - previous.value).norm();
        if residual <= TOLERANCE * current.value.norm() || residual <= 1e-15 * current.mass {
            return Ok(Estimate {
                value: current.value,
                residual,
                level,
            });
        }
        if level >= max_level {
            return Err(Error::QuadratureNonConvergence {
                level,
                previous: previous.value,
                last: current.value,
            });
        }
        previous = current;
    }
    unreachable!("refinement loop always returns")
}

/// `∫_R |q|^{2μ} g(q) dq` for `g` with at least Gaussian decay.
///
/// Refines from level [`START_LEVEL`] until two successive levels agree to
/// [`TOLERANCE`] relative (or to rounding level relative to `∫|g||q|^{2μ}`).
pub fn integrate_line_weighted<G: Fn(f64) -> Complex64>(
    g: G,
    mu: f64,
    max_level: u32,
) -> Result<Estimate> {
    check_mu(mu)?;
    let power = 2.0 * mu + 1.0;
    refine(
        |level| {
            march(level, |u| {
                let ln_q = log_node(u);
                if !(LN_TINY * 4.0..=LN_HUGE).contains(&ln_q) {
                    return None;
                }
                let weight = (log_jacobian(u) + power * ln_q).exp();
                let q = ln_q.exp();
                let (a, b) = (g(q), g(-q));
                Some(((a + b) * weight, (a.norm() + b.norm()) * weight))
            })
        },
        max_level,
    )
}

/// `∫_0^∞ r dr ∫_0^{2π} dθ g(r e^{iθ}) w(r)` for a radial density `w`.
///
/// Level `l` uses radial step `2^-l` and `2^{l+2}` angles.
pub fn integrate_plane_radial<G, W>(g: G, w: W, max_level: u32) -> Result<Estimate>
where
    G: Fn(Complex64) -> Complex64,
    W: Fn(f64) -> f64,
{
    refine(
        |level| {
            let angles = QuadratureRule::angular(1usize << (level + 2));
            march(level, |u| {
                let ln_r = log_node(u);
                if !(LN_TINY..=LN_HUGE).contains(&ln_r) {
                    return None;
                }
                let r = ln_r.exp();
                let density = w(r);
                if density == 0.0 {
                    return Some((Complex64::new(0.0, 0.0), 0.0));
                }
                let mut ring = Complex64::new(0.0, 0.0);
                let mut ring_abs = 0.0;
                for (&theta, &w) in angles.nodes().iter().zip(angles.weights()) {
                    let v = g(Complex64::from_polar(r, theta));
                    ring += v * w;
                    ring_abs += v.norm() * w;
                }
                let weight = density * (log_jacobian(u) + 2.0 * ln_r).exp();
                Some((ring * weight, ring_abs * weight))
            })
        },
        max_level,
    )
}
