//! Exact algebra of functions `f(q) = p(q)·e^{-b q²}` with a complex
//! polynomial `p` and a fixed rate `b ≥ 0`.
//!
//! The class is closed under the Dunkl operator
//! `D_μ f(q) = f'(q) + (μ/q)(f(q) - f(-q))`, under parity, under the position
//! operator and under every finite combination of those, so the algebraic
//! identities of μ-deformed quantum mechanics can be checked coefficientwise
//! without any discretization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::check_mu;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `p(q)·e^{-rate·q²}`; `coeffs[k]` multiplies `q^k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolyGauss {
    coeffs: Vec<Complex64>,
    rate: f64,
}

/// Ladder operator selector: `a_μ = (Q + iP)/√2` or `a*_μ = (Q - iP)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Annihilate,
    Create,
}

/// Truncated μ-translate together with the size of the last series term kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub function: PolyGauss,
    /// Largest coefficient modulus of the `n = terms - 1` contribution.
    pub last_term_norm: f64,
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::RateOutOfClass(rate))
    }
}

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.last() == Some(&ZERO) {
        coeffs.pop();
    }
    coeffs
}

impl PolyGauss {
    pub fn new(coeffs: Vec<Complex64>, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(PolyGauss {
            coeffs: trim(coeffs),
            rate,
        })
    }

    pub fn from_real(coeffs: &[f64], rate: f64) -> Result<Self> {
        PolyGauss::new(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            rate,
        )
    }

    pub fn zero(rate: f64) -> Result<Self> {
        PolyGauss::new(Vec::new(), rate)
    }

    pub fn constant(c: Complex64, rate: f64) -> Result<Self> {
        PolyGauss::new(vec![c], rate)
    }

    /// `q^k e^{-rate q²}`.
    pub fn monomial(k: usize, rate: f64) -> Result<Self> {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        PolyGauss::new(coeffs, rate)
    }

    /// `e_N(q) = Σ_{n ≤ N} (λq)^n / γ_μ(n)`, the partial sum of the `D_μ`
    /// eigenfunction `exp_μ(λq)`.
    pub fn truncated_exp_mu(lambda: f64, mu: f64, order: u32) -> Result<Self> {
        check_mu(mu)?;
        let mut coeffs = Vec::with_capacity(order as usize + 1);
        let mut c = 1.0;
        coeffs.push(Complex64::new(c, 0.0));
        for n in 1..=order {
            let step = if n % 2 == 1 { n as f64 + 2.0 * mu } else { n as f64 };
            c *= lambda / step;
            coeffs.push(Complex64::new(c, 0.0));
        }
        PolyGauss::new(coeffs, 0.0)
    }

    // Callers guarantee the rate is already valid.
    fn with_coeffs(&self, coeffs: Vec<Complex64>) -> Self {
        PolyGauss {
            coeffs: trim(coeffs),
            rate: self.rate,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Polynomial degree; `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max_k |c_k|`, the norm used for coefficient-level identity checks.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.eval_complex(Complex64::new(q, 0.0))
    }

    /// Entire continuation `p(z)·e^{-b z²}`.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let p = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c);
        if self.rate == 0.0 {
            p
        } else {
            p * (-self.rate * z * z).exp()
        }
    }

    /// Dunkl operator. For `f = p e^{-b q²}` the result is
    /// `[p' - 2bq p + (2μ/q) p_odd] e^{-b q²}`, which is again polynomial.
    pub fn dunkl(&self, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        let n = self.coeffs.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let mut out = vec![ZERO; n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k >= 1 {
                let factor = if k % 2 == 1 {
                    k as f64 + 2.0 * mu
                } else {
                    k as f64
                };
                out[k - 1] += c * factor;
            }
            out[k + 1] -= c * (2.0 * self.rate);
        }
        Ok(self.with_coeffs(out))
    }

    /// `(J f)(q) = f(-q)`.
    pub fn parity(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
            .collect();
        self.with_coeffs(coeffs)
    }

    /// `(f_e, f_o)` with `f = f_e + f_o`, `f_e` even and `f_o` odd.
    pub fn even_odd_split(&self) -> (Self, Self) {
        let pick = |keep_odd: bool| {
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if (k % 2 == 1) == keep_odd { c } else { ZERO })
                .collect()
        };
        (self.with_coeffs(pick(false)), self.with_coeffs(pick(true)))
    }

    /// `Q f (q) = q f(q)`.
    pub fn position(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        self.with_coeffs(coeffs)
    }

    /// `P f = (ħ/i) D_μ f`.
    pub fn momentum(&self, mu: f64, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::NonPositive {
                name: "hbar",
                value: hbar,
            });
        }
        Ok(self.dunkl(mu)? * Complex64::new(0.0, -hbar))
    }

    /// `i[P, Q]f - f - 2μ Jf` at `ħ = 1`; the zero function when the deformed
    /// canonical commutation relation holds.
    pub fn commutator_defect(&self, mu: f64) -> Result<Self> {
        let pq = self.position().momentum(mu, 1.0)?;
        let qp = self.momentum(mu, 1.0)?.position();
        Ok((pq - qp) * I - self.clone() - self.parity() * (2.0 * mu))
    }

    /// `a_μ f` or `a*_μ f` at `ħ = 1`. With `P = -iD` these are `(Q ± D)/√2`.
    pub fn ladder(&self, mu: f64, kind: Ladder) -> Result<Self> {
        let q = self.position();
        let ip = self.momentum(mu, 1.0)? * I;
        let combined = match kind {
            Ladder::Annihilate => q + ip,
            Ladder::Create => q - ip,
        };
        Ok(combined * core::f64::consts::FRAC_1_SQRT_2)
    }

    /// `[a_μ, a*_μ] f`.
    pub fn ladder_commutator(&self, mu: f64) -> Result<Self> {
        let a_astar = self
            .ladder(mu, Ladder::Create)?
            .ladder(mu, Ladder::Annihilate)?;
        let astar_a = self
            .ladder(mu, Ladder::Annihilate)?
            .ladder(mu, Ladder::Create)?;
        Ok(a_astar - astar_a)
    }

    /// Truncated μ-deformed translation
    /// `Σ_{n < terms} (-1)^n x^n D_μ^n f / γ_μ(n)`.
    pub fn mu_translate(&self, x: f64, mu: f64, terms: usize) -> Result<Translation> {
        check_mu(mu)?;
        let mut total = self.clone();
        let mut term = self.clone();
        let mut last_term_norm = self.max_coeff_norm();
        if terms == 0 {
            return Ok(Translation {
                function: PolyGauss::zero(self.rate)?,
                last_term_norm: 0.0,
            });
        }
        // Scaling each step keeps the coefficients of D_μ^n f from
        // overflowing at large n.
        for n in 1..terms {
            let step = if n % 2 == 1 {
                n as f64 + 2.0 * mu
            } else {
                n as f64
            };
            term = term.dunkl(mu)? * (-x / step);
            last_term_norm = term.max_coeff_norm();
            total = total + term.clone();
        }
        Ok(Translation {
            function: total,
            last_term_norm,
        })
    }

    /// `f(s q)`: coefficients `c_k s^k`, rate `b s²`.
    pub fn rescale_argument(&self, s: f64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * s.powi(k as i32))
            .collect();
        PolyGauss::new(coeffs, self.rate * s * s)
    }

    /// Multiplies by `e^{-delta q²}`; fails if the resulting rate is negative.
    pub fn shift_rate(&self, delta: f64) -> Result<Self> {
        PolyGauss::new(self.coeffs.clone(), self.rate + delta)
    }

    fn zip_with(&self, other: &Self, sign: f64) -> Self {
        assert!(
            self.rate == other.rate,
            "PolyGauss sums require equal Gaussian rates ({} vs {})",
            self.rate,
            other.rate
        );
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(ZERO);
                let b = other.coeffs.get(k).copied().unwrap_or(ZERO);
                a + b * sign
            })
            .collect();
        self.with_coeffs(coeffs)
    }
}

impl Add for PolyGauss {
    type Output = PolyGauss;

    fn add(self, rhs: PolyGauss) -> PolyGauss {
        self.zip_with(&rhs, 1.0)
    }
}

impl Sub for PolyGauss {
    type Output = PolyGauss;

    fn sub(self, rhs: PolyGauss) -> PolyGauss {
        self.zip_with(&rhs, -1.0)
    }
}

impl Neg for PolyGauss {
    type Output = PolyGauss;

    fn neg(self) -> PolyGauss {
        self * -1.0
    }
}

impl Mul<Complex64> for PolyGauss {
    type Output = PolyGauss;

    fn mul(self, c: Complex64) -> PolyGauss {
        let coeffs = self.coeffs.iter().map(|&a| a * c).collect();
        self.with_coeffs(coeffs)
    }
}

impl Mul<f64> for PolyGauss {
    type Output = PolyGauss;

    fn mul(self, c: f64) -> PolyGauss {
        self * Complex64::new(c, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_mu;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(coeffs: &[f64], rate: f64) -> PolyGauss {
        PolyGauss::from_real(coeffs, rate).unwrap()
    }

    fn assert_coeffs(f: &PolyGauss, expect: &[Complex64], tol: f64) {
        let n = f.coeffs().len().max(expect.len());
        for k in 0..n {
            let a = f.coeffs().get(k).copied().unwrap_or(ZERO);
            let b = expect.get(k).copied().unwrap_or(ZERO);
            assert!((a - b).norm() <= tol, "coefficient {k}: {a} vs {b}");
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(real(&[1.0], 0.0).eval(3.0), c(1.0));
        let v = real(&[0.0, 1.0], 1.0).eval(1.0);
        assert!((v - c((-1.0f64).exp())).norm() < 1e-16);
        let v = real(&[1.0, 0.0, 1.0], 0.5).eval(2.0);
        assert!((v - c(5.0 * (-2.0f64).exp())).norm() < 1e-15);
    }

    #[test]
    fn rejects_negative_rate() {
        assert!(matches!(
            PolyGauss::from_real(&[1.0], -0.1),
            Err(Error::RateOutOfClass(_))
        ));
    }

    #[test]
    fn dunkl_examples() {
        assert_coeffs(&real(&[0.0, 1.0], 0.0).dunkl(0.5).unwrap(), &[c(2.0)], 0.0);
        assert_coeffs(
            &real(&[0.0, 0.0, 1.0], 0.0).dunkl(1.7).unwrap(),
            &[c(0.0), c(2.0)],
            0.0,
        );
        // (q e^{-q²})' + (2/q)·q e^{-q²}  = (1 - 2q² + 2) e^{-q²}
        let d = real(&[0.0, 1.0], 1.0).dunkl(1.0).unwrap();
        assert_coeffs(&d, &[c(3.0), c(0.0), c(-2.0)], 0.0);
        assert_eq!(d.rate(), 1.0);
    }

    #[test]
    fn dunkl_at_zero_mu_is_classical_derivative() {
        let f = real(&[0.3, -1.2, 0.7, 2.0], 0.8);
        let d = f.dunkl(0.0).unwrap();
        for &q in &[-1.3, -0.2, 0.0, 0.4, 1.9] {
            let h = 1e-5;
            let fd = (f.eval(q + h) - f.eval(q - h)) / (2.0 * h);
            assert!((d.eval(q) - fd).norm() < 1e-8);
        }
    }

    #[test]
    fn dunkl_matches_difference_quotient_definition() {
        let mu = 0.8;
        let f = real(&[0.5, 1.0, -0.4, 0.9, 0.2], 0.3);
        let d = f.dunkl(mu).unwrap();
        for &q in &[-1.1, -0.3, 0.6, 1.4] {
            let h = 1e-5;
            let fd = (f.eval(q + h) - f.eval(q - h)) / (2.0 * h);
            let reflect = (f.eval(q) - f.eval(-q)) * (mu / q);
            assert!((d.eval(q) - fd - reflect).norm() < 1e-8);
        }
        // value at the origin is (2μ + 1) f'(0)
        assert!((d.eval(0.0) - c((2.0 * mu + 1.0) * 1.0)).norm() < 1e-14);
    }

    #[test]
    fn parity_and_split_examples() {
        assert_eq!(real(&[1.0], 0.0).parity(), real(&[1.0], 0.0));
        assert_eq!(real(&[0.0, 1.0], 0.0).parity(), real(&[0.0, -1.0], 0.0));
        assert_eq!(real(&[1.0, 1.0], 1.0).parity(), real(&[1.0, -1.0], 1.0));
        let (e, o) = real(&[1.0, 1.0], 0.0).even_odd_split();
        assert_eq!((e, o), (real(&[1.0], 0.0), real(&[0.0, 1.0], 0.0)));
        let (e, o) = real(&[0.0, 0.0, 0.0, 1.0], 0.0).even_odd_split();
        assert!(e.is_zero());
        assert_eq!(o, real(&[0.0, 0.0, 0.0, 1.0], 0.0));
        let (e, o) = real(&[2.0, 1.0, 1.0], 0.0).even_odd_split();
        assert_eq!((e, o), (real(&[2.0, 0.0, 1.0], 0.0), real(&[0.0, 1.0], 0.0)));
    }

    #[test]
    fn position_and_momentum_examples() {
        assert_eq!(real(&[1.0], 0.0).position(), real(&[0.0, 1.0], 0.0));
        let p = real(&[0.0, 1.0], 0.0).momentum(0.0, 1.0).unwrap();
        assert_coeffs(&p, &[Complex64::new(0.0, -1.0)], 0.0);
        let p = real(&[0.0, 0.0, 1.0], 0.0).momentum(0.5, 1.0).unwrap();
        assert_coeffs(&p, &[ZERO, Complex64::new(0.0, -2.0)], 0.0);
    }

    #[test]
    fn commutator_defect_examples() {
        for (f, mu) in [
            (real(&[1.0], 0.0), 0.5),
            (real(&[0.0, 0.0, 0.0, 1.0], 1.0), 1.0),
            (real(&[0.0, 0.0, 1.0], 0.0), 0.0),
        ] {
            assert!(f.commutator_defect(mu).unwrap().max_coeff_norm() <= 1e-12);
        }
    }

    #[test]
    fn ladder_examples() {
        let ground = real(&[1.0], 0.5);
        assert!(ground
            .ladder(0.0, Ladder::Annihilate)
            .unwrap()
            .max_coeff_norm()
            < 1e-15);
        let comm = real(&[1.0], 0.0).ladder_commutator(0.5).unwrap();
        assert_coeffs(&comm, &[c(2.0)], 1e-14);
        let comm = real(&[0.0, 1.0], 0.0).ladder_commutator(0.5).unwrap();
        assert!(comm.max_coeff_norm() < 1e-14);
    }

    #[test]
    fn translate_examples() {
        let one = real(&[1.0], 0.0);
        let t = one.mu_translate(2.5, 0.3, 10).unwrap();
        assert_eq!(t.function, one);
        let q = real(&[0.0, 1.0], 0.0);
        let t = q.mu_translate(0.7, 0.0, 2).unwrap();
        assert_coeffs(&t.function, &[c(-0.7), c(1.0)], 1e-15);
    }

    #[test]
    fn translate_at_zero_mu_shifts_polynomials() {
        let f = real(&[0.4, -1.0, 2.0, 0.5, -0.25], 0.0);
        let x = 0.9;
        let t = f.mu_translate(x, 0.0, 8).unwrap().function;
        for &q in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            assert!((t.eval(q) - f.eval(q - x)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenfunction_truncation_residual() {
        let (mu, lambda, n) = (0.7, 1.3, 12u32);
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| lambda.powi(k as i32) / gamma_mu(k, mu).unwrap())
            .collect();
        let e = real(&coeffs, 0.0);
        assert_coeffs(&PolyGauss::truncated_exp_mu(lambda, mu, n).unwrap(), e.coeffs(), 1e-15);
        let residual = e.dunkl(mu).unwrap() - e * lambda;
        let mut expect = vec![0.0; n as usize + 1];
        expect[n as usize] = -lambda.powi(n as i32 + 1) / gamma_mu(n, mu).unwrap();
        let expect: Vec<Complex64> = expect.into_iter().map(c).collect();
        assert_coeffs(&residual, &expect, 1e-12);
    }
}
