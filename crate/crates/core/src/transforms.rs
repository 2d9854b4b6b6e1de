//! The four integral transforms `A`, `B`, `C`, `D` from weighted `L²` spaces
//! on the line onto spaces of entire functions, and the identities tying them
//! together.
//!
//! | version | kernel            | domain          | range        |
//! |---------|-------------------|-----------------|--------------|
//! | A       | `ρ(z,q)/√σ(q)`    | `L²(|q|^{2μ}dq)` | `B²_{μ,t}`   |
//! | B       | `ρ(z,q)/σ(q)`     | `L²(dρ_{μ,t})`   | `B²_{μ,t}`   |
//! | C       | `ρ(z,q)`          | `L²(|q|^{2μ}dq)` | `C²_{μ,t}`   |
//! | D       | `ρ(z,q)/√σ(q)`    | `L²(dρ_{μ,t})`   | `C²_{μ,t}`   |

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
// Supplies f64 math under no_std; shadowed by inherent methods when std is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result, Trap};
use crate::heat::{exp_mu_pair_plain, heat_solve_complex, ln_normalization, rho, sigma, sigma_polygauss};
use crate::polygauss::PolyGauss;
use crate::quadrature::{integrate_line_weighted, Estimate, QuadratureRule};
use crate::report::VerificationReport;
use crate::spaces::{change_of_measure, twist, Direction, HoloSample, PlaneRule};
use crate::special::{series_split, MuParam, Series};

/// Isometry defect allowed in [`unitarity_report`].
pub const UNITARITY_TOLERANCE: f64 = 1e-6;
/// Normalized Gram change between the last two levels that ends refinement.
pub const GRAM_CONVERGENCE: f64 = 1e-8;
pub const GRAM_START_LEVEL: u32 = 3;
pub const GRAM_DEFAULT_MAX_LEVEL: u32 = 6;
// The q-rule runs this many levels finer than the planar rule it feeds.
const LINE_LEVEL_OFFSET: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Version {
    A,
    B,
    C,
    D,
}

impl Version {
    pub const ALL: [Version; 4] = [Version::A, Version::B, Version::C, Version::D];

    pub fn name(self) -> &'static str {
        match self {
            Version::A => "A",
            Version::B => "B",
            Version::C => "C",
            Version::D => "D",
        }
    }

    /// Whether the domain is `L²(dρ_{μ,t})` rather than `L²(|q|^{2μ}dq)`.
    pub fn ground_state_domain(self) -> bool {
        matches!(self, Version::B | Version::D)
    }

    /// Whether the range is `C²_{μ,t}` rather than `B²_{μ,t}`.
    pub fn twisted_range(self) -> bool {
        matches!(self, Version::C | Version::D)
    }
}

/// A kernel value tagged with where it was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelEval {
    pub version: Version,
    pub mu: f64,
    pub t: f64,
    pub z: Complex64,
    pub q: f64,
    pub value: Complex64,
}

fn ln_norm_a(p: &MuParam) -> f64 {
    -(0.5 * p.mu() + 0.25) * (2.0 * p.t()).ln() - 0.5 * libm::lgamma(p.mu() + 0.5)
}

/// `A_{μ,t}(z,q) = e^{-z²/2t - q²/4t} exp_μ(qz/t) / ((2t)^{μ/2+1/4} Γ(μ+1/2)^{1/2})`.
pub fn kernel_a_closed(mu: f64, t: f64, z: Complex64, q: f64) -> Result<Complex64> {
    let p = MuParam::new(mu, t)?;
    let split = series_split(z * (q / t), mu, Series::Value, false)?;
    let exponent = -z * z / (2.0 * t) - q * q / (4.0 * t) + ln_norm_a(&p) + split.log_scale;
    Ok(exponent.exp() * split.plus)
}

/// `A_{μ,t}(z,q) = ρ_{μ,t}(z,q) / σ_{μ,t}(q)^{1/2}`.
pub fn kernel_a_ratio(mu: f64, t: f64, z: Complex64, q: f64) -> Result<Complex64> {
    let p = MuParam::new(mu, t)?;
    Ok(rho(&p, z, q)? / sigma(&p, q).sqrt())
}

/// Kernel of the given version. `B = ρ/σ` is evaluated with the normalizing
/// constants cancelled, `e^{-z²/2t} exp_μ(qz/t)`, so it stays finite where
/// `σ` underflows.
pub fn kernel(version: Version, mu: f64, t: f64, z: Complex64, q: f64) -> Result<Complex64> {
    match version {
        Version::A | Version::D => kernel_a_closed(mu, t, z, q),
        Version::B => {
            MuParam::new(mu, t)?;
            let split = series_split(z * (q / t), mu, Series::Value, false)?;
            Ok((-z * z / (2.0 * t) + split.log_scale).exp() * split.plus)
        }
        Version::C => rho(&MuParam::new(mu, t)?, z, q),
    }
}

pub fn kernel_eval(version: Version, mu: f64, t: f64, z: Complex64, q: f64) -> Result<KernelEval> {
    Ok(KernelEval {
        version,
        mu,
        t,
        z,
        q,
        value: kernel(version, mu, t, z, q)?,
    })
}

/// `(Vψ)(z) = ∫ V(z,q) ψ(q) dm(q)` with `dm = |q|^{2μ}dq` for A and C and
/// `dm = dρ_{μ,t}` for B and D.
pub fn apply(version: Version, psi: &PolyGauss, mu: f64, t: f64, z: Complex64, max_level: u32) -> Result<Estimate> {
    let p = MuParam::new(mu, t)?;
    let trap = Trap::default();
    let est = integrate_line_weighted(
        |q| {
            let k = trap.catch(kernel(version, mu, t, z, q));
            let m = if version.ground_state_domain() { sigma(&p, q) } else { 1.0 };
            k * psi.eval(q) * m
        },
        mu,
        max_level,
    );
    trap.finish(est)
}

/// `(C_{μ,t}ψ)(z)` as the μ-convolution `σ_{μ,t} *_μ ψ` continued to
/// complex `z`.
pub fn apply_c_by_convolution(psi: &PolyGauss, mu: f64, t: f64, z: Complex64, max_level: u32) -> Result<Estimate> {
    heat_solve_complex(psi, &MuParam::new(mu, t)?, z, max_level)
}

/// `z ↦ (Vψ)(z)` as a [`HoloSample`] on a fixed q-rule; kernel failures
/// surface as NaN.
///
/// The line sum cancels heavily once `|Im z|` exceeds a few `√t`, so this is
/// for pointwise work; range inner products go through [`range_grams`].
pub fn transform_sample(version: Version, psi: &PolyGauss, mu: f64, t: f64, line_level: u32) -> Result<HoloSample> {
    let p = MuParam::new(mu, t)?;
    let rule = QuadratureRule::line_weighted(mu, line_level, q_cutoff(t, None))?;
    let psi = psi.clone();
    Ok(HoloSample::new(move |z| {
        let g = |q: f64| {
            let m = if version.ground_state_domain() { sigma(&p, q) } else { 1.0 };
            kernel(version, mu, t, z, q).unwrap_or(Complex64::new(f64::NAN, f64::NAN)) * psi.eval(q) * m
        };
        rule.integrate(g)
    }))
}

/// `|C_{μ,t}(z,q) − M(z) A_{μ,t/2}(z/2,q)| / |C_{μ,t}(z,q)|`.
pub fn ac_identity_residual(mu: f64, t: f64, z: Complex64, q: f64) -> Result<f64> {
    let lhs = kernel(Version::C, mu, t, z, q)?;
    let rhs = twist(mu, t, z)? * kernel_a_closed(mu, 0.5 * t, z * 0.5, q)?;
    Ok(relative(lhs, rhs))
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `V_tψ(q) = t^{μ/2+1/4} ψ(t^{1/2} q)`.
pub fn v_map(psi: &PolyGauss, mu: f64, t: f64) -> Result<PolyGauss> {
    MuParam::new(mu, t)?;
    Ok(psi.rescale_argument(t.sqrt())? * t.powf(0.5 * mu + 0.25))
}

/// Relative gap between `(A_{μ,t}ψ)(z)` and `(A_μ V_tψ)(t^{-1/2} z)`.
pub fn factorization_residual(mu: f64, t: f64, psi: &PolyGauss, z: Complex64, max_level: u32) -> Result<f64> {
    let lhs = apply(Version::A, psi, mu, t, z, max_level)?.value;
    let rhs = apply(Version::A, &v_map(psi, mu, t)?, mu, 1.0, z / t.sqrt(), max_level)?.value;
    Ok(relative(lhs, rhs))
}

// Upper end of the q-range for transforms sampled out to |z| = r_max.
fn q_cutoff(t: f64, r_max: Option<f64>) -> f64 {
    let r = r_max.unwrap_or(12.0 * t.sqrt());
    2.0 * r / 3.0 + 7.0 * t.sqrt()
}

/// Radius of the planar rule sampling `∫|q|^{2μ} ρ_{μ,t}(sz,q) φ(q) dq`,
/// `φ ~ e^{-b q²}`, in its range space.
///
/// Write `β = tb + 1/2` for the total q-decay in units of `1/t`. Along the
/// imaginary axis the true `|f|²ν` falls like `e^{-κ|z|²/t}`, while the
/// plain-f64 kernel sum, whose absolute error is `ε·e^{|szq|/t}`, leaves
/// `|f_err|²ν ~ ε² e^{+κ|z|²/t}`, with
/// `κ = 2(s²/4β + s²/2 − [twisted]) − [1 or 2 for t or t/2]`.
/// The two balance where `κ|z|²/t = ln(1/ε)`, leaving both near `ε`.
fn sampling_radius(t: f64, b: f64, twisted: bool) -> Result<f64> {
    let beta = t * b + 0.5;
    let (s, tw, c) = if twisted { (2.0, 1.0, 2.0) } else { (1.0, 0.0, 1.0) };
    let kappa = 2.0 * (s * s / (4.0 * beta) + 0.5 * s * s - tw) - c;
    if !(kappa > 0.0) {
        return Err(Error::GrowthOutOfClass {
            rate: b,
            limit: f64::NAN,
        });
    }
    Ok((-f64::EPSILON.ln() * t / kappa).sqrt())
}

/// Values of `∫ |q|^{2μ} ρ_{μ,t}(s z, q) φ_i(q) dq` at the half-set nodes `z`
/// of a planar rule and at their negatives, for several `φ_i` at once.
///
/// One `exp_μ` summation at `(s z, q)` supplies the four kernel values at
/// `(±sz, ±q)`.
fn heat_integrals(
    p: &MuParam,
    nodes: &[Complex64],
    s: f64,
    line: &QuadratureRule,
    phis: &[PolyGauss],
) -> Result<Vec<(Vec<Complex64>, Vec<Complex64>)>> {
    let t = p.t();
    // Line weights and the q-half of the Gaussian are folded into φ.
    let folded: Vec<Vec<(Complex64, Complex64)>> = phis
        .iter()
        .map(|phi| {
            line.nodes()
                .iter()
                .zip(line.weights())
                .map(|(&q, &w)| {
                    let g = w * (-q * q / (2.0 * t)).exp();
                    (phi.eval(q) * g, phi.eval(-q) * g)
                })
                .collect()
        })
        .collect();
    let ln_n = ln_normalization(p);
    let mut out: Vec<(Vec<Complex64>, Vec<Complex64>)> =
        phis.iter().map(|_| (Vec::with_capacity(nodes.len()), Vec::with_capacity(nodes.len()))).collect();
    let mut plus = alloc::vec![Complex64::new(0.0, 0.0); phis.len()];
    let mut minus = plus.clone();
    for &z0 in nodes {
        let z = z0 * s;
        plus.iter_mut().chain(minus.iter_mut()).for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (k, &q) in line.nodes().iter().enumerate() {
            let (e_plus, e_minus, log_scale) = exp_mu_pair_plain(p, z, q)?;
            let (e_plus, e_minus) = if log_scale != 0.0 {
                let f = log_scale.exp();
                (e_plus * f, e_minus * f)
            } else {
                (e_plus, e_minus)
            };
            for (i, phi) in folded.iter().enumerate() {
                let (a, b) = phi[k];
                plus[i] += e_plus * a + e_minus * b;
                minus[i] += e_minus * a + e_plus * b;
            }
        }
        let front = (-z * z / (2.0 * t) + ln_n).exp();
        for i in 0..phis.len() {
            out[i].0.push(plus[i] * front);
            out[i].1.push(minus[i] * front);
        }
    }
    Ok(out)
}

/// Per version: a plane rule and, per probe, the samples at each node `z`
/// and at `-z`.
pub type RangeSamples = Vec<(PlaneRule, Vec<(Vec<Complex64>, Vec<Complex64>)>)>;

/// `(Vψ_i)` sampled for range inner products, for one or more versions
/// sharing a range family (A/B or C/D), with the `G` twist already applied
/// for C and D. Entry `v` pairs the `B²` rule for `versions[v]` with the
/// samples of that version applied to each probe.
pub fn range_samples(
    versions: &[Version],
    probes: &[PolyGauss],
    mu: f64,
    t: f64,
    level: u32,
) -> Result<RangeSamples> {
    let p = MuParam::new(mu, t)?;
    let twisted = versions.first().is_some_and(|v| v.twisted_range());
    assert!(
        versions.iter().all(|v| v.twisted_range() == twisted),
        "versions must share a range space"
    );
    let range_t = if twisted { 0.5 * t } else { t };
    let s = if twisted { 2.0 } else { 1.0 };
    // Every version is ∫|q|^{2μ} ρ(z,q) φ(q) dq for φ = ψ σ^e:
    // A: e = -1/2, B: e = 0 (dρ cancels 1/σ), C: e = 0, D: e = 1/2.
    let mut phis = Vec::with_capacity(versions.len() * probes.len());
    for version in versions {
        for psi in probes {
            phis.push(match version {
                Version::A => change_of_measure(psi, mu, t, Direction::ToGroundState)?,
                Version::B | Version::C => psi.clone(),
                Version::D => change_of_measure(psi, mu, t, Direction::FromGroundState)?,
            });
        }
    }
    let radii = phis
        .chunks(probes.len().max(1))
        .map(|group| {
            let slowest = group.iter().map(|phi| phi.rate()).fold(f64::INFINITY, f64::min);
            sampling_radius(t, slowest, twisted)
        })
        .collect::<Result<Vec<f64>>>()?;
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let plane = PlaneRule::new(mu, range_t, level, r_max)?;
    let nodes = plane.nodes();
    let line = QuadratureRule::line_weighted(mu, level + LINE_LEVEL_OFFSET, q_cutoff(t, Some(s * r_max)))?;
    let mut values = heat_integrals(&p, &nodes, s, &line, &phis)?;
    if twisted {
        // Gf(z) = f(2z)/M(2z); M is even, so the same factor serves -z.
        for (k, &z) in nodes.iter().enumerate() {
            let inv = twist(mu, t, z * 2.0)?.inv();
            for (plus, minus) in values.iter_mut() {
                plus[k] *= inv;
                minus[k] *= inv;
            }
        }
    }
    let mut grouped = Vec::with_capacity(versions.len());
    let mut rest = values.into_iter();
    for &r in &radii {
        let rule = plane.truncated(r);
        let n = rule.len();
        let samples = rest
            .by_ref()
            .take(probes.len())
            .map(|(mut plus, mut minus)| {
                plus.truncate(n);
                minus.truncate(n);
                (plus, minus)
            })
            .collect();
        grouped.push((rule, samples));
    }
    Ok(grouped)
}

/// Domain Gram matrix `⟨ψ_i, ψ_j⟩` in `L²_μ` or `L²(dρ_{μ,t})`.
pub fn domain_gram(version: Version, probes: &[PolyGauss], mu: f64, t: f64, max_level: u32) -> Result<Vec<Vec<Complex64>>> {
    let p = MuParam::new(mu, t)?;
    let n = probes.len();
    let mut gram = alloc::vec![alloc::vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            let est = integrate_line_weighted(
                |q| {
                    let m = if version.ground_state_domain() { sigma(&p, q) } else { 1.0 };
                    probes[i].eval(q) * probes[j].eval(q).conj() * m
                },
                mu,
                max_level,
            )?;
            gram[i][j] = est.value;
            gram[j][i] = est.value.conj();
        }
    }
    Ok(gram)
}

/// Range Gram matrices at one planar level, one per version of a family.
pub fn range_grams(versions: &[Version], probes: &[PolyGauss], mu: f64, t: f64, level: u32) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let n = probes.len();
    Ok(range_samples(versions, probes, mu, t, level)?
        .iter()
        .map(|(plane, vals)| {
            let mut gram = alloc::vec![alloc::vec![Complex64::new(0.0, 0.0); n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = plane.inner(&vals[i].0, &vals[i].1, &vals[j].0, &vals[j].1);
                    gram[i][j] = v;
                    gram[j][i] = v.conj();
                }
            }
            gram
        })
        .collect())
}

/// Outcome of a unitarity check before it is condensed into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitarityOutcome {
    pub version: Version,
    pub mu: f64,
    pub t: f64,
    pub domain: Vec<Vec<Complex64>>,
    pub range: Vec<Vec<Complex64>>,
    /// `max_j |R_ij − D_ij| / sqrt(D_ii D_jj)` for each probe `i`.
    pub probe_defects: Vec<f64>,
    /// Normalized change of the range Gram over the last refinement.
    pub refinement_change: f64,
    pub level: u32,
}

impl UnitarityOutcome {
    pub fn max_defect(&self) -> f64 {
        self.probe_defects.iter().copied().fold(0.0, f64::max)
    }

    pub fn report(&self) -> VerificationReport {
        let mut params = BTreeMap::new();
        params.insert(String::from("mu"), self.mu);
        params.insert(String::from("t"), self.t);
        params.insert(String::from("level"), self.level as f64);
        params.insert(String::from("refinement_change"), self.refinement_change);
        for (i, d) in self.probe_defects.iter().enumerate() {
            params.insert(format!("probe_{i}_defect"), *d);
        }
        let n = self.probe_defects.len();
        VerificationReport::new(
            format!("unitarity-{}", self.version.name()),
            params,
            n * n,
            self.max_defect(),
            UNITARITY_TOLERANCE,
        )
    }
}

fn normalized_gap(a: &[Vec<Complex64>], b: &[Vec<Complex64>], domain: &[Vec<Complex64>]) -> Vec<f64> {
    (0..a.len())
        .map(|i| {
            (0..a.len())
                .map(|j| (a[i][j] - b[i][j]).norm() / (domain[i][i].re * domain[j][j].re).sqrt())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Compares domain and range Gram matrices of `probes` under `version`,
/// refining the planar level from [`GRAM_START_LEVEL`] until the range Gram
/// changes by less than [`GRAM_CONVERGENCE`].
pub fn unitarity_check(
    version: Version,
    mu: f64,
    t: f64,
    probes: &[PolyGauss],
    line_max_level: u32,
    plane_max_level: u32,
) -> Result<UnitarityOutcome> {
    let mut out = unitarity_checks(&[version], mu, t, probes, line_max_level, plane_max_level)?;
    Ok(out.remove(0))
}

/// [`unitarity_check`] for several versions; versions with a common range
/// space share their kernel evaluations. Outcomes follow the input order.
pub fn unitarity_checks(
    versions: &[Version],
    mu: f64,
    t: f64,
    probes: &[PolyGauss],
    line_max_level: u32,
    plane_max_level: u32,
) -> Result<Vec<UnitarityOutcome>> {
    let mut outcomes: Vec<Option<UnitarityOutcome>> = versions.iter().map(|_| None).collect();
    for twisted in [false, true] {
        let family: Vec<usize> = (0..versions.len())
            .filter(|&k| versions[k].twisted_range() == twisted)
            .collect();
        if family.is_empty() {
            continue;
        }
        let members: Vec<Version> = family.iter().map(|&k| versions[k]).collect();
        let domains = members
            .iter()
            .map(|&v| domain_gram(v, probes, mu, t, line_max_level))
            .collect::<Result<Vec<_>>>()?;
        let start = GRAM_START_LEVEL.min(plane_max_level.saturating_sub(1));
        let mut previous = range_grams(&members, probes, mu, t, start)?;
        for level in start + 1..=plane_max_level.max(start + 1) {
            let ranges = range_grams(&members, probes, mu, t, level)?;
            let changes: Vec<f64> = (0..members.len())
                .map(|m| normalized_gap(&ranges[m], &previous[m], &domains[m]).into_iter().fold(0.0, f64::max))
                .collect();
            let worst = changes.iter().copied().fold(0.0, f64::max);
            if worst <= GRAM_CONVERGENCE || level >= plane_max_level {
                if worst > GRAM_CONVERGENCE {
                    let m = changes.iter().position(|&c| c == worst).unwrap_or(0);
                    return Err(Error::QuadratureNonConvergence {
                        level,
                        previous: previous[m][0][0],
                        last: ranges[m][0][0],
                    });
                }
                for (m, range) in ranges.into_iter().enumerate() {
                    let probe_defects = normalized_gap(&range, &domains[m], &domains[m]);
                    outcomes[family[m]] = Some(UnitarityOutcome {
                        version: members[m],
                        mu,
                        t,
                        domain: domains[m].clone(),
                        range,
                        probe_defects,
                        refinement_change: changes[m],
                        level,
                    });
                }
                break;
            }
            previous = ranges;
        }
    }
    Ok(outcomes.into_iter().map(|o| o.expect("every family is resolved")).collect())
}

/// [`unitarity_check`] condensed into a [`VerificationReport`].
pub fn unitarity_report(
    version: Version,
    mu: f64,
    t: f64,
    probes: &[PolyGauss],
    line_max_level: u32,
    plane_max_level: u32,
) -> Result<VerificationReport> {
    Ok(unitarity_check(version, mu, t, probes, line_max_level, plane_max_level)?.report())
}

/// The probe set `q^k e^{-q²/2t}`, `k < count`.
pub fn hermite_probes(t: f64, count: usize) -> Result<Vec<PolyGauss>> {
    (0..count).map(|k| PolyGauss::monomial(k, 0.5 / t)).collect()
}

/// `√σ_{μ,t}`, the ground state of `L²_μ`.
pub fn ground_state(mu: f64, t: f64) -> Result<PolyGauss> {
    let p = MuParam::new(mu, t)?;
    change_of_measure(&sigma_polygauss(&p), mu, t, Direction::ToGroundState)
}
