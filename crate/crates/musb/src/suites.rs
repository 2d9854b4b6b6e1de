//! Identity suites. Each suite expands into independent cells over the
//! parameter grids; each cell yields one report per identity it checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;

use musb_core::heat::{heat_mass, heat_solve, mu_convolve, pde_residual, rho_real, semigroup_defect, sigma, sigma_polygauss, ConvolutionKernel};
use musb_core::quadrature::integrate_line_weighted;
use musb_core::spaces::{density_even, gauss_density, rho_measure_mass};
use musb_core::special::{bessel_k, exp_mu, exp_mu_prime, gamma_euler, gamma_mu};
use musb_core::transforms::{ac_identity_residual, factorization_residual, hermite_probes, kernel, unitarity_checks, Version};
use musb_core::{Complex64, Error, MuParam, PolyGauss, VerificationReport};

use crate::grid::linspace;
use crate::{is_numeric, CliError, Levels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Special,
    Heat,
    Haar,
    Pde,
    Ccr,
    AcIdentity,
    Unitarity,
    All,
}

pub const DEFAULT_MU_GRID: [f64; 6] = [-0.4, -0.1, 0.0, 0.5, 1.0, 3.0];
pub const DEFAULT_T_GRID: [f64; 3] = [0.25, 1.0, 4.0];

/// Step of the time difference in the PDE check.
pub const PDE_STEP: f64 = 1e-3;
pub const TRANSLATION_TERMS: usize = 60;

#[derive(Debug, Clone)]
pub struct Config {
    pub mu_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub levels: Levels,
}

impl Config {
    /// Rejects grids that are empty or leave the parameter domain.
    pub fn new(mu_grid: Vec<f64>, t_grid: Vec<f64>, levels: Levels) -> Result<Self, CliError> {
        if mu_grid.is_empty() || t_grid.is_empty() {
            return Err(CliError::usage("parameter grids must not be empty"));
        }
        for &mu in &mu_grid {
            for &t in &t_grid {
                MuParam::new(mu, t).map_err(CliError::from_core)?;
            }
        }
        Ok(Config { mu_grid, t_grid, levels })
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            mu_grid: DEFAULT_MU_GRID.to_vec(),
            t_grid: DEFAULT_T_GRID.to_vec(),
            levels: Levels::default(),
        }
    }
}

/// One independent unit of work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Task {
    QuadratureMoments { mu: f64 },
    SpecialFunctions { mu: f64 },
    SpecialFixed,
    ClassicalReduction,
    Heat { mu: f64, t: f64 },
    TranslationSeries { mu: f64 },
    Haar { mu: f64, t: f64 },
    Pde { mu: f64, t: f64 },
    Ccr { mu: f64 },
    AcIdentity { mu: f64, t: f64 },
    Unitarity { mu: f64, t: f64 },
}

impl Task {
    pub fn label(&self) -> String {
        match *self {
            Task::QuadratureMoments { mu } => format!("quadrature mu={mu}"),
            Task::SpecialFunctions { mu } => format!("special mu={mu}"),
            Task::SpecialFixed => "special".into(),
            Task::ClassicalReduction => "mu0-reduction".into(),
            Task::Heat { mu, t } => format!("heat mu={mu} t={t}"),
            Task::TranslationSeries { mu } => format!("translation mu={mu}"),
            Task::Haar { mu, t } => format!("haar mu={mu} t={t}"),
            Task::Pde { mu, t } => format!("pde mu={mu} t={t}"),
            Task::Ccr { mu } => format!("ccr mu={mu}"),
            Task::AcIdentity { mu, t } => format!("ac-identity mu={mu} t={t}"),
            Task::Unitarity { mu, t } => format!("unitarity mu={mu} t={t}"),
        }
    }
}

pub fn tasks(suite: Suite, cfg: &Config) -> Vec<Task> {
    let mut out = Vec::new();
    let cells = |f: fn(f64, f64) -> Task| -> Vec<Task> {
        cfg.mu_grid
            .iter()
            .flat_map(|&mu| cfg.t_grid.iter().map(move |&t| f(mu, t)))
            .collect()
    };
    let per_mu = |f: fn(f64) -> Task| -> Vec<Task> { cfg.mu_grid.iter().map(|&mu| f(mu)).collect() };
    let wanted = |s: Suite| suite == s || suite == Suite::All;
    if wanted(Suite::Special) {
        out.extend(per_mu(|mu| Task::QuadratureMoments { mu }));
        out.push(Task::SpecialFixed);
        out.push(Task::ClassicalReduction);
        out.extend(per_mu(|mu| Task::SpecialFunctions { mu }));
    }
    if wanted(Suite::Heat) {
        out.extend(cells(|mu, t| Task::Heat { mu, t }));
        out.extend(per_mu(|mu| Task::TranslationSeries { mu }));
    }
    if wanted(Suite::Haar) {
        out.extend(cells(|mu, t| Task::Haar { mu, t }));
    }
    if wanted(Suite::Pde) {
        out.extend(cells(|mu, t| Task::Pde { mu, t }));
    }
    if wanted(Suite::Ccr) {
        out.extend(per_mu(|mu| Task::Ccr { mu }));
    }
    if wanted(Suite::AcIdentity) {
        out.extend(cells(|mu, t| Task::AcIdentity { mu, t }));
    }
    if wanted(Suite::Unitarity) {
        out.extend(cells(|mu, t| Task::Unitarity { mu, t }));
    }
    out
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CellError {
    pub cell: String,
    pub identity_id: String,
    pub message: String,
    pub non_convergence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub task: Task,
    pub reports: Vec<VerificationReport>,
    pub errors: Vec<CellError>,
}

/// Runs `tasks` on at most `jobs` threads; outcomes follow task order.
pub fn run(tasks: &[Task], cfg: &Config, jobs: usize) -> Result<Vec<CellOutcome>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(|| tasks.par_iter().map(|task| run_task(*task, cfg)).collect()))
}

type Run<'a> = Box<dyn Fn() -> Result<Vec<VerificationReport>, Error> + 'a>;
type Check<'a> = (&'static [&'static str], Run<'a>);

fn one<'a>(f: impl Fn() -> Result<VerificationReport, Error> + 'a) -> Run<'a> {
    Box::new(move || f().map(|r| vec![r]))
}

pub fn run_task(task: Task, cfg: &Config) -> CellOutcome {
    let line = cfg.levels.line;
    let checks: Vec<Check> = match task {
        Task::QuadratureMoments { mu } => vec![(&["quadrature-gamma-moments"], one(move || quadrature_moments(mu, line)))],
        Task::SpecialFixed => vec![
            (&["gamma-mu-factorial"], one(gamma_mu_factorial)),
            (&["gamma-euler"], one(gamma_euler_values)),
            (&["bessel-k-closed-forms"], one(bessel_closed_forms)),
        ],
        Task::ClassicalReduction => vec![
            (&["mu0-heat-kernel"], one(mu0_heat_kernel)),
            (&["mu0-planar-density"], one(mu0_planar_density)),
            (&["mu0-bargmann-kernel"], one(mu0_bargmann_kernel)),
        ],
        Task::SpecialFunctions { mu } => {
            let mut v: Vec<Check> = vec![(&["exp-mu-eigenfunction"], one(move || exp_mu_eigenfunction(mu)))];
            if mu >= 0.0 {
                v.push((&["exp-mu-imaginary-bound"], one(move || exp_mu_imaginary_bound(mu))));
            }
            v
        }
        Task::Heat { mu, t } => vec![
            (&["heat-symmetry"], one(move || heat_symmetry(mu, t))),
            (&["semigroup"], one(move || semigroup(mu, t, line))),
            (&["heat-routes"], one(move || convolution_routes(mu, t, line))),
        ],
        Task::TranslationSeries { mu } => vec![(&["translation-series"], one(move || translation_series(mu)))],
        Task::Haar { mu, t } => vec![
            (&["rho-measure-mass"], one(move || measure_mass(mu, t, line))),
            (&["heat-mass"], one(move || kernel_mass(mu, t, line))),
        ],
        Task::Pde { mu, t } => vec![(&["pde-residual", "pde-richardson"], Box::new(move || pde(mu, t)))],
        Task::Ccr { mu } => vec![
            (&["ccr-commutator"], one(move || ccr(mu))),
            (&["ladder-commutator"], one(move || ladder(mu))),
            (&["eigen-truncation"], one(move || eigen_truncation(mu))),
        ],
        Task::AcIdentity { mu, t } => vec![
            (&["ac-identity"], one(move || ac_identity(mu, t))),
            (&["kernel-coherence"], one(move || kernel_coherence(mu, t))),
            (&["factorization"], one(move || factorization(mu, t, line))),
        ],
        Task::Unitarity { mu, t } => return unitarity(task, mu, t, cfg.levels),
    };
    let mut outcome = CellOutcome {
        task,
        reports: Vec::new(),
        errors: Vec::new(),
    };
    for (ids, check) in checks {
        let start = Instant::now();
        match check() {
            Ok(reports) => {
                let each = start.elapsed() / reports.len().max(1) as u32;
                outcome.reports.extend(reports.into_iter().map(|r| r.with_wall_time(each)));
            }
            Err(e) => {
                for id in ids {
                    outcome.fail(id, params_of(task), e.clone(), start);
                }
            }
        }
    }
    outcome
}

impl CellOutcome {
    fn fail(&mut self, id: &str, params: BTreeMap<String, f64>, e: Error, start: Instant) {
        self.errors.push(CellError {
            cell: self.task.label(),
            identity_id: id.to_string(),
            message: e.to_string(),
            non_convergence: is_numeric(&e),
        });
        self.reports
            .push(VerificationReport::new(id, params, 0, f64::INFINITY, 0.0).with_wall_time(start.elapsed()));
    }
}

fn params_of(task: Task) -> BTreeMap<String, f64> {
    match task {
        Task::QuadratureMoments { mu } | Task::SpecialFunctions { mu } | Task::TranslationSeries { mu } | Task::Ccr { mu } => {
            params(&[("mu", mu)])
        }
        Task::Heat { mu, t } | Task::Haar { mu, t } | Task::Pde { mu, t } | Task::AcIdentity { mu, t } | Task::Unitarity { mu, t } => {
            params(&[("mu", mu), ("t", t)])
        }
        Task::SpecialFixed | Task::ClassicalReduction => BTreeMap::new(),
    }
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn rel(a: f64, b: f64) -> f64 {
    relative(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
}

/// Largest value of `f` over `points`, propagating the first error.
fn worst<T>(points: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Result<f64, Error>) -> Result<(f64, usize), Error> {
    let mut max = 0.0f64;
    let mut n = 0;
    for p in points {
        let r = f(p)?;
        // NaN must not be swallowed by max().
        max = if r.is_nan() { f64::NAN } else { max.max(r) };
        n += 1;
    }
    Ok((max, n))
}

// ---- special ----

pub fn quadrature_moments(mu: f64, level: u32) -> Result<VerificationReport, Error> {
    let cases = (0..=5).flat_map(|k| [0.5, 1.0, 3.0].map(move |s| (k, s)));
    let (max, n) = worst(cases, |(k, s)| {
        let est = integrate_line_weighted(|q| Complex64::new(q.powi(2 * k) * (-s * q * q).exp(), 0.0), mu, level)?;
        let a = k as f64 + mu + 0.5;
        Ok(rel(est.value.re, gamma_euler(a)? / s.powf(a)))
    })?;
    Ok(VerificationReport::new("quadrature-gamma-moments", params(&[("mu", mu)]), n, max, 1e-10))
}

pub fn gamma_mu_factorial() -> Result<VerificationReport, Error> {
    let mut factorial = 1.0;
    let (max, n) = worst(0..=20u32, |k| {
        if k > 0 {
            factorial *= k as f64;
        }
        Ok(rel(gamma_mu(k, 0.0)?, factorial))
    })?;
    Ok(VerificationReport::new("gamma-mu-factorial", BTreeMap::new(), n, max, 1e-14))
}

pub fn gamma_euler_values() -> Result<VerificationReport, Error> {
    // Γ(n + 1/2) = (2n)! √π / (4^n n!)
    let (max, n) = worst(0..=15i32, |k| {
        let mut want = PI.sqrt();
        for j in 1..=k {
            want *= j as f64 - 0.5;
        }
        Ok(rel(gamma_euler(k as f64 + 0.5)?, want))
    })?;
    Ok(VerificationReport::new("gamma-euler", BTreeMap::new(), n, max, 1e-13))
}

pub fn bessel_closed_forms() -> Result<VerificationReport, Error> {
    let xs = linspace(0.05, 25.0, 40);
    let (max, n) = worst(xs, |x| {
        let k_half = (PI / (2.0 * x)).sqrt() * (-x).exp();
        let k_three_halves = k_half * (1.0 + 1.0 / x);
        let mut r = rel(bessel_k(0.5, x)?, k_half)
            .max(rel(bessel_k(-0.5, x)?, k_half))
            .max(rel(bessel_k(1.5, x)?, k_three_halves))
            .max(rel(bessel_k(-1.5, x)?, k_three_halves));
        for nu in [0.1, 0.75, 2.3] {
            r = r.max(rel(bessel_k(-nu, x)?, bessel_k(nu, x)?));
        }
        Ok(r)
    })?;
    Ok(VerificationReport::new("bessel-k-closed-forms", BTreeMap::new(), n, max, 1e-10))
}

pub fn mu0_heat_kernel() -> Result<VerificationReport, Error> {
    let mut max = 0.0f64;
    let mut n = 0;
    for t in [0.25, 1.0, 4.0] {
        let p = MuParam::new(0.0, t)?;
        for x in linspace(-2.0, 2.0, 6) {
            for q in linspace(-2.5, 2.5, 6) {
                let want = (2.0 * PI * t).powf(-0.5) * (-(x - q) * (x - q) / (2.0 * t)).exp();
                max = max.max(rel(rho_real(&p, x, q)?, want));
                n += 1;
            }
        }
    }
    Ok(VerificationReport::new("mu0-heat-kernel", BTreeMap::new(), n, max, 1e-12))
}

pub fn mu0_planar_density() -> Result<VerificationReport, Error> {
    let mut max = 0.0f64;
    let mut n = 0;
    for lambda in [0.25, 1.0, 4.0, 10.0] {
        for re in linspace(-2.0, 2.0, 5) {
            for im in linspace(-1.5, 1.5, 5) {
                let z = Complex64::new(re + 0.01, im);
                let want = lambda / PI * (-lambda * z.norm_sqr()).exp();
                max = max
                    .max(rel(density_even(0.0, lambda, z)?, want))
                    .max(rel(gauss_density(1.0 / lambda, z)?, want));
                n += 1;
            }
        }
    }
    Ok(VerificationReport::new("mu0-planar-density", BTreeMap::new(), n, max, 1e-12))
}

pub fn mu0_bargmann_kernel() -> Result<VerificationReport, Error> {
    let c = (2.0 * PI).powf(-0.25);
    let mut max = 0.0f64;
    let mut n = 0;
    for re in linspace(-2.0, 2.0, 5) {
        for im in linspace(-2.0, 2.0, 5) {
            let z = Complex64::new(re, im);
            for q in [-2.0, -0.5, 0.7, 1.9] {
                let want = c * (-z * z / 2.0 - q * q / 4.0 + q * z).exp();
                max = max.max(relative(kernel(Version::A, 0.0, 1.0, z, q)?, want));
                n += 1;
            }
        }
    }
    Ok(VerificationReport::new("mu0-bargmann-kernel", BTreeMap::new(), n, max, 1e-12))
}

/// `D_μ exp_μ(λ·)(x) = λ exp_μ(λx)` with the derivative from the termwise
/// series and the reflection term from `exp_μ` itself.
pub fn exp_mu_eigenfunction(mu: f64) -> Result<VerificationReport, Error> {
    let xs = linspace(-3.0, 3.0, 13).into_iter().map(|x| x + 0.05);
    let cases = xs.flat_map(|x| [-1.5, 0.7, 2.0].map(move |l| (x, l)));
    let (max, n) = worst(cases, |(x, lambda)| {
        let w = Complex64::new(lambda * x, 0.0);
        let (e, e_neg, e_prime) = (exp_mu(w, mu)?, exp_mu(-w, mu)?, exp_mu_prime(w, mu)?);
        let lhs = e_prime * lambda + (e - e_neg) * (mu / x);
        let rhs = e * lambda;
        let scale = (e_prime * lambda).norm() + ((e.norm() + e_neg.norm()) * mu / x).abs() + rhs.norm();
        Ok((lhs - rhs).norm() / scale)
    })?;
    Ok(VerificationReport::new("exp-mu-eigenfunction", params(&[("mu", mu)]), n, max, 1e-12))
}

pub fn exp_mu_imaginary_bound(mu: f64) -> Result<VerificationReport, Error> {
    let (max, n) = worst(linspace(-20.0, 20.0, 81), |x| Ok((exp_mu(Complex64::new(0.0, x), mu)?.norm() - 1.0).max(0.0)))?;
    Ok(VerificationReport::new("exp-mu-imaginary-bound", params(&[("mu", mu)]), n, max, 1e-12))
}

// ---- heat ----

pub fn heat_symmetry(mu: f64, t: f64) -> Result<VerificationReport, Error> {
    let p = MuParam::new(mu, t)?;
    let xs = linspace(-2.5, 2.5, 11);
    let cases = xs.iter().flat_map(|&x| xs.iter().map(move |&q| (x, q + 0.1)));
    let (max, n) = worst(cases, |(x, q)| {
        let a = rho_real(&p, x, q)?;
        Ok(rel(a, rho_real(&p, q, x)?).max(rel(a, rho_real(&p, -x, -q)?)))
    })?;
    Ok(VerificationReport::new("heat-symmetry", params(&[("mu", mu), ("t", t)]), n, max, 1e-14))
}

pub fn semigroup(mu: f64, t: f64, line: u32) -> Result<VerificationReport, Error> {
    let points = [(0.0, 0.0), (0.5, -0.2), (1.0, 1.3), (-0.8, 0.4)];
    let (max, n) = worst(points, |(x, y)| {
        let total = rho_real(&MuParam::new(mu, t)?, x, y)?;
        Ok(semigroup_defect(mu, 0.4 * t, 0.6 * t, x, y, line)? / total.abs().max(1.0))
    })?;
    Ok(VerificationReport::new("semigroup", params(&[("mu", mu), ("t", t)]), n, max, 1e-8))
}

fn heat_probes(mu: f64, t: f64) -> Result<Vec<PolyGauss>, Error> {
    let mut probes = polynomial_probes()?;
    probes.push(PolyGauss::from_real(&[1.0], 0.5)?);
    probes.push(sigma_polygauss(&MuParam::new(mu, t)?));
    probes.extend(hermite_probes(t, 6)?);
    Ok(probes)
}

fn polynomial_probes() -> Result<Vec<PolyGauss>, Error> {
    [&[1.0][..], &[0.0, 1.0], &[-1.0, 0.0, 1.0], &[0.3, 0.5, -0.2, 1.0, 0.0, 0.4]]
        .into_iter()
        .map(|c| PolyGauss::from_real(c, 0.0))
        .collect()
}

/// Heat solution as a kernel integral against `ρ(x,·)` and as the
/// μ-convolution with translates of `σ`. Polynomial probes are also run
/// through the commuted convolution `∫ |q|^{2μ} (T_q f)(x) σ(q) dq`, whose
/// translation series terminates and so shares no kernel evaluations with
/// the other two routes.
pub fn convolution_routes(mu: f64, t: f64, line: u32) -> Result<VerificationReport, Error> {
    let p = MuParam::new(mu, t)?;
    let s = sigma_polygauss(&p);
    let probes = heat_probes(mu, t)?;
    let cases = probes.iter().flat_map(|f| linspace(-2.0, 2.0, 9).into_iter().map(move |x| (f, x)));
    let (max, n) = worst(cases, |(f, x)| {
        let a = heat_solve(f, &p, x, line)?.value;
        let b = mu_convolve(ConvolutionKernel::Sigma { t }, f, mu, x, line)?.value;
        let scale = a.norm().max(1.0);
        let mut r = (a - b).norm() / scale;
        if f.rate() == 0.0 {
            let terms = f.coeffs().len() + 2;
            let c = mu_convolve(ConvolutionKernel::Poly { f, terms }, &s, mu, x, line)?.value;
            r = r.max((a - c).norm() / scale);
        }
        Ok(r)
    })?;
    Ok(VerificationReport::new("heat-routes", params(&[("mu", mu), ("t", t)]), n, max, 1e-10))
}

/// `T_x σ` from its truncated series against the closed form `ρ(x,·)`, t = 1.
pub fn translation_series(mu: f64) -> Result<VerificationReport, Error> {
    let p = MuParam::new(mu, 1.0)?;
    let s = sigma_polygauss(&p);
    let grid = linspace(-1.5, 1.5, 7);
    let mut max = 0.0f64;
    let mut n = 0;
    for &x in &grid {
        let shifted = s.mu_translate(x, mu, TRANSLATION_TERMS)?.function;
        for &q in &grid {
            max = max.max(rel(shifted.eval(q).re, rho_real(&p, x, q)?));
            n += 1;
        }
    }
    let mut ps = params(&[("mu", mu), ("t", 1.0)]);
    ps.insert("terms".into(), TRANSLATION_TERMS as f64);
    Ok(VerificationReport::new("translation-series", ps, n, max, 1e-8))
}

// ---- haar ----

pub fn measure_mass(mu: f64, t: f64, line: u32) -> Result<VerificationReport, Error> {
    let mass = rho_measure_mass(mu, t, line)?.value;
    Ok(VerificationReport::new(
        "rho-measure-mass",
        params(&[("mu", mu), ("t", t)]),
        1,
        (mass - 1.0).norm(),
        1e-10,
    ))
}

pub fn kernel_mass(mu: f64, t: f64, line: u32) -> Result<VerificationReport, Error> {
    let p = MuParam::new(mu, t)?;
    let (max, n) = worst(linspace(-2.0, 2.0, 9), |x| Ok((heat_mass(&p, x, line)?.value - 1.0).norm()))?;
    Ok(VerificationReport::new("heat-mass", params(&[("mu", mu), ("t", t)]), n, max, 1e-10))
}

// ---- pde ----

pub fn pde_points() -> Vec<(f64, f64)> {
    [-1.5, -0.9, -0.3, 0.4, 1.1]
        .into_iter()
        .flat_map(|x| [-1.0, -0.2, 0.5, 1.3].map(move |q| (x, q)))
        .collect()
}

/// Residual at step `h`, and the Richardson ratio `Σ r(h) / Σ r(h/2)`
/// whose distance from 4 is the second report's residual.
pub fn pde(mu: f64, t: f64) -> Result<Vec<VerificationReport>, Error> {
    let p = MuParam::new(mu, t)?;
    let mut max = 0.0f64;
    let (mut coarse, mut fine) = (0.0, 0.0);
    let points = pde_points();
    for &(x, q) in &points {
        let r = pde_residual(&p, x, q, PDE_STEP)?;
        max = max.max(r);
        coarse += r;
        fine += pde_residual(&p, x, q, 0.5 * PDE_STEP)?;
    }
    let ratio = coarse / fine;
    let mut ps = params(&[("mu", mu), ("t", t), ("h", PDE_STEP)]);
    ps.insert("richardson_ratio".into(), ratio);
    Ok(vec![
        VerificationReport::new("pde-residual", ps.clone(), points.len(), max, 1e-5),
        VerificationReport::new("pde-richardson", ps, points.len(), (ratio - 4.0).abs(), 0.5),
    ])
}

// ---- ccr ----

/// Twenty mixed-parity probes of degree up to 6 with rates in [0, 0.8].
pub fn ccr_probes() -> Vec<PolyGauss> {
    (0..20)
        .map(|j| {
            let degree = j % 7;
            let coeffs = (0..=degree)
                .map(|k| {
                    let phase = 1.3 * j as f64 + 0.7 * k as f64;
                    Complex64::new(phase.cos(), (0.5 * phase).sin())
                })
                .collect();
            PolyGauss::new(coeffs, 0.2 * (j % 5) as f64).expect("rates are nonnegative")
        })
        .collect()
}

pub fn ccr(mu: f64) -> Result<VerificationReport, Error> {
    let probes = ccr_probes();
    let (max, n) = worst(&probes, |f| Ok(f.commutator_defect(mu)?.max_coeff_norm()))?;
    Ok(VerificationReport::new("ccr-commutator", params(&[("mu", mu)]), n, max, 1e-12))
}

pub fn ladder(mu: f64) -> Result<VerificationReport, Error> {
    let probes = ccr_probes();
    let (max, n) = worst(&probes, |f| {
        let expect = f.clone() + f.parity() * (2.0 * mu);
        Ok((f.ladder_commutator(mu)? - expect).max_coeff_norm())
    })?;
    Ok(VerificationReport::new("ladder-commutator", params(&[("mu", mu)]), n, max, 1e-12))
}

/// `D_μ e_N − λ e_N = −λ^{N+1} x^N / γ_μ(N)` coefficientwise.
pub fn eigen_truncation(mu: f64) -> Result<VerificationReport, Error> {
    let cases = [5u32, 20, 60].into_iter().flat_map(|n| [-1.3, 0.8, 2.0].map(move |l| (n, l)));
    let (max, n) = worst(cases, |(order, lambda)| {
        let e = PolyGauss::truncated_exp_mu(lambda, mu, order)?;
        let residual = e.dunkl(mu)? - e * lambda;
        let expect = PolyGauss::monomial(order as usize, 0.0)? * (-lambda.powi(order as i32 + 1) / gamma_mu(order, mu)?);
        Ok((residual - expect).max_coeff_norm())
    })?;
    Ok(VerificationReport::new("eigen-truncation", params(&[("mu", mu)]), n, max, 1e-12))
}

// ---- ac-identity ----

pub fn z_grid() -> Vec<Complex64> {
    let axis = linspace(-2.0, 2.0, 5);
    axis.iter()
        .flat_map(|&im| axis.iter().map(move |&re| Complex64::new(re, im)))
        .collect()
}

pub fn ac_identity(mu: f64, t: f64) -> Result<VerificationReport, Error> {
    let qs = linspace(-3.0, 3.0, 10);
    let zs = z_grid();
    let cases = zs.iter().flat_map(|&z| qs.iter().map(move |&q| (z, q)));
    let (max, n) = worst(cases, |(z, q)| ac_identity_residual(mu, t, z, q))?;
    Ok(VerificationReport::new("ac-identity", params(&[("mu", mu), ("t", t)]), n, max, 1e-12))
}

pub fn kernel_coherence(mu: f64, t: f64) -> Result<VerificationReport, Error> {
    let p = MuParam::new(mu, t)?;
    let qs = linspace(-3.0, 3.0, 10);
    let zs = z_grid();
    let cases = zs.iter().flat_map(|&z| qs.iter().map(move |&q| (z, q)));
    let (max, n) = worst(cases, |(z, q)| {
        let a = kernel(Version::A, mu, t, z, q)?;
        let s = sigma(&p, q).sqrt();
        Ok(relative(kernel(Version::B, mu, t, z, q)? * s, a)
            .max(relative(kernel(Version::C, mu, t, z, q)?, a * s))
            .max(relative(kernel(Version::D, mu, t, z, q)?, a)))
    })?;
    Ok(VerificationReport::new("kernel-coherence", params(&[("mu", mu), ("t", t)]), n, max, 1e-13))
}

pub fn factorization(mu: f64, t: f64, line: u32) -> Result<VerificationReport, Error> {
    let probes = hermite_probes(t, 6)?;
    let zs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.7, 0.0),
        Complex64::new(-0.4, 0.9),
        Complex64::new(1.2, -0.6),
        Complex64::new(0.0, -1.5),
    ];
    let cases = probes.iter().flat_map(|f| zs.iter().map(move |&z| (f, z)));
    let (max, n) = worst(cases, |(f, z)| factorization_residual(mu, t, f, z, line))?;
    Ok(VerificationReport::new("factorization", params(&[("mu", mu), ("t", t)]), n, max, 1e-9))
}

// ---- unitarity ----

pub const UNITARITY_PROBES: usize = 6;

fn unitarity(task: Task, mu: f64, t: f64, levels: Levels) -> CellOutcome {
    let start = Instant::now();
    let mut outcome = CellOutcome {
        task,
        reports: Vec::new(),
        errors: Vec::new(),
    };
    let result = hermite_probes(t, UNITARITY_PROBES)
        .and_then(|probes| unitarity_checks(&Version::ALL, mu, t, &probes, levels.line, levels.plane));
    match result {
        Ok(outs) => {
            // The four versions share their kernel sums; the cell time is
            // split evenly between them.
            let each = start.elapsed() / outs.len() as u32;
            outcome.reports = outs.iter().map(|o| o.report().with_wall_time(each)).collect();
        }
        Err(e) => {
            for v in Version::ALL {
                let id = format!("unitarity-{}", v.name());
                outcome.fail(&id, params(&[("mu", mu), ("t", t)]), e.clone(), start);
            }
        }
    }
    outcome
}
