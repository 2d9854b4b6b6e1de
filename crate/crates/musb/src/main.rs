use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use musb::grid::{parse_complex, parse_complex_grid, parse_grid};
use musb::output::{self, Format, Summary};
use musb::probes::resolve;
use musb::suites::{self, Config, Suite, DEFAULT_MU_GRID, DEFAULT_T_GRID};
use musb::{CliError, Levels, Status};
use musb_core::heat::{heat_solve, mu_convolve, ConvolutionKernel};
use musb_core::transforms::{apply, kernel, Version};
use musb_core::{Complex64, MuParam};

#[derive(Parser)]
#[command(name = "musb", version)]
#[command(about = "mu-deformed Segal-Bargmann transforms, heat kernels and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a transform kernel V(z, q)
    Kernel {
        #[arg(long, value_enum, ignore_case = true)]
        version: VersionArg,
        #[arg(long, value_parser = parse_mu, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_parser = parse_t)]
        t: f64,
        /// Complex point, e.g. 0.5-1.2i
        #[arg(long, default_value = "0", value_parser = parse_complex_arg, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "grid")]
        q: Option<f64>,
        /// q values as start:stop:count or a comma list, instead of --q
        #[arg(long, allow_hyphen_values = true, conflicts_with = "q")]
        grid: Option<String>,
    },
    /// Run identity suites and emit one report per identity and cell
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// start:stop:count or comma list [default: -0.4,-0.1,0,0.5,1,3]
        #[arg(long, allow_hyphen_values = true)]
        mu_grid: Option<String>,
        /// start:stop:count or comma list [default: 0.25,1,4]
        #[arg(long, allow_hyphen_values = true)]
        t_grid: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
        /// Worker threads [default: available parallelism]
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Solve the mu-heat equation for a probe initial condition; CSV output
    Heat {
        #[arg(long, value_parser = parse_mu, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_parser = parse_t)]
        t: f64,
        /// Builtin probe name or path to a JSON probe spec
        #[arg(long)]
        probe: String,
        #[arg(long, default_value = "-2:2:9", allow_hyphen_values = true)]
        x_grid: String,
    },
    /// Apply a transform version to a probe on a rectangular complex grid
    Transform {
        #[arg(long, value_enum, ignore_case = true)]
        version: VersionArg,
        #[arg(long, value_parser = parse_mu, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_parser = parse_t)]
        t: f64,
        #[arg(long)]
        probe: String,
        /// re0:re1:n,im0:im1:m
        #[arg(long, allow_hyphen_values = true)]
        z_grid: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VersionArg {
    A,
    B,
    C,
    D,
}

impl From<VersionArg> for Version {
    fn from(v: VersionArg) -> Self {
        match v {
            VersionArg::A => Version::A,
            VersionArg::B => Version::B,
            VersionArg::C => Version::C,
            VersionArg::D => Version::D,
        }
    }
}

fn parse_mu(s: &str) -> Result<f64, String> {
    let mu = musb::grid::parse_real(s).map_err(|e| e.to_string())?;
    if mu > -0.5 {
        Ok(mu)
    } else {
        Err(format!("mu must satisfy mu > -1/2, got {mu}"))
    }
}

fn parse_t(s: &str) -> Result<f64, String> {
    let t = musb::grid::parse_real(s).map_err(|e| e.to_string())?;
    if t > 0.0 {
        Ok(t)
    } else {
        Err(format!("t must satisfy t > 0, got {t}"))
    }
}

fn parse_complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct KernelRecord {
    version: &'static str,
    mu: f64,
    t: f64,
    z: [f64; 2],
    q: f64,
    value: [f64; 2],
}

#[derive(Serialize)]
struct TransformRecord {
    version: &'static str,
    probe: String,
    mu: f64,
    t: f64,
    z: [f64; 2],
    value: [f64; 2],
    residual: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("musb: {e}");
            e.status().into()
        }
    }
}

fn run(command: Command) -> Result<Status, CliError> {
    let levels = Levels::from_env()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Kernel {
            version,
            mu,
            t,
            z,
            q,
            grid,
        } => {
            let version = Version::from(version);
            let qs = match (q, grid) {
                (_, Some(g)) => parse_grid(&g)?,
                (Some(q), None) => vec![q],
                (None, None) => unreachable!("clap requires --q or --grid"),
            };
            if qs.is_empty() {
                return Err(CliError::usage("empty q grid"));
            }
            let records = qs
                .into_iter()
                .map(|q| {
                    Ok(KernelRecord {
                        version: version.name(),
                        mu,
                        t,
                        z: pair(z),
                        q,
                        value: pair(kernel(version, mu, t, z, q).map_err(CliError::from_core)?),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            serde_json::to_writer_pretty(&mut out, &records).map_err(io::Error::from)?;
            writeln!(out)?;
            Ok(Status::Pass)
        }
        Command::Verify {
            suite,
            mu_grid,
            t_grid,
            out: format,
            jobs,
        } => {
            let mu_grid = match mu_grid {
                Some(g) => parse_grid(&g)?,
                None => DEFAULT_MU_GRID.to_vec(),
            };
            let t_grid = match t_grid {
                Some(g) => parse_grid(&g)?,
                None => DEFAULT_T_GRID.to_vec(),
            };
            let cfg = Config::new(mu_grid, t_grid, levels)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(CliError::usage("--jobs must be at least 1"));
            }
            let tasks = suites::tasks(suite, &cfg);
            let outcomes = suites::run(&tasks, &cfg, jobs)?;
            let name = suite.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string());
            match format {
                Format::Json => output::write_json(&mut out, &name, &outcomes)?,
                Format::Csv => output::write_csv(&mut out, &outcomes)?,
            }
            out.flush()?;
            for e in outcomes.iter().flat_map(|o| &o.errors) {
                eprintln!("musb: {} [{}]: {}", e.identity_id, e.cell, e.message);
            }
            eprintln!("{}", Summary::of(&outcomes).line());
            Ok(output::status(&outcomes))
        }
        Command::Heat { mu, t, probe, x_grid } => {
            let f = resolve(&probe, mu, t)?.to_polygauss()?;
            let xs = parse_grid(&x_grid)?;
            if xs.is_empty() {
                return Err(CliError::usage("empty x grid"));
            }
            let p = MuParam::new(mu, t).map_err(CliError::from_core)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["x", "re", "im", "residual"]).map_err(csv_error)?;
            for x in xs {
                let kernel_route = heat_solve(&f, &p, x, levels.line).map_err(CliError::from_core)?.value;
                let convolution = mu_convolve(ConvolutionKernel::Sigma { t }, &f, mu, x, levels.line)
                    .map_err(CliError::from_core)?
                    .value;
                w.write_record([
                    x.to_string(),
                    kernel_route.re.to_string(),
                    kernel_route.im.to_string(),
                    format!("{:e}", (kernel_route - convolution).norm()),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(Status::Pass)
        }
        Command::Transform {
            version,
            mu,
            t,
            probe,
            z_grid,
        } => {
            let version = Version::from(version);
            let spec = resolve(&probe, mu, t)?;
            let f = spec.to_polygauss()?;
            let zs = parse_complex_grid(&z_grid)?;
            let records = zs
                .into_iter()
                .map(|z| {
                    let est = apply(version, &f, mu, t, z, levels.line).map_err(CliError::from_core)?;
                    Ok(TransformRecord {
                        version: version.name(),
                        probe: spec.name.clone(),
                        mu,
                        t,
                        z: pair(z),
                        value: pair(est.value),
                        residual: est.residual,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            serde_json::to_writer_pretty(&mut out, &records).map_err(io::Error::from)?;
            writeln!(out)?;
            Ok(Status::Pass)
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}
