//! JSON and CSV rendering of verification results.

use std::io::Write;

use clap::ValueEnum;
use musb_core::VerificationReport;
use serde::Serialize;

use crate::suites::{CellError, CellOutcome};
use crate::{CliError, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl Summary {
    pub fn of(outcomes: &[CellOutcome]) -> Self {
        let reports = outcomes.iter().flat_map(|o| &o.reports);
        let total = reports.clone().count();
        let passed = reports.filter(|r| r.passed).count();
        Summary {
            total,
            passed,
            failed: total - passed,
            errors: outcomes.iter().map(|o| o.errors.len()).sum(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} reports: {} passed, {} failed, {} errors",
            self.total, self.passed, self.failed, self.errors
        )
    }
}

/// Exit status: non-convergence outranks plain failure.
pub fn status(outcomes: &[CellOutcome]) -> Status {
    let errors = outcomes.iter().flat_map(|o| &o.errors);
    if errors.clone().any(|e| e.non_convergence) {
        Status::NonConvergence
    } else if outcomes.iter().flat_map(|o| &o.reports).all(|r| r.passed) {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Serialize)]
struct Document<'a> {
    suite: &'a str,
    reports: Vec<&'a VerificationReport>,
    errors: Vec<&'a CellError>,
    summary: Summary,
}

pub fn write_json(w: &mut impl Write, suite: &str, outcomes: &[CellOutcome]) -> Result<(), CliError> {
    let doc = Document {
        suite,
        reports: outcomes.iter().flat_map(|o| &o.reports).collect(),
        errors: outcomes.iter().flat_map(|o| &o.errors).collect(),
        summary: Summary::of(outcomes),
    };
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// One row per report; parameters are flattened as `name=value` pairs
/// joined by `;`.
pub fn write_csv(w: &mut impl Write, outcomes: &[CellOutcome]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "identity_id",
        "params",
        "grid_size",
        "max_residual",
        "tolerance",
        "passed",
        "wall_time_s",
    ])
    .map_err(csv_error)?;
    for r in outcomes.iter().flat_map(|o| &o.reports) {
        let params = r
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        out.write_record([
            r.identity_id.clone(),
            params,
            r.grid_size.to_string(),
            format!("{:e}", r.max_residual),
            format!("{:e}", r.tolerance),
            r.passed.to_string(),
            format!("{:.6}", r.wall_time.as_secs_f64()),
        ])
        .map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
