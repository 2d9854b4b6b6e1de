use alloc::collections::BTreeMap;
use alloc::string::String;
use core::time::Duration;

/// Outcome of checking one identity on one parameter cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub identity_id: String,
    pub params: BTreeMap<String, f64>,
    pub grid_size: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Filled in by callers that have a clock; zero otherwise.
    pub wall_time: Duration,
}

impl VerificationReport {
    /// A residual that is NaN or infinite always fails.
    pub fn new(
        identity_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        grid_size: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> Self {
        let passed = max_residual.is_finite() && max_residual >= 0.0 && max_residual <= tolerance;
        VerificationReport {
            identity_id: identity_id.into(),
            params,
            grid_size,
            max_residual,
            tolerance,
            passed,
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_wall_time(mut self, wall_time: Duration) -> Self {
        self.wall_time = wall_time;
        self
    }
}
