use serde::{Deserialize, Serialize};

/// One named check inside a [`VerificationReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst residual observed for this check, when numeric.
    pub residual: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, residual: Option<f64>, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            residual,
            detail: detail.into(),
        }
    }
}

/// Outcome of a structural verification. Failures are report content, not
/// errors: callers inspect `passed` and the individual checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn from_checks(checks: Vec<Check>) -> Self {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
