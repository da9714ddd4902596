//! Machine-readable results of identity-verification runs.

use serde::{Deserialize, Serialize};

/// Outcome of checking one identity over a sample set. Serializes to a
/// single JSON object; the check command emits one per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    /// Short machine name of the identity, e.g. `leibniz_wedge`.
    pub identity: String,
    /// The mathematical statement being verified.
    pub law: String,
    /// Number of sample points (or random trials) used.
    pub points: usize,
    /// Seed of the sampling RNG; identical seeds reproduce the report.
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Coordinates of the sample with the largest residual.
    pub worst_point: Option<Vec<f64>>,
    /// True iff `max_residual <= tolerance`.
    pub pass: bool,
}

impl CheckReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Running maximum of residuals with the point that produced it.
#[derive(Debug, Clone, Default)]
pub struct ResidualTracker {
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub samples: usize,
}

impl ResidualTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, residual: f64, point: &[f64]) {
        self.samples += 1;
        if residual > self.max_residual || self.worst_point.is_none() {
            self.max_residual = residual;
            self.worst_point = Some(point.to_vec());
        }
    }

    /// Record a residual with no associated coordinate point (random-trial
    /// identities).
    pub fn record_unlocated(&mut self, residual: f64) {
        self.samples += 1;
        if residual > self.max_residual {
            self.max_residual = residual;
        }
    }

    pub fn into_report(
        self,
        identity: impl Into<String>,
        law: impl Into<String>,
        seed: u64,
        tolerance: f64,
    ) -> CheckReport {
        CheckReport {
            identity: identity.into(),
            law: law.into(),
            points: self.samples,
            seed,
            tolerance,
            max_residual: self.max_residual,
            worst_point: self.worst_point,
            pass: self.max_residual <= tolerance,
        }
    }
}
