use std::collections::BTreeMap;

use serde_json::Value;

use crate::qstate::DensityOperator;

/// Output of one theory on one input: `ρ_f` plus whatever that theory can report.
#[derive(Debug, Clone)]
pub struct TheoryOutcome {
    pub rho_f: DensityOperator,
    /// The time-travelling state, for theories that select one.
    pub tau: Option<DensityOperator>,
    /// Pre-normalization trace of the unnormalized output.
    pub normalizer: Option<f64>,
    pub entropy_tau: Option<f64>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl TheoryOutcome {
    pub fn new(rho_f: DensityOperator) -> Self {
        Self {
            rho_f,
            tau: None,
            normalizer: None,
            entropy_tau: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn note(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }
}
