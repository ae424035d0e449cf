//! Two-sided inequality outcomes shared by the checkers and the CLI.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// `lhs ≥ rhs` evaluated numerically; `holds` is `slack ≥ -tol`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    pub context: BTreeMap<String, Value>,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            lhs,
            rhs,
            slack,
            holds: slack >= -tol,
            tol,
            context: BTreeMap::new(),
        }
    }

    /// Adds a diagnostic entry.
    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.to_string(), value.into());
        self
    }

    /// Re-evaluates the verdict with a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.holds = self.slack >= -tol;
        self
    }

    /// Slack divided by `|rhs|`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / self.rhs.abs()
    }
}
