//! Comparison records emitted by the validation suites.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub scenario: String,
    pub metrics: Vec<Metric>,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        OracleReport {
            scenario: scenario.into(),
            metrics: Vec::new(),
            passed: true,
        }
    }

    /// Record `value` against `target` with an absolute tolerance.
    pub fn check(&mut self, name: impl Into<String>, value: f64, target: f64, tolerance: f64) {
        let pass = value.is_finite() && (value - target).abs() <= tolerance;
        self.passed &= pass;
        self.metrics.push(Metric {
            name: name.into(),
            value,
            target,
            tolerance,
            pass,
        });
    }

    /// Record a relative comparison.
    pub fn check_rel(
        &mut self,
        name: impl Into<String>,
        value: f64,
        target: f64,
        rel_tolerance: f64,
    ) {
        self.check(name, value, target, rel_tolerance * target.abs());
    }

    /// Record a bound: pass when `value <= bound`.
    pub fn check_below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        let pass = value.is_finite() && value <= bound;
        self.passed &= pass;
        self.metrics.push(Metric {
            name: name.into(),
            value,
            target: bound,
            tolerance: 0.0,
            pass,
        });
    }
}
