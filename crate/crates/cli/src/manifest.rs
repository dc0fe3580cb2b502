//! Reproducibility record written next to every run's outputs.

use serde::Serialize;

use crate::config::ScenarioSpec;

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: String,
    pub version: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a ScenarioSpec>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl<'a> RunManifest<'a> {
    pub fn new(
        subcommand: &str,
        seed: u64,
        config: Option<&'a ScenarioSpec>,
        outputs: Vec<String>,
        duration_seconds: f64,
    ) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            outputs,
            duration_seconds,
        }
    }
}
