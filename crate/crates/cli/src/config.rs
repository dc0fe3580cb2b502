//! Scenario documents: a physical configuration, an initial state, a time
//! grid, and output controls, loaded from JSON with unknown keys rejected.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qbm_core::evolution::InitialState;
use qbm_core::PhysicalConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points;
        match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.t_start + (self.t_end - self.t_start) * i as f64 / (n - 1) as f64)
                .collect(),
            Spacing::Log => {
                let (a, b) = (self.t_start.ln(), self.t_end.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }

    fn validate(&self) -> anyhow::Result<()> {
        if !(self.t_start >= 0.0) {
            bail!("grid.t_start must be non-negative, got {}", self.t_start);
        }
        if !(self.t_end > self.t_start) {
            bail!(
                "grid.t_end must exceed t_start, got {} <= {}",
                self.t_end,
                self.t_start
            );
        }
        if self.n_points < 2 {
            bail!("grid.n_points must be at least 2, got {}", self.n_points);
        }
        if self.spacing == Spacing::Log && self.t_start <= 0.0 {
            bail!("log spacing requires t_start > 0");
        }
        Ok(())
    }
}

/// Optional per-subcommand knobs; all have defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// times at which `cat` writes position-density slices
    pub density_slices: Vec<f64>,
    /// number of x samples in density slices
    pub x_points: usize,
    /// cutoff list for the `divergence` subcommand
    pub cutoffs: Vec<f64>,
    /// probe time for the `divergence` subcommand
    pub probe_time: Option<f64>,
    /// Monte Carlo controls for `validate`
    pub mc_samples: usize,
    pub mc_modes: usize,
    pub mc_cutoff: f64,
    /// grid side for the `validate` pde suite (mass drift scales as the inverse square)
    pub pde_points: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            density_slices: Vec::new(),
            x_points: 201,
            cutoffs: Vec::new(),
            probe_time: None,
            mc_samples: 20_000,
            mc_modes: 400,
            mc_cutoff: 300.0,
            pde_points: 192,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub physical: PhysicalConfig,
    pub state: InitialState,
    pub grid: TimeGrid,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioSpec {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario config {}", path.display()))?;
        let spec: ScenarioSpec = serde_json::from_str(&text)
            .with_context(|| format!("parsing scenario config {}", path.display()))?;
        spec.grid.validate()?;
        spec.state.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(spec)
    }
}
