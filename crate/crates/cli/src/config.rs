use std::path::PathBuf;

use anyhow::{bail, Result};
use bayes_exec_core::{Mode, Quadrature};

pub const DEFAULT_GRID_POINTS: usize = 201;

/// Settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_points: usize,
    pub eval_kappas: Vec<f64>,
    pub mode: Mode,
    pub normalized: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub quadrature: Quadrature,
    /// Deviation-test trials per firm type recorded by `solve`; 0 skips it.
    pub verify_trials: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_points: DEFAULT_GRID_POINTS,
            eval_kappas: vec![1.0],
            mode: Mode::NormalForm,
            normalized: false,
            output_dir: PathBuf::from("."),
            seed: 0,
            quadrature: Quadrature::default(),
            verify_trials: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            bail!("grid points must be at least 2, got {}", self.grid_points);
        }
        if self.eval_kappas.is_empty() {
            bail!("at least one evaluation kappa is required");
        }
        if let Some(k) = self.eval_kappas.iter().find(|k| !k.is_finite()) {
            bail!("evaluation kappa must be finite, got {k}");
        }
        Ok(())
    }
}
