//! Experiment configuration: a flat JSON document whose values command-line
//! flags override.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use tailcord::{ModelSpec, QuadratureConfig};

/// Evaluation grid: either the rescaled sample points of the simulation or
/// an explicit rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Named(String),
    Rect {
        v1_min: f64,
        v1_max: f64,
        v2_min: f64,
        v2_max: f64,
        steps: usize,
    },
}

impl GridSpec {
    pub fn is_sample_points(&self) -> bool {
        matches!(self, GridSpec::Named(s) if s == "sample-points")
    }

    /// Row-major rectangular grid, linear spacing along each axis.
    pub fn rect_points(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            GridSpec::Rect {
                v1_min,
                v1_max,
                v2_min,
                v2_max,
                steps,
            } => {
                let axis = |lo: f64, hi: f64| -> Vec<f64> {
                    if steps == 1 {
                        return vec![lo];
                    }
                    (0..steps)
                        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                        .collect()
                };
                let v2s = axis(v2_min, v2_max);
                Some(
                    axis(v1_min, v1_max)
                        .into_iter()
                        .flat_map(|a| v2s.iter().map(move |&b| (a, b)))
                        .collect(),
                )
            }
            GridSpec::Named(_) => None,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        match self {
            GridSpec::Named(s) if s == "sample-points" => Ok(()),
            GridSpec::Named(s) => bail!("unknown grid name {s:?} (expected \"sample-points\")"),
            GridSpec::Rect { steps, .. } if *steps == 0 => bail!("grid needs steps >= 1"),
            GridSpec::Rect { .. } => Ok(()),
        }
    }
}

/// Which theoretical surface `validate`/`ksweep` compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[clap(rename_all = "kebab-case")]
pub enum SurfaceChoice {
    /// The asymptotic joint law.
    Limit,
    /// The exact finite-sample law at the configured n.
    Oracle,
    /// The ecdf itself (self-test; all errors vanish).
    SelfTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub replicates: usize,
    pub k_list: Vec<usize>,
    pub seed: u64,
    pub grid: GridSpec,
    pub quad: QuadratureConfig,
    pub output_dir: PathBuf,
    pub surface: SurfaceChoice,
    // gaussian subcommand
    pub rho: f64,
    pub threshold_u: f64,
    pub y_grid: Vec<f64>,
    pub tail_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        // desk-scale defaults; the full protocol is n = 100000 with 5000
        // replicates and k = 10
        Self {
            model: ModelSpec::SurvivalClaytonPareto {
                theta: 2.0,
                nu: 1.0,
            },
            n: 10_000,
            replicates: 1_000,
            k_list: vec![10],
            seed: 42,
            grid: GridSpec::Named("sample-points".into()),
            quad: QuadratureConfig::default(),
            output_dir: PathBuf::from("."),
            surface: SurfaceChoice::Limit,
            rho: 0.5,
            threshold_u: 20.0,
            y_grid: vec![2.0],
            tail_samples: 1_000_000,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.model
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        if self.replicates == 0 {
            bail!("replicates must be >= 1");
        }
        if self.k_list.is_empty() {
            bail!("k_list must not be empty");
        }
        for &k in &self.k_list {
            if k < 1 || k + 1 > self.n {
                bail!("k = {k} outside [1, n-1] for n = {}", self.n);
            }
        }
        self.grid.validate()?;
        self.quad
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        Ok(())
    }
}
