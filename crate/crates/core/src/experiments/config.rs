use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON-backed experiment parameters. Grids left out fall back to defaults
/// suited to each experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Directory receiving the CSV and JSON outputs.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Profile abscissae.
    #[serde(default)]
    pub x_grid: Option<Vec<f64>>,
    /// Tail thresholds.
    #[serde(default)]
    pub y_grid: Option<Vec<f64>>,
    /// Normalized contour times for the finite-dimensional checks.
    #[serde(default)]
    pub tau: Option<Vec<f64>>,
    /// Histogram bins per axis for the finite-dimensional checks.
    #[serde(default)]
    pub bins: Option<usize>,
    /// Window `[lo, hi]` of scaled heights used by the histogram.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    /// Also write one profile row per sample.
    #[serde(default)]
    pub per_sample: bool,
}

fn default_jobs() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(sizes: Vec<usize>, samples: usize, seed: u64) -> Self {
        Self {
            sizes,
            samples,
            seed,
            output: None,
            jobs: 1,
            x_grid: None,
            y_grid: None,
            tau: None,
            bins: None,
            window: None,
            per_sample: false,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Config("`sizes` is empty".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("`samples` must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("`jobs` must be positive".into()));
        }
        if let Some(tau) = &self.tau {
            if tau.is_empty() || tau.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
                return Err(Error::Config("`tau` values must lie in (0, 1)".into()));
            }
            if tau.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("`tau` must be strictly increasing".into()));
            }
        }
        if let Some([lo, hi]) = self.window {
            if !(lo < hi) {
                return Err(Error::Config("`window` must satisfy lo < hi".into()));
            }
        }
        if self.bins == Some(0) {
            return Err(Error::Config("`bins` must be positive".into()));
        }
        Ok(())
    }

    pub fn x_grid(&self) -> Vec<f64> {
        self.x_grid
            .clone()
            .unwrap_or_else(|| (0..=80).map(|i| i as f64 * 0.05).collect())
    }

    pub fn y_grid(&self) -> Vec<f64> {
        self.y_grid
            .clone()
            .unwrap_or_else(|| (0..=20).map(|i| i as f64 * 0.25).collect())
    }

    pub fn tau(&self) -> Vec<f64> {
        self.tau.clone().unwrap_or_else(|| vec![0.5])
    }

    pub fn bins(&self) -> usize {
        self.bins.unwrap_or(30)
    }

    pub fn window(&self) -> [f64; 2] {
        self.window.unwrap_or([0.1, 2.4])
    }

    /// The configuration with the fields that cannot change results cleared,
    /// used to derive run ids.
    pub(crate) fn result_relevant(&self) -> Self {
        Self {
            output: None,
            jobs: 1,
            ..self.clone()
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` at size `n`.
pub fn sample_seed(master: u64, n: usize, index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ n as u64) ^ index as u64)
}

pub fn sample_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
