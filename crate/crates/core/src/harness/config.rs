//! Experiment manifests.
//!
//! ```toml
//! dim = 4096
//! n = 100
//! label_count = 100
//! trials = 10000
//! master_seed = 7
//! noise = ["key-hamming:204", "mem-flip:0.01"]
//!
//! [decoder]
//! mode = "auto"
//! eps = 0.01
//!
//! [baseline]
//! p = 0.9
//! ell = 10
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HbfError, Result};
use crate::index::DecoderConfig;
use crate::noise::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DecoderChoice {
    /// Calibrate `(τ, Δ)` from probes at target false-positive rate `eps`.
    Auto { eps: f64 },
    Fixed {
        tau: f64,
        delta: f64,
        #[serde(default = "default_top_k")]
        top_k: usize,
    },
}

fn default_top_k() -> usize {
    DecoderConfig::DEFAULT_TOP_K
}

impl Default for DecoderChoice {
    fn default() -> Self {
        DecoderChoice::Auto { eps: 0.01 }
    }
}

/// How the memory gain is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainChoice {
    Fixed(f64),
    /// `"normalized"`: `ρ = 1/√n`.
    Named(GainName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainName {
    Normalized,
}

impl GainChoice {
    pub fn resolve(&self, n: usize) -> f64 {
        match *self {
            GainChoice::Fixed(g) => g,
            GainChoice::Named(GainName::Normalized) => crate::index::normalized_gain(n),
        }
    }
}

impl std::str::FromStr for GainChoice {
    type Err = HbfError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("normalized") {
            return Ok(GainChoice::Named(GainName::Normalized));
        }
        s.parse::<f64>()
            .map(GainChoice::Fixed)
            .map_err(|_| HbfError::invalid(format!("gain must be a number or \"normalized\", got {s:?}")))
    }
}

impl Default for GainChoice {
    fn default() -> Self {
        GainChoice::Fixed(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub p: f64,
    pub ell: u32,
    #[serde(rename = "T", alias = "hop_time")]
    pub hop_time: f64,
    pub trials: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            p: 0.9,
            ell: 10,
            hop_time: 1.0,
            trials: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(alias = "d")]
    pub dim: usize,
    pub n: usize,
    pub label_count: usize,
    #[serde(alias = "gain")]
    pub rho: GainChoice,
    pub noise: Vec<NoiseSpec>,
    pub decoder: DecoderChoice,
    pub trials: u64,
    pub master_seed: u64,
    pub probe_count: usize,
    pub output: Option<PathBuf>,
    /// Ascending `n` values for the capacity sweep.
    pub n_grid: Vec<usize>,
    /// Number of independent memories for amplified decoding.
    pub replicas: usize,
    /// Emit a wall-clock column; off by default so CSVs stay byte-stable.
    pub timing: bool,
    pub baseline: BaselineConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 4096,
            n: 100,
            label_count: 100,
            rho: GainChoice::default(),
            noise: Vec::new(),
            decoder: DecoderChoice::default(),
            trials: 1000,
            master_seed: 1,
            probe_count: 500,
            output: None,
            n_grid: vec![10, 100, 1000],
            replicas: 3,
            timing: false,
            baseline: BaselineConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HbfError::Format(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| HbfError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| HbfError::Format(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(HbfError::invalid("dim must be at least 2"));
        }
        if self.trials == 0 {
            return Err(HbfError::invalid("trials must be at least 1"));
        }
        if self.label_count < 2 {
            return Err(HbfError::invalid("label_count must be at least 2"));
        }
        let gain = self.rho.resolve(self.n);
        if !(gain.is_finite() && gain > 0.0) {
            return Err(HbfError::invalid(format!("gain must be positive, got {gain}")));
        }
        for n in &self.noise {
            n.validate()?;
            if let NoiseSpec::KeyHamming(h) = n {
                if *h > self.dim {
                    return Err(HbfError::invalid(format!(
                        "Hamming distance {h} exceeds dimension {}",
                        self.dim
                    )));
                }
            }
        }
        match self.decoder {
            DecoderChoice::Auto { eps } => {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(HbfError::invalid(format!("eps must lie in (0, 1), got {eps}")));
                }
            }
            DecoderChoice::Fixed { tau, delta, top_k } => {
                DecoderConfig::new(tau, delta, top_k)?;
            }
        }
        if self.replicas == 0 {
            return Err(HbfError::invalid("replicas must be at least 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HbfError::invalid("n_grid must be strictly ascending"));
        }
        Ok(())
    }

    pub fn memory_noise(&self) -> impl Iterator<Item = &NoiseSpec> {
        self.noise.iter().filter(|n| n.acts_on_memory())
    }

    pub fn key_noise(&self) -> impl Iterator<Item = &NoiseSpec> {
        self.noise.iter().filter(|n| !n.acts_on_memory())
    }

    pub fn noise_label(&self) -> String {
        self.noise
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("+")
    }
}
