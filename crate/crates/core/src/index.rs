//! The superposed key/value memory and its margin decoder.

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::error::{label_text, HbfError, Result};
use crate::hypervector::{convolve, correlate, dot, HyperVector};

/// One key/value pair to be stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Record {
    pub key: Vec<u8>,
    pub value: Vec<u8>,
}

impl Record {
    pub fn new(key: impl Into<Vec<u8>>, value: impl Into<Vec<u8>>) -> Self {
        Self {
            key: key.into(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub dim: usize,
    pub gain: f64,
    pub key_seed: u64,
    pub value_seed: u64,
}

impl BuildConfig {
    pub fn new(dim: usize, gain: f64, key_seed: u64, value_seed: u64) -> Self {
        Self {
            dim,
            gain,
            key_seed,
            value_seed,
        }
    }
}

/// Gain `1/√n` that keeps the per-coordinate energy of the memory flat in `n`.
pub fn normalized_gain(n: usize) -> f64 {
    1.0 / (n.max(1) as f64).sqrt()
}

/// The memory `M = Σ ρ (k_x * v_y)` together with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HbfMemory {
    vector: HyperVector,
    gain: f64,
    item_count: u64,
    key_seed: u64,
    value_seed: u64,
}

impl HbfMemory {
    pub fn empty(cfg: &BuildConfig) -> Result<Self> {
        validate_build(cfg)?;
        Ok(Self {
            vector: HyperVector::zeros(cfg.dim),
            gain: cfg.gain,
            item_count: 0,
            key_seed: cfg.key_seed,
            value_seed: cfg.value_seed,
        })
    }

    /// Reassembles a memory from stored parts, e.g. after deserialization.
    pub fn from_parts(
        vector: HyperVector,
        gain: f64,
        item_count: u64,
        key_seed: u64,
        value_seed: u64,
    ) -> Result<Self> {
        if vector.dim() < 2 {
            return Err(HbfError::invalid("memory dimension must be at least 2"));
        }
        if !(gain.is_finite() && gain > 0.0) {
            return Err(HbfError::invalid(format!("gain must be positive, got {gain}")));
        }
        Ok(Self {
            vector,
            gain,
            item_count,
            key_seed,
            value_seed,
        })
    }

    pub fn vector(&self) -> &HyperVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn item_count(&self) -> u64 {
        self.item_count
    }

    pub fn key_seed(&self) -> u64 {
        self.key_seed
    }

    pub fn value_seed(&self) -> u64 {
        self.value_seed
    }

    pub fn key_codebook(&self) -> Codebook {
        Codebook::keys(self.key_seed, self.dim()).expect("memory dim >= 2")
    }

    pub fn value_codebook(&self) -> Codebook {
        Codebook::values(self.value_seed, self.dim()).expect("memory dim >= 2")
    }

    pub(crate) fn with_vector(&self, vector: HyperVector) -> Self {
        debug_assert_eq!(vector.dim(), self.dim());
        Self {
            vector,
            ..self.clone()
        }
    }

    /// Superposes `ρ (k_key * v_value)` into the memory.
    pub fn insert(&mut self, key: &[u8], value: &[u8]) -> Result<()> {
        let bound = bind(&self.key_codebook(), &self.value_codebook(), key, value)?;
        self.vector.add_scaled(&bound, self.gain)?;
        self.item_count += 1;
        Ok(())
    }

    /// Rescales the memory to a new gain. Scores scale by `new_gain / gain`,
    /// so label rankings are unchanged.
    pub fn renormalize(&self, new_gain: f64) -> Result<Self> {
        if !(new_gain.is_finite() && new_gain > 0.0) {
            return Err(HbfError::invalid(format!(
                "gain must be positive, got {new_gain}"
            )));
        }
        if self.item_count == 0 {
            return Err(HbfError::EmptyMemory);
        }
        let ratio = new_gain / self.gain;
        Ok(Self {
            vector: self.vector.scaled(ratio),
            gain: new_gain,
            ..self.clone()
        })
    }

    /// `z = k ⊛ M` for the codebook vector of `key`.
    pub fn correlate_query(&self, key: &[u8]) -> Result<HyperVector> {
        let k = self.key_codebook().vector(key)?;
        self.correlate_vector(k.as_vector())
    }

    /// `z = k ⊛ M` for an explicit (possibly perturbed) key vector.
    pub fn correlate_vector(&self, key_vector: &HyperVector) -> Result<HyperVector> {
        correlate(key_vector, &self.vector)
    }
}

fn validate_build(cfg: &BuildConfig) -> Result<()> {
    if cfg.dim < 2 {
        return Err(HbfError::invalid(format!(
            "dimension must be at least 2, got {}",
            cfg.dim
        )));
    }
    if !(cfg.gain.is_finite() && cfg.gain > 0.0) {
        return Err(HbfError::invalid(format!(
            "gain must be positive, got {}",
            cfg.gain
        )));
    }
    Ok(())
}

fn bind(keys: &Codebook, values: &Codebook, key: &[u8], value: &[u8]) -> Result<HyperVector> {
    if value.is_empty() {
        return Err(HbfError::invalid("value must be non-empty"));
    }
    let k = keys.vector(key)?;
    let v = values.vector(value)?;
    convolve(k.as_vector(), v.as_vector())
}

const BUILD_CHUNK: usize = 256;

/// Batch construction. Contributions are summed in ascending key order, so
/// the result is bit-identical for any permutation of `records`.
pub fn build(records: &[Record], cfg: &BuildConfig) -> Result<HbfMemory> {
    let mut mem = HbfMemory::empty(cfg)?;
    let mut sorted: Vec<&Record> = records.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    if let Some(w) = sorted.windows(2).find(|w| w[0].key == w[1].key) {
        return Err(HbfError::DuplicateKey(label_text(&w[0].key)));
    }

    let (keys, values) = (mem.key_codebook(), mem.value_codebook());
    for chunk in sorted.chunks(BUILD_CHUNK) {
        let bound: Vec<HyperVector> = chunk
            .par_iter()
            .map(|r| bind(&keys, &values, &r.key, &r.value))
            .collect::<Result<_>>()?;
        for b in &bound {
            mem.vector.add_scaled(b, cfg.gain)?;
        }
    }
    mem.item_count = records.len() as u64;
    Ok(mem)
}

/// A label universe with its value vectors materialized once.
#[derive(Debug, Clone)]
pub struct LabelSet {
    labels: Vec<Vec<u8>>,
    vectors: Vec<f64>,
    dim: usize,
    value_seed: u64,
}

impl LabelSet {
    pub fn new(labels: Vec<Vec<u8>>, value_seed: u64, dim: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(HbfError::invalid("label set must be non-empty"));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_slice()) {
                return Err(HbfError::DuplicateLabel(label_text(l)));
            }
        }
        let cb = Codebook::values(value_seed, dim)?;
        let rows: Vec<Vec<f64>> = labels
            .par_iter()
            .map(|l| cb.vector(l).map(|v| v.into_vector().into_vec()))
            .collect::<Result<_>>()?;
        Ok(Self {
            labels,
            vectors: rows.concat(),
            dim,
            value_seed,
        })
    }

    /// The label universe a memory decodes against.
    pub fn for_memory(mem: &HbfMemory, labels: Vec<Vec<u8>>) -> Result<Self> {
        Self::new(labels, mem.value_seed(), mem.dim())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value_seed(&self) -> u64 {
        self.value_seed
    }

    pub fn labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    pub fn position(&self, label: &[u8]) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    /// Unsorted `⟨z, v_w⟩` in label order.
    pub fn raw_scores(&self, z: &HyperVector) -> Result<Vec<f64>> {
        if z.dim() != self.dim {
            return Err(HbfError::DimensionMismatch {
                left: z.dim(),
                right: self.dim,
            });
        }
        Ok(self
            .vectors
            .chunks_exact(self.dim)
            .map(|row| dot(z.as_slice(), row))
            .collect())
    }

    /// All labels scored against `z`, sorted by descending score with ties
    /// broken by ascending label bytes.
    pub fn score(&self, z: &HyperVector) -> Result<Vec<ScoredLabel>> {
        let raw = self.raw_scores(z)?;
        let mut scored: Vec<ScoredLabel> = self
            .labels
            .iter()
            .zip(raw)
            .map(|(l, s)| ScoredLabel {
                label: l.clone(),
                score: s,
            })
            .collect();
        scored.sort_by(ScoredLabel::ranking);
        Ok(scored)
    }

    fn check_memory(&self, mem: &HbfMemory) -> Result<()> {
        if mem.dim() != self.dim {
            return Err(HbfError::DimensionMismatch {
                left: mem.dim(),
                right: self.dim,
            });
        }
        if mem.value_seed() != self.value_seed {
            return Err(HbfError::invalid(
                "label set was generated with a different value seed than the memory",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredLabel {
    pub label: Vec<u8>,
    pub score: f64,
}

impl ScoredLabel {
    fn ranking(a: &ScoredLabel, b: &ScoredLabel) -> Ordering {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    }
}

/// Scores `z` against the value codebook of `labels`.
pub fn score_codebook(
    z: &HyperVector,
    labels: &[Vec<u8>],
    value_seed: u64,
) -> Result<Vec<ScoredLabel>> {
    LabelSet::new(labels.to_vec(), value_seed, z.dim())?.score(z)
}

/// Thresholds of the top-K margin decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub tau: f64,
    pub delta: f64,
    pub top_k: usize,
}

impl DecoderConfig {
    pub const DEFAULT_TOP_K: usize = 2;

    /// `tau` may be ±∞ (never / always pass the absolute test) but not NaN.
    pub fn new(tau: f64, delta: f64, top_k: usize) -> Result<Self> {
        let cfg = Self { tau, delta, top_k };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau.is_nan() {
            return Err(HbfError::invalid("tau must not be NaN"));
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(HbfError::invalid(format!(
                "delta must be non-negative, got {}",
                self.delta
            )));
        }
        if self.top_k < 2 {
            return Err(HbfError::invalid(format!(
                "top_k must be at least 2, got {}",
                self.top_k
            )));
        }
        Ok(())
    }
}

/// Result of a decode. `Reject` is the ⊥ answer; both variants carry the
/// top-K list for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodeOutcome {
    Hit {
        label: Vec<u8>,
        best_score: f64,
        runner_up: f64,
        top_k: Vec<ScoredLabel>,
    },
    Reject {
        top_k: Vec<ScoredLabel>,
    },
}

impl DecodeOutcome {
    pub fn is_hit(&self) -> bool {
        matches!(self, DecodeOutcome::Hit { .. })
    }

    pub fn label(&self) -> Option<&[u8]> {
        match self {
            DecodeOutcome::Hit { label, .. } => Some(label),
            DecodeOutcome::Reject { .. } => None,
        }
    }

    pub fn top_k(&self) -> &[ScoredLabel] {
        match self {
            DecodeOutcome::Hit { top_k, .. } | DecodeOutcome::Reject { top_k } => top_k,
        }
    }

    /// Best and runner-up scores, when the top-K list has them.
    pub fn leading_scores(&self) -> (Option<f64>, Option<f64>) {
        let t = self.top_k();
        (t.first().map(|s| s.score), t.get(1).map(|s| s.score))
    }
}

/// Applies the margin rule to a sorted score list: accept the leader iff
/// `s1 >= tau` and `s1 - s2 >= delta`.
pub fn apply_margin_rule(sorted: &[ScoredLabel], cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    cfg.validate()?;
    if sorted.len() < cfg.top_k {
        return Err(HbfError::invalid(format!(
            "need at least top_k = {} labels, have {}",
            cfg.top_k,
            sorted.len()
        )));
    }
    let top_k = sorted[..cfg.top_k].to_vec();
    let (s1, s2) = (top_k[0].score, top_k[1].score);
    if s1 >= cfg.tau && s1 - s2 >= cfg.delta {
        Ok(DecodeOutcome::Hit {
            label: top_k[0].label.clone(),
            best_score: s1,
            runner_up: s2,
            top_k,
        })
    } else {
        Ok(DecodeOutcome::Reject { top_k })
    }
}

/// Decodes the value stored under `key`.
pub fn decode(
    mem: &HbfMemory,
    key: &[u8],
    cfg: &DecoderConfig,
    labels: &LabelSet,
) -> Result<DecodeOutcome> {
    let k = mem.key_codebook().vector(key)?;
    decode_vector(mem, k.as_vector(), cfg, labels)
}

/// Decodes with an explicit key vector, e.g. a noisy probe.
pub fn decode_vector(
    mem: &HbfMemory,
    key_vector: &HyperVector,
    cfg: &DecoderConfig,
    labels: &LabelSet,
) -> Result<DecodeOutcome> {
    labels.check_memory(mem)?;
    let z = mem.correlate_vector(key_vector)?;
    apply_margin_rule(&labels.score(&z)?, cfg)
}
