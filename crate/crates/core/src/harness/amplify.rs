//! Majority voting over independent replicas.
//!
//! Each replica stores the same records under its own codebooks and noise
//! draws. A query is decoded by every replica and the plurality label is
//! accepted when it is unique and collects at least `⌈r/2⌉` votes.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HbfError, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{generic_csv, num, OutcomeClass, PreparedIndex, Summary, Workload};
use crate::index::DecodeOutcome;
use crate::noise::{rng_from, NoiseSpec};
use crate::seeds::derive_seed;

/// Key-noise seed used by replica `i` for a query seeded with `seed`.
pub fn replica_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, "replica", i as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplifiedOutcome {
    pub label: Option<Vec<u8>>,
    /// Votes per accepted label, in label order.
    pub votes: BTreeMap<Vec<u8>, usize>,
    pub replicas: Vec<DecodeOutcome>,
}

impl AmplifiedOutcome {
    pub fn winner_votes(&self) -> usize {
        self.label.as_ref().map_or(0, |l| self.votes[l])
    }
}

/// Plurality vote with threshold `⌈r/2⌉`; ties for first place reject.
pub fn vote(outcomes: Vec<DecodeOutcome>) -> AmplifiedOutcome {
    let mut votes: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for o in &outcomes {
        if let Some(l) = o.label() {
            *votes.entry(l.to_vec()).or_default() += 1;
        }
    }
    let need = outcomes.len().div_ceil(2);
    let best = votes.values().copied().max().unwrap_or(0);
    let leaders: Vec<&Vec<u8>> = votes.iter().filter(|(_, &c)| c == best).map(|(l, _)| l).collect();
    let label = (best >= need && best > 0 && leaders.len() == 1).then(|| leaders[0].clone());
    AmplifiedOutcome {
        label,
        votes,
        replicas: outcomes,
    }
}

pub fn amplified_decode(
    replicas: &[PreparedIndex],
    key: &[u8],
    noise: &[NoiseSpec],
    seed: u64,
) -> Result<AmplifiedOutcome> {
    if replicas.is_empty() {
        return Err(HbfError::invalid("amplified decoding needs at least one replica"));
    }
    let outcomes = replicas
        .iter()
        .enumerate()
        .map(|(i, r)| r.query(key, noise, replica_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vote(outcomes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifySummary {
    pub replicas: usize,
    pub trials: u64,
    pub single_errors: u64,
    pub voted_errors: u64,
    pub single_error_rate: f64,
    pub voted_error_rate: f64,
    /// Trials fixed by voting.
    pub fixed: u64,
    /// Trials broken by voting.
    pub broken: u64,
    /// McNemar statistic `(b - c)/√(b + c)`.
    pub mcnemar_z: f64,
    /// One-sided 5% test that voting lowers the error rate.
    pub improved: bool,
}

impl Summary for AmplifySummary {
    fn lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", "amplify".into()),
            ("replicas", self.replicas.to_string()),
            ("trials", self.trials.to_string()),
            ("single_errors", self.single_errors.to_string()),
            ("voted_errors", self.voted_errors.to_string()),
            ("single_error_rate", num(self.single_error_rate)),
            ("voted_error_rate", num(self.voted_error_rate)),
            ("fixed", self.fixed.to_string()),
            ("broken", self.broken.to_string()),
            ("mcnemar_z", num(self.mcnemar_z)),
            ("improved", self.improved.to_string()),
        ]
    }
}

pub const AMPLIFY_COLUMNS: [&str; 9] = [
    "trial",
    "trial_seed",
    "key",
    "expected",
    "single_outcome",
    "voted_outcome",
    "voted_label",
    "winner_votes",
    "replicas",
];

pub fn mcnemar_z(fixed: u64, broken: u64) -> f64 {
    if fixed + broken == 0 {
        0.0
    } else {
        (fixed as f64 - broken as f64) / ((fixed + broken) as f64).sqrt()
    }
}

/// Paired comparison of replica 0 alone against the vote of all
/// `cfg.replicas` replicas on the same member queries and noise draws.
pub fn run_amplify_experiment(cfg: &ExperimentConfig) -> Result<(AmplifySummary, Vec<u8>)> {
    cfg.validate()?;
    if cfg.n == 0 {
        return Err(HbfError::invalid("amplification needs a non-empty store"));
    }
    let workload = Workload::synthetic(cfg.n, cfg.label_count);
    let replicas = (0..cfg.replicas as u64)
        .map(|i| PreparedIndex::prepare(cfg, &workload, i))
        .collect::<Result<Vec<_>>>()?;

    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.master_seed, "amplify", t);
            let r = &workload.records[rng_from(seed).random_range(0..workload.records.len())];
            let voted = amplified_decode(&replicas, &r.key, &cfg.noise, seed)?;
            let single = OutcomeClass::classify(&voted.replicas[0], Some(&r.value));
            let label = voted.label.as_deref();
            let voted_class = match label {
                None => OutcomeClass::Reject,
                Some(l) if l == r.value.as_slice() => OutcomeClass::HitCorrect,
                Some(_) => OutcomeClass::HitWrong,
            };
            Ok((t, seed, r, single, voted_class, voted))
        })
        .collect::<Result<Vec<_>>>()?;

    let ok = |c: OutcomeClass| c == OutcomeClass::HitCorrect;
    let single_errors = trials.iter().filter(|x| !ok(x.3)).count() as u64;
    let voted_errors = trials.iter().filter(|x| !ok(x.4)).count() as u64;
    let fixed = trials.iter().filter(|x| !ok(x.3) && ok(x.4)).count() as u64;
    let broken = trials.iter().filter(|x| ok(x.3) && !ok(x.4)).count() as u64;
    let z = mcnemar_z(fixed, broken);
    let n = cfg.trials as f64;
    let summary = AmplifySummary {
        replicas: cfg.replicas,
        trials: cfg.trials,
        single_errors,
        voted_errors,
        single_error_rate: single_errors as f64 / n,
        voted_error_rate: voted_errors as f64 / n,
        fixed,
        broken,
        mcnemar_z: z,
        improved: z > 1.645,
    };
    let text = |b: &[u8]| String::from_utf8_lossy(b).into_owned();
    let rows = trials
        .iter()
        .map(|(t, seed, r, single, voted_class, voted)| {
            vec![
                t.to_string(),
                seed.to_string(),
                text(&r.key),
                text(&r.value),
                single.as_str().to_string(),
                voted_class.as_str().to_string(),
                voted.label.as_deref().map(text).unwrap_or_default(),
                voted.winner_votes().to_string(),
                cfg.replicas.to_string(),
            ]
        })
        .collect();
    Ok((summary, generic_csv(&AMPLIFY_COLUMNS, rows)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::ScoredLabel;

    fn hit(l: &str) -> DecodeOutcome {
        DecodeOutcome::Hit {
            label: l.as_bytes().to_vec(),
            best_score: 1.0,
            runner_up: 0.0,
            top_k: vec![ScoredLabel { label: l.as_bytes().to_vec(), score: 1.0 }],
        }
    }

    fn reject() -> DecodeOutcome {
        DecodeOutcome::Reject { top_k: vec![] }
    }

    #[test]
    fn voting_rule() {
        assert_eq!(vote(vec![hit("a"), hit("a"), hit("b")]).label, Some(b"a".to_vec()));
        assert_eq!(vote(vec![hit("a"), reject(), reject()]).label, None);
        assert_eq!(vote(vec![hit("a"), hit("b")]).label, None);
        assert_eq!(vote(vec![hit("a"), hit("a"), hit("b"), hit("b")]).label, None);
        assert_eq!(vote(vec![hit("a"), hit("a"), reject(), reject()]).label, Some(b"a".to_vec()));
        assert_eq!(vote(vec![reject()]).label, None);
    }

    #[test]
    fn single_replica_matches_plain_decode() {
        let cfg = ExperimentConfig {
            dim: 256,
            n: 20,
            label_count: 20,
            noise: vec![NoiseSpec::KeyHamming(40)],
            probe_count: 100,
            ..Default::default()
        };
        let w = Workload::synthetic(cfg.n, cfg.label_count);
        let rep = PreparedIndex::prepare(&cfg, &w, 0).unwrap();
        for (i, r) in w.records.iter().enumerate() {
            let seed = i as u64 * 31;
            let voted = amplified_decode(std::slice::from_ref(&rep), &r.key, &cfg.noise, seed).unwrap();
            let plain = rep.query(&r.key, &cfg.noise, replica_seed(seed, 0)).unwrap();
            assert_eq!(voted.replicas[0], plain);
            assert_eq!(voted.label.as_deref(), plain.label());
        }
    }

    #[test]
    fn mcnemar_statistic() {
        assert_eq!(mcnemar_z(0, 0), 0.0);
        assert!((mcnemar_z(9, 0) - 3.0).abs() < 1e-12);
        assert!(mcnemar_z(2, 8) < 0.0);
    }
}
