//! Cost model of a sequential pointer-chasing lookup (skip-graph style) and
//! its comparison against a one-shot HBF decode.
//!
//! A lookup is a walk of `ell` hops, each succeeding with probability `p`
//! and costing time `T`. On failure the whole walk is retried.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HbfError, Result};
use crate::noise::rng_from;
use crate::seeds::derive_seed;

/// Per-trial cap on walk attempts.
pub const MAX_ATTEMPTS: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaseModel {
    pub p: f64,
    pub ell: u32,
    pub hop_time: f64,
}

impl ChaseModel {
    pub fn new(p: f64, ell: u32, hop_time: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(HbfError::invalid(format!("hop success p must lie in (0, 1], got {p}")));
        }
        if ell == 0 {
            return Err(HbfError::invalid("hop count must be at least 1"));
        }
        if !(hop_time > 0.0 && hop_time.is_finite()) {
            return Err(HbfError::invalid(format!("hop time must be positive, got {hop_time}")));
        }
        Ok(Self { p, ell, hop_time })
    }

    /// `p^ℓ`
    pub fn success_prob(&self) -> f64 {
        self.p.powi(self.ell as i32)
    }

    /// `ℓ T`
    pub fn expected_time(&self) -> f64 {
        self.ell as f64 * self.hop_time
    }

    /// `ℓ T / p^ℓ`; `+∞` when `p^ℓ` underflows or the quotient overflows.
    pub fn expected_time_repeat(&self) -> f64 {
        let s = self.success_prob();
        if s == 0.0 {
            return f64::INFINITY;
        }
        self.expected_time() / s
    }
}

pub fn chase_success_prob(model: &ChaseModel) -> f64 {
    model.success_prob()
}

pub fn chase_expected_time(model: &ChaseModel) -> f64 {
    model.expected_time()
}

pub fn chase_expected_time_repeat(model: &ChaseModel) -> f64 {
    model.expected_time_repeat()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaseStats {
    pub trials: u64,
    pub seed: u64,
    /// Fraction of trials whose first walk succeeded.
    pub success_rate: f64,
    pub mean_attempts: f64,
    /// Mean repeat-until-success time, each attempt costing `ℓ T`.
    pub mean_total_time: f64,
    /// Standard error of `mean_total_time`.
    pub total_time_std_err: f64,
    /// Trials that hit [`MAX_ATTEMPTS`] without success.
    pub truncated: u64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    first_success: u64,
    attempts: u128,
    attempts_sq: u128,
    truncated: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            first_success: self.first_success + o.first_success,
            attempts: self.attempts + o.attempts,
            attempts_sq: self.attempts_sq + o.attempts_sq,
            truncated: self.truncated + o.truncated,
        }
    }
}

fn walk(model: &ChaseModel, rng: &mut impl Rng) -> bool {
    (0..model.ell).all(|_| rng.random_bool(model.p))
}

/// Monte Carlo of repeat-until-success lookups. Each trial has its own
/// derived seed and aggregation uses exact integer counters, so the result
/// does not depend on thread scheduling.
pub fn chase_simulate(model: &ChaseModel, trials: u64, seed: u64) -> Result<ChaseStats> {
    if trials == 0 {
        return Err(HbfError::invalid("trials must be at least 1"));
    }
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(seed, "chase", i));
            let mut attempts = 0u64;
            let mut ok = false;
            while attempts < MAX_ATTEMPTS {
                attempts += 1;
                if walk(model, &mut rng) {
                    ok = true;
                    break;
                }
            }
            Tally {
                first_success: u64::from(ok && attempts == 1),
                attempts: attempts as u128,
                attempts_sq: (attempts as u128) * (attempts as u128),
                truncated: u64::from(!ok),
            }
        })
        .reduce(Tally::default, Tally::merge);

    let n = trials as f64;
    let mean_attempts = tally.attempts as f64 / n;
    let var_attempts = if trials > 1 {
        let sum = tally.attempts as f64;
        ((tally.attempts_sq as f64 - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let walk_time = model.expected_time();
    Ok(ChaseStats {
        trials,
        seed,
        success_rate: tally.first_success as f64 / n,
        mean_attempts,
        mean_total_time: mean_attempts * walk_time,
        total_time_std_err: walk_time * (var_attempts / n).sqrt(),
        truncated: tally.truncated,
    })
}

/// Measured HBF behaviour to set against the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HbfStats {
    pub accuracy: f64,
    /// Sequential rounds per query; one for a one-shot decode.
    pub rounds: u32,
    pub trials: u64,
    pub seed: u64,
}

/// One CSV row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub system: String,
    pub p: f64,
    pub ell: u32,
    #[serde(rename = "T")]
    pub hop_time: f64,
    pub success_prob: f64,
    pub expected_time: f64,
    pub expected_time_repeat: f64,
    pub measured_success: f64,
    pub measured_time_mean: f64,
    pub trials: u64,
    pub seed: u64,
}

pub const COMPARISON_COLUMNS: [&str; 11] = [
    "system",
    "p",
    "ell",
    "T",
    "success_prob",
    "expected_time",
    "expected_time_repeat",
    "measured_success",
    "measured_time_mean",
    "trials",
    "seed",
];

/// Side-by-side record of the one-shot HBF and the `ℓ`-hop baseline.
/// The HBF is modelled as a chase with `ℓ = rounds` and per-round success
/// equal to its measured accuracy.
pub fn compare_report(
    hbf: &HbfStats,
    model: &ChaseModel,
    measured: Option<&ChaseStats>,
) -> Vec<ComparisonRow> {
    let rounds = hbf.rounds.max(1);
    let hbf_time = rounds as f64 * model.hop_time;
    let hbf_repeat = if hbf.accuracy > 0.0 {
        hbf_time / hbf.accuracy
    } else {
        f64::INFINITY
    };
    let hbf_row = ComparisonRow {
        system: "hbf".into(),
        p: hbf.accuracy,
        ell: rounds,
        hop_time: model.hop_time,
        success_prob: hbf.accuracy,
        expected_time: hbf_time,
        expected_time_repeat: hbf_repeat,
        measured_success: hbf.accuracy,
        measured_time_mean: hbf_time,
        trials: hbf.trials,
        seed: hbf.seed,
    };
    let chase_row = ComparisonRow {
        system: "pointer_chase".into(),
        p: model.p,
        ell: model.ell,
        hop_time: model.hop_time,
        success_prob: model.success_prob(),
        expected_time: model.expected_time(),
        expected_time_repeat: model.expected_time_repeat(),
        measured_success: measured.map_or(f64::NAN, |m| m.success_rate),
        measured_time_mean: measured.map_or(f64::NAN, |m| m.mean_total_time),
        trials: measured.map_or(0, |m| m.trials),
        seed: measured.map_or(0, |m| m.seed),
    };
    vec![hbf_row, chase_row]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values() {
        let m = ChaseModel::new(0.9, 10, 1.0).unwrap();
        assert!((m.success_prob() - 0.348_678_440_1).abs() < 1e-12);
        assert!((m.expected_time_repeat() - 28.6797).abs() < 1e-4);
        assert_eq!(m.expected_time(), 10.0);
        assert_eq!(ChaseModel::new(0.7, 1, 1.0).unwrap().success_prob(), 0.7);
        assert_eq!(ChaseModel::new(0.5, 4, 0.5).unwrap().expected_time(), 2.0);
        let sure = ChaseModel::new(1.0, 12, 2.0).unwrap();
        assert_eq!(sure.success_prob(), 1.0);
        assert_eq!(sure.expected_time_repeat(), sure.expected_time());
    }

    #[test]
    fn repeat_time_grows_superlinearly() {
        let mut prev_ratio = 0.0;
        for ell in 1..20 {
            let m = ChaseModel::new(0.8, ell, 1.0).unwrap();
            assert!(m.expected_time_repeat() > m.expected_time());
            let ratio = m.expected_time_repeat() / ell as f64;
            assert!(ratio > prev_ratio);
            prev_ratio = ratio;
        }
    }

    #[test]
    fn overflow_reports_infinity() {
        let m = ChaseModel::new(1e-10, 40, 1.0).unwrap();
        assert_eq!(m.expected_time_repeat(), f64::INFINITY);
    }

    #[test]
    fn invalid_models() {
        assert!(ChaseModel::new(0.0, 1, 1.0).is_err());
        assert!(ChaseModel::new(1.1, 1, 1.0).is_err());
        assert!(ChaseModel::new(0.5, 0, 1.0).is_err());
        assert!(ChaseModel::new(0.5, 1, 0.0).is_err());
    }

    #[test]
    fn certain_hops_simulate_exactly() {
        let s = chase_simulate(&ChaseModel::new(1.0, 5, 1.0).unwrap(), 1000, 3).unwrap();
        assert_eq!(s.success_rate, 1.0);
        assert_eq!(s.mean_attempts, 1.0);
        assert_eq!(s.mean_total_time, 5.0);
        assert_eq!(s.truncated, 0);
        assert!(chase_simulate(&ChaseModel::new(1.0, 5, 1.0).unwrap(), 0, 3).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = ChaseModel::new(0.8, 6, 1.0).unwrap();
        assert_eq!(chase_simulate(&m, 5000, 9).unwrap(), chase_simulate(&m, 5000, 9).unwrap());
    }

    #[test]
    fn comparison_rows() {
        let m = ChaseModel::new(0.99, 20, 1.0).unwrap();
        let hbf = HbfStats { accuracy: 0.999, rounds: 1, trials: 1000, seed: 1 };
        let rows = compare_report(&hbf, &m, None);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].ell, 1);
        assert_eq!(rows[1].ell, 20);
        assert!((rows[1].success_prob - 0.817_906_937_597_230_8).abs() < 1e-12);
    }
}
