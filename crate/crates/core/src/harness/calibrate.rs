//! Empirical decoder calibration.
//!
//! Raw scores `⟨k ⊛ M, v_w⟩` grow like `ρ d²` for a true match and like
//! `ρ √(n d³)` for impostors, so thresholds are fitted from probe queries
//! instead of being derived from nominal units. Non-member probes use key
//! bytes from a reserved namespace that evaluation queries never touch.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::evt_threshold_exact;
use crate::error::{HbfError, Result};
use crate::index::{DecoderConfig, HbfMemory, LabelSet, Record};
use crate::noise::rng_from;
use crate::seeds::derive_seed;

pub const MIN_PROBES: usize = 100;

/// Key bytes of the `i`-th calibration probe; never a stored key in practice
/// because of the leading NUL tag.
pub fn calibration_probe_key(seed: u64, i: u64) -> Vec<u8> {
    format!("\0calibration-probe\0{seed:016x}-{i}").into_bytes()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub decoder: DecoderConfig,
    /// Spread of impostor scores over non-member probes.
    pub sigma_hat: f64,
    pub impostor_mean: f64,
    /// Mean true-label score over member probes, when members were given.
    pub mu_hat: Option<f64>,
    /// Threshold from the Gaussian-maximum quantile, before the `μ̂/2` floor.
    pub evt_tau: f64,
    pub eps: f64,
    pub probes: usize,
}

impl Calibration {
    /// Impostor variance relative to `d`, the constant `c` of the
    /// sub-Gaussian tail assumption in calibrated units.
    pub fn c_hat(&self, d: usize) -> f64 {
        self.sigma_hat * self.sigma_hat / d as f64
    }
}

/// Fits `(τ, Δ)` for `mem` against `labels`.
///
/// `σ̂` is the standard deviation of all `|Y|` scores over `probe_count`
/// non-member probes, and `τ = σ̂ Φ⁻¹((1 - ε)^{1/|Y|})`. With member probes,
/// `μ̂` is their mean true-label score, `Δ = μ̂/4` and `τ` is floored at
/// `μ̂/2`; without them `Δ = 0`.
pub fn calibrate_decoder(
    mem: &HbfMemory,
    labels: &LabelSet,
    members: &[Record],
    probe_count: usize,
    eps: f64,
    seed: u64,
) -> Result<Calibration> {
    if probe_count < MIN_PROBES {
        return Err(HbfError::invalid(format!(
            "probe_count must be at least {MIN_PROBES}, got {probe_count}"
        )));
    }
    let keys = mem.key_codebook();
    let nonmember_seed = derive_seed(seed, "calibrate-nonmember", 0);

    let sums = (0..probe_count as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let k = keys.vector(&calibration_probe_key(nonmember_seed, i))?;
            let z = mem.correlate_vector(k.as_vector())?;
            let s = labels.raw_scores(&z)?;
            Ok((s.iter().sum(), s.iter().map(|x| x * x).sum()))
        })
        .collect::<Result<Vec<_>>>()?;
    let count = (probe_count * labels.len()) as f64;
    let (sum, sum_sq) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let impostor_mean = sum / count;
    let var = (sum_sq / count - impostor_mean * impostor_mean).max(0.0);
    let sigma_hat = var.sqrt();
    if !(sigma_hat > 0.0 && sigma_hat.is_finite()) {
        return Err(HbfError::DegenerateCalibration);
    }

    let mu_hat = if members.is_empty() {
        None
    } else {
        let mut rng = rng_from(derive_seed(seed, "calibrate-member", 0));
        let picks: Vec<usize> = (0..probe_count)
            .map(|_| rng.random_range(0..members.len()))
            .collect();
        let scores = picks
            .par_iter()
            .map(|&i| -> Result<f64> {
                let r = &members[i];
                let pos = labels.position(&r.value).ok_or_else(|| {
                    HbfError::invalid(format!(
                        "member value {:?} is not in the label set",
                        String::from_utf8_lossy(&r.value)
                    ))
                })?;
                let z = mem.correlate_query(&r.key)?;
                Ok(labels.raw_scores(&z)?[pos])
            })
            .collect::<Result<Vec<_>>>()?;
        Some(scores.iter().sum::<f64>() / scores.len() as f64)
    };

    let evt_tau = evt_threshold_exact(sigma_hat, labels.len(), eps)?;
    let (tau, delta) = match mu_hat {
        Some(mu) => (evt_tau.max(mu / 2.0), (mu / 4.0).max(0.0)),
        None => (evt_tau, 0.0),
    };
    Ok(Calibration {
        decoder: DecoderConfig::new(tau, delta, DecoderConfig::DEFAULT_TOP_K)?,
        sigma_hat,
        impostor_mean,
        mu_hat,
        evt_tau,
        eps,
        probes: probe_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build, decode, BuildConfig};

    fn setup(n: usize, labels: usize, d: usize) -> (HbfMemory, LabelSet, Vec<Record>) {
        let recs: Vec<Record> = (0..n)
            .map(|i| Record::new(format!("k{i}"), format!("v{}", i % labels)))
            .collect();
        let mem = build(&recs, &BuildConfig::new(d, 1.0, 3, 4)).unwrap();
        let ls = LabelSet::for_memory(&mem, (0..labels).map(|j| format!("v{j}").into_bytes()).collect())
            .unwrap();
        (mem, ls, recs)
    }

    #[test]
    fn single_item_memory_hits() {
        let (mem, ls, recs) = setup(1, 20, 1024);
        let cal = calibrate_decoder(&mem, &ls, &recs, 100, 0.01, 5).unwrap();
        let mu = cal.mu_hat.unwrap();
        assert!(mu > 3.0 * cal.evt_tau);
        let out = decode(&mem, b"k0", &cal.decoder, &ls).unwrap();
        assert_eq!(out.label(), Some(&b"v0"[..]));
    }

    #[test]
    fn larger_eps_lowers_tau() {
        let (mem, ls, _) = setup(50, 50, 512);
        let a = calibrate_decoder(&mem, &ls, &[], 200, 0.01, 9).unwrap();
        let b = calibrate_decoder(&mem, &ls, &[], 200, 0.02, 9).unwrap();
        assert_eq!(a.sigma_hat, b.sigma_hat);
        assert!(b.decoder.tau < a.decoder.tau);
        assert_eq!(a.decoder.delta, 0.0);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let (mem, ls, _) = setup(0, 5, 256);
        assert!(matches!(
            calibrate_decoder(&mem, &ls, &[], 100, 0.01, 1),
            Err(HbfError::DegenerateCalibration)
        ));
        let (mem, ls, _) = setup(5, 5, 256);
        assert!(calibrate_decoder(&mem, &ls, &[], 99, 0.01, 1).is_err());
        assert!(calibrate_decoder(&mem, &ls, &[], 100, 1.5, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let (mem, ls, recs) = setup(30, 30, 512);
        let a = calibrate_decoder(&mem, &ls, &recs, 150, 0.05, 2).unwrap();
        let b = calibrate_decoder(&mem, &ls, &recs, 150, 0.05, 2).unwrap();
        assert_eq!(a, b);
    }
}
