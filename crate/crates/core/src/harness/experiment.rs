//! Seeded Monte Carlo experiments over synthetic workloads.
//!
//! Every random choice is drawn from a seed derived from
//! `(master_seed, experiment, trial)`, trials run in parallel and are
//! collected in index order, so two runs with the same manifest produce
//! byte-identical CSV output.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{fn_bound, fp_bound, signal_mean};
use crate::error::{HbfError, Result};
use crate::harness::calibrate::{calibrate_decoder, Calibration};
use crate::harness::config::{DecoderChoice, ExperimentConfig};
use crate::hypervector::HyperVector;
use crate::index::{build, decode_vector, BuildConfig, DecodeOutcome, DecoderConfig, HbfMemory, LabelSet, Record};
use crate::noise::{rng_from, NoiseSpec};
use crate::seeds::derive_seed;

pub fn item_key(i: usize) -> Vec<u8> {
    format!("item-{i:08}").into_bytes()
}

pub fn label_name(j: usize) -> Vec<u8> {
    format!("label-{j:06}").into_bytes()
}

/// Key bytes of an evaluation non-member query.
pub fn nonmember_key(trial_seed: u64) -> Vec<u8> {
    format!("\0eval-nonmember\0{trial_seed:016x}").into_bytes()
}

/// `n` records over `label_count` labels; record `i` stores label `i mod |Y|`.
#[derive(Debug, Clone)]
pub struct Workload {
    pub records: Vec<Record>,
    pub labels: Vec<Vec<u8>>,
}

impl Workload {
    pub fn synthetic(n: usize, label_count: usize) -> Self {
        let labels: Vec<Vec<u8>> = (0..label_count).map(label_name).collect();
        let records = (0..n)
            .map(|i| Record::new(item_key(i), labels[i % label_count].clone()))
            .collect();
        Self { records, labels }
    }
}

/// A built, noise-corrupted and calibrated memory ready for queries.
#[derive(Debug, Clone)]
pub struct PreparedIndex {
    pub memory: HbfMemory,
    pub labels: LabelSet,
    pub decoder: DecoderConfig,
    pub calibration: Option<Calibration>,
}

impl PreparedIndex {
    /// Builds replica `replica` of the workload described by `cfg` with `n`
    /// items. Replicas differ only in their codebook and noise seeds.
    pub fn prepare(cfg: &ExperimentConfig, workload: &Workload, replica: u64) -> Result<Self> {
        let master = cfg.master_seed;
        let n = workload.records.len();
        let build_cfg = BuildConfig::new(
            cfg.dim,
            cfg.rho.resolve(n),
            derive_seed(master, "key-codebook", replica),
            derive_seed(master, "value-codebook", replica),
        );
        let mut memory = build(&workload.records, &build_cfg)?;
        for (i, spec) in cfg.memory_noise().enumerate() {
            let seed = derive_seed(master, "memory-noise", replica * 1024 + i as u64);
            memory = spec.apply_to_memory(&memory, seed)?;
        }
        let labels = LabelSet::for_memory(&memory, workload.labels.clone())?;

        let cal_seed = derive_seed(master, "calibration", replica);
        let probes = cfg.probe_count.max(crate::harness::calibrate::MIN_PROBES);
        let (decoder, calibration) = match cfg.decoder {
            DecoderChoice::Auto { eps } => {
                let cal = calibrate_decoder(&memory, &labels, &workload.records, probes, eps, cal_seed)?;
                (cal.decoder, Some(cal))
            }
            DecoderChoice::Fixed { tau, delta, top_k } => {
                // calibrated only to report σ̂; an empty memory has none
                let cal = calibrate_decoder(&memory, &labels, &workload.records, probes, 0.01, cal_seed).ok();
                (DecoderConfig::new(tau, delta, top_k)?, cal)
            }
        };
        Ok(Self {
            memory,
            labels,
            decoder,
            calibration,
        })
    }

    /// Codebook key vector after the key-side noise channels.
    pub fn noisy_key(&self, key: &[u8], noise: &[NoiseSpec], seed: u64) -> Result<HyperVector> {
        let mut k = self.memory.key_codebook().vector(key)?.into_vector();
        for (i, spec) in noise.iter().filter(|n| !n.acts_on_memory()).enumerate() {
            k = spec.apply_to_key(&k, derive_seed(seed, "key-noise", i as u64))?;
        }
        Ok(k)
    }

    pub fn query(&self, key: &[u8], noise: &[NoiseSpec], seed: u64) -> Result<DecodeOutcome> {
        let k = self.noisy_key(key, noise, seed)?;
        decode_vector(&self.memory, &k, &self.decoder, &self.labels)
    }

    pub fn sigma_hat(&self) -> Option<f64> {
        self.calibration.map(|c| c.sigma_hat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    Member,
    NonMember,
}

impl QueryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryKind::Member => "member",
            QueryKind::NonMember => "non-member",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeClass {
    HitCorrect,
    HitWrong,
    Reject,
}

impl OutcomeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeClass::HitCorrect => "hit-correct",
            OutcomeClass::HitWrong => "hit-wrong",
            OutcomeClass::Reject => "reject",
        }
    }

    /// Classifies a decode against the expected label (`None` for non-members).
    pub fn classify(outcome: &DecodeOutcome, expected: Option<&[u8]>) -> Self {
        match (outcome.label(), expected) {
            (None, _) => OutcomeClass::Reject,
            (Some(got), Some(want)) if got == want => OutcomeClass::HitCorrect,
            (Some(_), _) => OutcomeClass::HitWrong,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub trial_seed: u64,
    pub kind: QueryKind,
    pub key: Vec<u8>,
    pub expected: Option<Vec<u8>>,
    pub predicted: Option<Vec<u8>>,
    pub outcome: OutcomeClass,
    pub s1: f64,
    pub s2: f64,
    /// True-label score for member queries.
    pub true_score: Option<f64>,
    pub runtime: Duration,
}

fn display_bytes(b: &[u8]) -> String {
    String::from_utf8_lossy(b).replace('\0', "\\0")
}

fn run_trial(
    index: &PreparedIndex,
    workload: &Workload,
    noise: &[NoiseSpec],
    kind: QueryKind,
    trial: u64,
    trial_seed: u64,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let (key, expected) = match kind {
        QueryKind::Member => {
            let mut rng = rng_from(trial_seed);
            let r = &workload.records[rng.random_range(0..workload.records.len())];
            (r.key.clone(), Some(r.value.clone()))
        }
        QueryKind::NonMember => (nonmember_key(trial_seed), None),
    };
    let k = index.noisy_key(&key, noise, trial_seed)?;
    let z = index.memory.correlate_vector(&k)?;
    let raw = index.labels.raw_scores(&z)?;
    let true_score = expected
        .as_deref()
        .and_then(|e| index.labels.position(e))
        .map(|p| raw[p]);
    let outcome = crate::index::apply_margin_rule(&index.labels.score(&z)?, &index.decoder)?;
    let (s1, s2) = outcome.leading_scores();
    Ok(TrialRecord {
        trial,
        trial_seed,
        kind,
        outcome: OutcomeClass::classify(&outcome, expected.as_deref()),
        predicted: outcome.label().map(<[u8]>::to_vec),
        key,
        expected,
        s1: s1.unwrap_or(f64::NAN),
        s2: s2.unwrap_or(f64::NAN),
        true_score,
        runtime: start.elapsed(),
    })
}

/// Runs `cfg.trials` queries of one kind against `index`.
pub fn run_trials(
    cfg: &ExperimentConfig,
    experiment: &str,
    index: &PreparedIndex,
    workload: &Workload,
    kind: QueryKind,
) -> Result<Vec<TrialRecord>> {
    if kind == QueryKind::Member && workload.records.is_empty() {
        return Err(HbfError::invalid("member queries need a non-empty store"));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.master_seed, experiment, t);
            run_trial(index, workload, &cfg.noise, kind, t, seed)
        })
        .collect()
}

pub const TRIAL_COLUMNS: [&str; 19] = [
    "experiment",
    "master_seed",
    "trial",
    "trial_seed",
    "query_kind",
    "key",
    "expected",
    "predicted",
    "outcome",
    "s1",
    "s2",
    "true_score",
    "d",
    "n",
    "label_count",
    "rho",
    "noise",
    "tau",
    "delta",
];

/// Shortest round-trip form; switches to exponent notation at the extremes.
pub(crate) fn num(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let wrap = |e: csv::Error| HbfError::Format(e.to_string());
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| HbfError::Format(e.to_string()))
}

/// RFC 4180 CSV of trial records. The runtime column is appended only when
/// `cfg.timing` is set.
pub fn trials_csv(
    cfg: &ExperimentConfig,
    experiment: &str,
    index: &PreparedIndex,
    n: usize,
    rows: &[TrialRecord],
) -> Result<Vec<u8>> {
    let mut header = TRIAL_COLUMNS.to_vec();
    if cfg.timing {
        header.push("runtime_us");
    }
    let noise = cfg.noise_label();
    let rho = num(index.memory.gain());
    let records = rows.iter().map(|r| {
        let mut row = vec![
            experiment.to_string(),
            cfg.master_seed.to_string(),
            r.trial.to_string(),
            r.trial_seed.to_string(),
            r.kind.as_str().to_string(),
            display_bytes(&r.key),
            r.expected.as_deref().map(display_bytes).unwrap_or_default(),
            r.predicted.as_deref().map(display_bytes).unwrap_or_default(),
            r.outcome.as_str().to_string(),
            num(r.s1),
            num(r.s2),
            fmt_opt(r.true_score),
            cfg.dim.to_string(),
            n.to_string(),
            index.labels.len().to_string(),
            rho.clone(),
            noise.clone(),
            num(index.decoder.tau),
            num(index.decoder.delta),
        ];
        if cfg.timing {
            row.push(r.runtime.as_micros().to_string());
        }
        row
    });
    csv_bytes(&header, records)
}

/// Three-sigma binomial slack around a probability `p` over `trials` draws.
pub fn binomial_slack(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Ordered `name=value` summary lines.
pub trait Summary {
    fn lines(&self) -> Vec<(&'static str, String)>;

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.lines() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FpSummary {
    pub trials: u64,
    pub false_positives: u64,
    pub fp_rate: f64,
    pub tau: f64,
    pub delta: f64,
    pub sigma_hat: Option<f64>,
    /// `τ √d / σ̂`: the threshold in units where impostor variance is `d`.
    pub tau_normalized: Option<f64>,
    pub candidates: usize,
    pub fp_bound: Option<f64>,
    pub bound_holds: Option<bool>,
}

impl Summary for FpSummary {
    fn lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", "fp".into()),
            ("trials", self.trials.to_string()),
            ("false_positives", self.false_positives.to_string()),
            ("fp_rate", num(self.fp_rate)),
            ("tau", num(self.tau)),
            ("delta", num(self.delta)),
            ("sigma_hat", fmt_opt(self.sigma_hat)),
            ("tau_normalized", fmt_opt(self.tau_normalized)),
            ("candidates", self.candidates.to_string()),
            ("fp_bound", fmt_opt(self.fp_bound)),
            ("bound_holds", self.bound_holds.map(|b| b.to_string()).unwrap_or_default()),
        ]
    }
}

pub struct ExperimentOutput<S> {
    pub summary: S,
    pub rows: Vec<TrialRecord>,
    pub csv: Vec<u8>,
}

/// Non-member queries only: every hit is a false positive.
pub fn run_fp_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<FpSummary>> {
    cfg.validate()?;
    let workload = Workload::synthetic(cfg.n, cfg.label_count);
    let index = PreparedIndex::prepare(cfg, &workload, 0)?;
    let rows = run_trials(cfg, "fp", &index, &workload, QueryKind::NonMember)?;
    let fps = rows.iter().filter(|r| r.outcome != OutcomeClass::Reject).count() as u64;
    let fp_rate = fps as f64 / cfg.trials as f64;
    let tau = index.decoder.tau;
    let sigma_hat = index.sigma_hat();
    let tau_normalized = sigma_hat.map(|s| tau * (cfg.dim as f64).sqrt() / s);
    let candidates = index.labels.len();
    let bound = tau_normalized.map(|t| fp_bound(candidates, cfg.dim, t));
    let summary = FpSummary {
        trials: cfg.trials,
        false_positives: fps,
        fp_rate,
        tau,
        delta: index.decoder.delta,
        sigma_hat,
        tau_normalized,
        candidates,
        fp_bound: bound,
        bound_holds: bound.map(|b| fp_rate <= b + binomial_slack(b, cfg.trials)),
    };
    let csv = trials_csv(cfg, "fp", &index, cfg.n, &rows)?;
    Ok(ExperimentOutput { summary, rows, csv })
}

/// Total Hamming distance and effective flip rate of the configured noise.
/// Independent flips compose as `1 - 2p = Π (1 - 2p_i)`.
pub fn nominal_noise(noise: &[NoiseSpec]) -> (usize, f64) {
    let mut h = 0usize;
    let mut keep = 1.0;
    for n in noise {
        match *n {
            NoiseSpec::KeyHamming(x) => h += x,
            NoiseSpec::MemoryFlip(p) => keep *= 1.0 - 2.0 * p,
            _ => {}
        }
    }
    (h, (1.0 - keep) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FnSummary {
    pub trials: u64,
    pub correct: u64,
    pub wrong: u64,
    pub rejected: u64,
    pub accuracy: f64,
    pub reject_rate: f64,
    pub wrong_rate: f64,
    pub hamming: usize,
    pub p_e: f64,
    /// `(d - 2H)(1 - 2p_e)`
    pub mu_nominal: f64,
    /// Nominal signal over the nominal noise scale `√d`.
    pub snr_nominal: f64,
    pub fn_bound_nominal: f64,
    pub mean_true_score: f64,
    pub sigma_hat: Option<f64>,
    /// Measured mean true score over `σ̂`.
    pub snr_measured: Option<f64>,
    /// The same bound with the measured SNR substituted for the nominal one.
    pub fn_bound_calibrated: Option<f64>,
    pub bound_holds_nominal: bool,
    pub bound_holds_calibrated: Option<bool>,
}

impl Summary for FnSummary {
    fn lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", "fn".into()),
            ("trials", self.trials.to_string()),
            ("correct", self.correct.to_string()),
            ("wrong", self.wrong.to_string()),
            ("rejected", self.rejected.to_string()),
            ("accuracy", num(self.accuracy)),
            ("reject_rate", num(self.reject_rate)),
            ("wrong_rate", num(self.wrong_rate)),
            ("hamming", self.hamming.to_string()),
            ("p_e", num(self.p_e)),
            ("mu_nominal", num(self.mu_nominal)),
            ("snr_nominal", num(self.snr_nominal)),
            ("fn_bound_nominal", num(self.fn_bound_nominal)),
            ("mean_true_score", num(self.mean_true_score)),
            ("sigma_hat", fmt_opt(self.sigma_hat)),
            ("snr_measured", fmt_opt(self.snr_measured)),
            ("fn_bound_calibrated", fmt_opt(self.fn_bound_calibrated)),
            ("bound_holds_nominal", self.bound_holds_nominal.to_string()),
            (
                "bound_holds_calibrated",
                self.bound_holds_calibrated.map(|b| b.to_string()).unwrap_or_default(),
            ),
        ]
    }
}

/// The false-negative bound with signal `mu` at split `μ/2`; 1 when the
/// signal has vanished.
fn fn_bound_at_signal(d: usize, mu: f64, n: usize) -> f64 {
    if mu.is_nan() || mu <= 0.0 {
        return 1.0;
    }
    // fn_bound takes (H, p_e); express μ through an equivalent flip-free H.
    let two_d = 2.0 * d as f64;
    let t = mu / 2.0;
    let b = (-(mu - t).powi(2) / two_d).exp() + n as f64 * (-t * t / two_d).exp();
    b.min(1.0)
}

/// Member queries under the configured key and memory noise.
pub fn run_fn_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput<FnSummary>> {
    cfg.validate()?;
    let workload = Workload::synthetic(cfg.n, cfg.label_count);
    let index = PreparedIndex::prepare(cfg, &workload, 0)?;
    let rows = run_trials(cfg, "fn", &index, &workload, QueryKind::Member)?;
    let count = |c: OutcomeClass| rows.iter().filter(|r| r.outcome == c).count() as u64;
    let (correct, wrong, rejected) = (
        count(OutcomeClass::HitCorrect),
        count(OutcomeClass::HitWrong),
        count(OutcomeClass::Reject),
    );
    let trials = cfg.trials as f64;
    let failure = (wrong + rejected) as f64 / trials;

    let (h, p_e) = nominal_noise(&cfg.noise);
    let d = cfg.dim;
    let mu_nominal = signal_mean(d, h, p_e);
    let fn_nominal = if mu_nominal > 0.0 && p_e < 0.5 {
        fn_bound(d, h, p_e, cfg.n, mu_nominal / 2.0)?
    } else {
        1.0
    };
    let mean_true_score =
        rows.iter().filter_map(|r| r.true_score).sum::<f64>() / rows.len() as f64;
    let sigma_hat = index.sigma_hat();
    let snr_measured = sigma_hat.map(|s| mean_true_score / s);
    let fn_calibrated = snr_measured.map(|z| fn_bound_at_signal(d, z * (d as f64).sqrt(), cfg.n));

    let holds = |b: f64| failure <= b + binomial_slack(b, cfg.trials);
    let summary = FnSummary {
        trials: cfg.trials,
        correct,
        wrong,
        rejected,
        accuracy: correct as f64 / trials,
        reject_rate: rejected as f64 / trials,
        wrong_rate: wrong as f64 / trials,
        hamming: h,
        p_e,
        mu_nominal,
        snr_nominal: mu_nominal / (d as f64).sqrt(),
        fn_bound_nominal: fn_nominal,
        mean_true_score,
        sigma_hat,
        snr_measured,
        fn_bound_calibrated: fn_calibrated,
        bound_holds_nominal: holds(fn_nominal),
        bound_holds_calibrated: fn_calibrated.map(holds),
    };
    let csv = trials_csv(cfg, "fn", &index, cfg.n, &rows)?;
    Ok(ExperimentOutput { summary, rows, csv })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n: usize,
    pub sigma_hat: f64,
    pub mu_hat: f64,
    pub snr: f64,
    pub c_hat: f64,
    pub tau: f64,
    pub delta: f64,
    pub accuracy: f64,
    pub reject_rate: f64,
    pub wrong_rate: f64,
    pub trials: u64,
}

pub const CAPACITY_COLUMNS: [&str; 11] = [
    "n",
    "sigma_hat",
    "mu_hat",
    "snr",
    "c_hat",
    "tau",
    "delta",
    "accuracy",
    "reject_rate",
    "wrong_rate",
    "trials",
];

/// Accuracy and interference spread as a function of `n` at fixed `d`.
pub fn run_capacity_sweep(cfg: &ExperimentConfig) -> Result<(Vec<CapacityRow>, Vec<u8>)> {
    cfg.validate()?;
    if cfg.n_grid.is_empty() {
        return Err(HbfError::invalid("capacity sweep needs a non-empty n_grid"));
    }
    let mut out = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        if n == 0 {
            return Err(HbfError::invalid("capacity sweep needs n >= 1"));
        }
        let point = ExperimentConfig { n, ..cfg.clone() };
        let workload = Workload::synthetic(n, cfg.label_count);
        let index = PreparedIndex::prepare(&point, &workload, 0)?;
        let rows = run_trials(&point, &format!("capacity-{n}"), &index, &workload, QueryKind::Member)?;
        let t = rows.len() as f64;
        let frac = |c: OutcomeClass| rows.iter().filter(|r| r.outcome == c).count() as f64 / t;
        let cal = index.calibration.ok_or(HbfError::DegenerateCalibration)?;
        let mu_hat = rows.iter().filter_map(|r| r.true_score).sum::<f64>() / t;
        out.push(CapacityRow {
            n,
            sigma_hat: cal.sigma_hat,
            mu_hat,
            snr: mu_hat / cal.sigma_hat,
            c_hat: cal.c_hat(cfg.dim),
            tau: index.decoder.tau,
            delta: index.decoder.delta,
            accuracy: frac(OutcomeClass::HitCorrect),
            reject_rate: frac(OutcomeClass::Reject),
            wrong_rate: frac(OutcomeClass::HitWrong),
            trials: cfg.trials,
        });
    }
    let csv = csv_bytes(
        &CAPACITY_COLUMNS,
        out.iter().map(|r| {
            vec![
                r.n.to_string(),
                num(r.sigma_hat),
                num(r.mu_hat),
                num(r.snr),
                num(r.c_hat),
                num(r.tau),
                num(r.delta),
                num(r.accuracy),
                num(r.reject_rate),
                num(r.wrong_rate),
                r.trials.to_string(),
            ]
        }),
    )?;
    Ok((out, csv))
}

/// Measures HBF member accuracy under `cfg` and sets it beside the analytic
/// and simulated pointer-chase baseline.
pub fn run_baseline_experiment(
    cfg: &ExperimentConfig,
) -> Result<(Vec<crate::baseline::ComparisonRow>, Vec<u8>)> {
    use crate::baseline::{chase_simulate, compare_report, ChaseModel, HbfStats};
    cfg.validate()?;
    let b = cfg.baseline;
    let model = ChaseModel::new(b.p, b.ell, b.hop_time)?;
    let workload = Workload::synthetic(cfg.n, cfg.label_count);
    let index = PreparedIndex::prepare(cfg, &workload, 0)?;
    let rows = run_trials(cfg, "baseline-hbf", &index, &workload, QueryKind::Member)?;
    let correct = rows.iter().filter(|r| r.outcome == OutcomeClass::HitCorrect).count();
    let hbf = HbfStats {
        accuracy: correct as f64 / rows.len() as f64,
        rounds: 1,
        trials: cfg.trials,
        seed: cfg.master_seed,
    };
    let stats = if b.trials > 0 {
        Some(chase_simulate(&model, b.trials, derive_seed(cfg.master_seed, "baseline-chase", 0))?)
    } else {
        None
    };
    let table = compare_report(&hbf, &model, stats.as_ref());
    let csv = comparison_csv(&table)?;
    Ok((table, csv))
}

pub(crate) fn comparison_csv(rows: &[crate::baseline::ComparisonRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &crate::baseline::COMPARISON_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.system.clone(),
                num(r.p),
                r.ell.to_string(),
                num(r.hop_time),
                num(r.success_prob),
                num(r.expected_time),
                num(r.expected_time_repeat),
                num(r.measured_success),
                num(r.measured_time_mean),
                r.trials.to_string(),
                r.seed.to_string(),
            ]
        }),
    )
}

pub(crate) fn generic_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    csv_bytes(header, rows)
}
