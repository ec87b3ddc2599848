//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hbf::baseline::{chase_simulate, ChaseModel};
use hbf::bounds::{
    evt_threshold_approx, evt_threshold_exact, fp_bound, fp_threshold, inv_norm_cdf, signal_mean,
    EvtOrder,
};
use hbf::harness::config::{DecoderChoice, ExperimentConfig};
use hbf::harness::persist::{decode_memory, encode_memory, load_memory, save_memory};
use hbf::harness::{
    run_amplify_experiment, run_baseline_experiment, run_capacity_sweep, run_fn_experiment,
    run_fp_experiment,
};
use hbf::noise::perturb_key_hamming;
use hbf::{
    build, convolve_fft, convolve_naive, correlate_fft, correlate_naive, inner_product, BuildConfig,
    HbfError, HyperVector, NoiseSpec, Record, SignVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> HyperVector {
    HyperVector::new((0..d).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

fn max_abs_diff(a: &HyperVector, b: &HyperVector) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for d in [256usize, 1024, 4096] {
        let err = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(d as u64 * 100_000 + i);
                let (a, b) = (gaussian(&mut rng, d), gaussian(&mut rng, d));
                let c = max_abs_diff(&convolve_fft(&a, &b).unwrap(), &convolve_naive(&a, &b).unwrap());
                let r = max_abs_diff(&correlate_fft(&a, &b).unwrap(), &correlate_naive(&a, &b).unwrap());
                c.max(r)
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-6 && elapsed < Duration::from_secs(30),
        format!("max error {worst:.3e} over 3x1000 pairs in {:.1}s", elapsed.as_secs_f64()),
    )
}

fn worked_example() -> Verdict {
    let a = signal_mean(10_000, 500, 0.01);
    let b = signal_mean(10_000, 1000, 0.1);
    verdict(a == 8820.0 && b == 6400.0, format!("signal_mean = {a}, {b}"))
}

fn hamming_exactness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    for case in 0..100u64 {
        let d = rng.random_range(2..=8192usize);
        let h = rng.random_range(0..=d);
        let k = SignVector::from_bits((0..d).map(|_| rng.random::<bool>())).unwrap();
        let kt = perturb_key_hamming(&k, h, case).unwrap();
        let ip = inner_product(k.as_vector(), kt.as_vector()).unwrap();
        if ip != d as f64 - 2.0 * h as f64 {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{bad}/100 cases differ from d - 2H"))
}

fn retrieval_at_scale() -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        dim: 4096,
        n: 1000,
        label_count: 1000,
        trials: 1000,
        master_seed: 4,
        ..Default::default()
    };
    let s = run_fn_experiment(&cfg).unwrap().summary;
    let elapsed = start.elapsed();
    verdict(
        s.accuracy >= 0.999 && elapsed < Duration::from_secs(120),
        format!(
            "accuracy {} (reject {}, wrong {}), measured snr {:.2}, {:.1}s",
            s.accuracy,
            s.reject_rate,
            s.wrong_rate,
            s.snr_measured.unwrap_or(f64::NAN),
            elapsed.as_secs_f64()
        ),
    )
}

fn fp_control() -> Verdict {
    let cfg = ExperimentConfig {
        dim: 4096,
        n: 100,
        label_count: 100,
        trials: 10_000,
        decoder: DecoderChoice::Auto { eps: 0.01 },
        master_seed: 5,
        ..Default::default()
    };
    let s = run_fp_experiment(&cfg).unwrap().summary;
    verdict(
        s.fp_rate <= 0.02,
        format!("non-member trigger rate {} over {} queries", s.fp_rate, s.trials),
    )
}

fn fn_robustness() -> Verdict {
    let d = 4096;
    let h = (0.05 * d as f64).round() as usize;
    let cfg = ExperimentConfig {
        dim: d,
        n: 100,
        label_count: 100,
        trials: 1000,
        noise: vec![NoiseSpec::KeyHamming(h), NoiseSpec::MemoryFlip(0.01)],
        master_seed: 6,
        ..Default::default()
    };
    let s = run_fn_experiment(&cfg).unwrap().summary;
    verdict(
        s.accuracy >= 0.99,
        format!(
            "H={h}, p_e=0.01: accuracy {} (reject {}, wrong {}), measured snr {:.2}",
            s.accuracy,
            s.reject_rate,
            s.wrong_rate,
            s.snr_measured.unwrap_or(f64::NAN)
        ),
    )
}

fn evt_match() -> Verdict {
    let (m, eps, trials) = (1000usize, 0.05, 10_000u64);
    let t = evt_threshold_exact(1.0, m, eps).unwrap();
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(7_000_000 + i);
            let max = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).fold(f64::MIN, f64::max);
            u64::from(max > t)
        })
        .sum();
    let rate = hits as f64 / trials as f64;
    let slack = 3.0 * (eps * (1.0 - eps) / trials as f64).sqrt();
    let gaps: Vec<f64> = [100usize, 1000, 10_000]
        .iter()
        .map(|&m| {
            (evt_threshold_approx(1.0, m, EvtOrder::First).unwrap() - evt_threshold_exact(1.0, m, eps).unwrap())
                .abs()
        })
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    verdict(
        (rate - eps).abs() <= slack && decreasing,
        format!(
            "exceedance {rate} vs 0.05 ± {slack:.4}; first-order gaps {:.4}, {:.4}, {:.4}",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn bounds_arithmetic() -> Verdict {
    let tau = fp_threshold(100, 10_000, 0.01).unwrap();
    let z = inv_norm_cdf(0.975).unwrap();
    let back = fp_bound(100, 10_000, tau);
    let rel = (back - 0.01).abs() / 0.01;
    verdict(
        (tau - 429.193).abs() <= 1e-3 && (z - 1.959964).abs() <= 1e-5 && rel <= 1e-12,
        format!("tau {tau:.6}, inv_norm_cdf(0.975) {z:.7}, round-trip rel err {rel:.1e}"),
    )
}

fn baseline_agreement() -> Verdict {
    let model = ChaseModel::new(0.9, 10, 1.0).unwrap();
    let s = chase_simulate(&model, 100_000, 9).unwrap();
    let p = model.success_prob();
    let se_p = (p * (1.0 - p) / s.trials as f64).sqrt();
    let t = model.expected_time_repeat();
    let ok_p = (s.success_rate - p).abs() <= 3.0 * se_p;
    let ok_t = (s.mean_total_time - t).abs() <= 3.0 * s.total_time_std_err;
    verdict(
        ok_p && ok_t,
        format!(
            "success {} vs {p:.5} (3se {:.4}); time {:.3} vs {t:.3} (3se {:.3})",
            s.success_rate,
            3.0 * se_p,
            s.mean_total_time,
            3.0 * s.total_time_std_err
        ),
    )
}

fn amplification() -> Verdict {
    let cfg = ExperimentConfig {
        dim: 1024,
        n: 50,
        label_count: 50,
        trials: 1000,
        replicas: 3,
        master_seed: 10,
        ..Default::default()
    };
    let (s, _) = run_amplify_experiment(&cfg).unwrap();
    let stressed = (0.05..=0.3).contains(&s.single_error_rate);
    verdict(
        stressed && s.improved,
        format!(
            "single error {} -> voted {} (fixed {}, broken {}, McNemar z {:.2})",
            s.single_error_rate, s.voted_error_rate, s.fixed, s.broken, s.mcnemar_z
        ),
    )
}

fn persistence() -> Verdict {
    let recs: Vec<Record> = (0..20).map(|i| Record::new(format!("k{i}"), format!("v{}", i % 3))).collect();
    let mem = build(&recs, &BuildConfig::new(512, 0.25, 11, 12)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.hbf");
    save_memory(&mem, &path).unwrap();
    let loaded = load_memory(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let identical = loaded == mem && encode_memory(&loaded) == bytes;

    let mut magic = bytes.clone();
    magic[1] ^= 0xFF;
    let mut version = bytes.clone();
    version[4] = 9;
    let truncated = &bytes[..bytes.len() / 2];
    let classes = [
        matches!(decode_memory(&magic), Err(HbfError::BadMagic { .. })),
        matches!(decode_memory(&version), Err(HbfError::VersionMismatch { .. })),
        matches!(decode_memory(truncated), Err(HbfError::Truncated { .. })),
    ];
    verdict(
        identical && classes.iter().all(|&c| c),
        format!("round-trip identical: {identical}; bad-magic/version/truncated classes: {classes:?}"),
    )
}

fn determinism() -> Verdict {
    let cfg = ExperimentConfig {
        dim: 512,
        n: 40,
        label_count: 20,
        trials: 300,
        noise: vec![NoiseSpec::KeyHamming(30), NoiseSpec::MemoryFlip(0.02)],
        n_grid: vec![5, 40],
        replicas: 3,
        master_seed: 12,
        baseline: hbf::harness::BaselineConfig { trials: 2000, ..Default::default() },
        ..Default::default()
    };
    let runs = |c: &ExperimentConfig| -> Vec<Vec<u8>> {
        vec![
            run_fp_experiment(c).unwrap().csv,
            run_fn_experiment(c).unwrap().csv,
            run_capacity_sweep(c).unwrap().1,
            run_baseline_experiment(c).unwrap().1,
            run_amplify_experiment(c).unwrap().1,
        ]
    };
    let (a, b) = (runs(&cfg), runs(&cfg));
    let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    verdict(same == a.len(), format!("{same}/{} experiment CSVs byte-identical", a.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("worked-example fidelity", worked_example),
        ("Hamming exactness", hamming_exactness),
        ("retrieval at scale", retrieval_at_scale),
        ("FP control", fp_control),
        ("FN robustness", fn_robustness),
        ("EVT empirical match", evt_match),
        ("bounds arithmetic", bounds_arithmetic),
        ("baseline agreement", baseline_agreement),
        ("amplification", amplification),
        ("persistence", persistence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
