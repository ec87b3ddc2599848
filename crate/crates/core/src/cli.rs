//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 data or format error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bounds::{
    evt_threshold_approx, evt_threshold_exact, fn_bound, fp_bound, fp_threshold, inv_norm_cdf,
    margin_failure_bound, signal_mean, EvtOrder,
};
use crate::error::{HbfError, Result};
use crate::harness::calibrate::calibrate_decoder;
use crate::harness::config::{DecoderChoice, ExperimentConfig, GainChoice};
use crate::harness::experiment::{
    run_baseline_experiment, run_capacity_sweep, run_fn_experiment, run_fp_experiment, Summary,
};
use crate::harness::persist::{load_memory, save_memory};
use crate::harness::records::{
    decoder_path, labels_path, read_decoder, read_labels, read_records, write_decoder, write_labels,
};
use crate::harness::amplify::run_amplify_experiment;
use crate::index::{build, decode_vector, BuildConfig, DecodeOutcome, DecoderConfig, LabelSet};
use crate::noise::NoiseSpec;
use crate::seeds::derive_seed;

#[derive(Debug, Parser)]
#[command(name = "hbf", version, about = "Holographic Bloom filter index and measurement harness")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an index from a key<TAB>value file.
    Build(BuildArgs),
    /// Superpose more records onto an existing index.
    Insert(InsertArgs),
    /// Decode the value stored under a key.
    Query(QueryArgs),
    /// Fit decoder thresholds for an index and store them beside it.
    Calibrate(CalibrateArgs),
    /// Seeded Monte Carlo experiments writing CSV.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
    /// Evaluate the analytic bounds.
    Bounds(BoundsArgs),
    /// Compare a single memory with plurality voting over replicas.
    Amplify(ExperimentArgs),
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 4096)]
    dim: usize,
    /// Memory gain: a number or "normalized" (1/√n).
    #[arg(long, default_value = "1")]
    rho: GainChoice,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct InsertArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long, requires = "value", conflicts_with = "input")]
    key: Option<String>,
    #[arg(long, requires = "key")]
    value: Option<String>,
    /// Records file to insert instead of a single pair.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    key: String,
    /// Fixed threshold; overrides the stored decoder.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, requires = "tau")]
    delta: Option<f64>,
    /// Recalibrate at this false-positive target instead of using the stored decoder.
    #[arg(long, conflicts_with = "tau")]
    eps: Option<f64>,
    #[arg(long, default_value_t = DecoderConfig::DEFAULT_TOP_K)]
    top_k: usize,
    /// Noise applied to the query key or loaded memory, e.g. key-hamming:500.
    #[arg(long)]
    noise: Vec<NoiseSpec>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    probes: usize,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long)]
    index: PathBuf,
    /// Stored records used as member probes for the signal estimate.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    probes: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DecoderConfig::DEFAULT_TOP_K)]
    top_k: usize,
}

#[derive(Debug, Subcommand)]
enum ExperimentKind {
    /// Non-member queries against the false-positive bound.
    Fp(ExperimentArgs),
    /// Noisy member queries against the false-negative bound.
    Fn(ExperimentArgs),
    /// Accuracy and interference spread over an n grid.
    Capacity(ExperimentArgs),
    /// One-shot decode against the pointer-chasing baseline.
    Baseline(ExperimentArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// TOML manifest; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of distinct labels |Y|.
    #[arg(long)]
    labels: Option<usize>,
    #[arg(long)]
    rho: Option<GainChoice>,
    #[arg(long)]
    seed: Option<u64>,
    /// Auto-calibrate the decoder at this false-positive target.
    #[arg(long, conflicts_with = "tau")]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, requires = "tau")]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Replaces the manifest's noise list; repeatable.
    #[arg(long)]
    noise: Vec<NoiseSpec>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Add a wall-clock column to trial CSVs.
    #[arg(long)]
    timing: bool,
    /// Baseline per-hop success probability.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    ell: Option<u32>,
    /// Baseline time per hop.
    #[arg(long = "hop-time")]
    hop_time: Option<f64>,
    #[arg(long)]
    baseline_trials: Option<u64>,
    /// CSV destination; without it CSV goes to stdout and the summary to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn to_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set!(
            dim => cfg.dim,
            n => cfg.n,
            labels => cfg.label_count,
            rho => cfg.rho,
            seed => cfg.master_seed,
            trials => cfg.trials,
            probes => cfg.probe_count,
            n_grid => cfg.n_grid,
            replicas => cfg.replicas,
            p => cfg.baseline.p,
            ell => cfg.baseline.ell,
            hop_time => cfg.baseline.hop_time,
            baseline_trials => cfg.baseline.trials,
        );
        if let Some(eps) = self.eps {
            cfg.decoder = DecoderChoice::Auto { eps };
        }
        if let Some(tau) = self.tau {
            cfg.decoder = DecoderChoice::Fixed {
                tau,
                delta: self.delta.unwrap_or(0.0),
                top_k: DecoderConfig::DEFAULT_TOP_K,
            };
        }
        if !self.noise.is_empty() {
            cfg.noise = self.noise.clone();
        }
        if self.timing {
            cfg.timing = true;
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Print a CSV header and row instead of name=value lines.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    which: BoundsKind,
}

#[derive(Debug, Subcommand)]
enum BoundsKind {
    /// False-positive threshold and bound over n candidates.
    Fp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, conflicts_with = "tau", required_unless_present = "tau")]
        eps: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// False-negative bound under Hamming and flip noise.
    Fn {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        h: usize,
        #[arg(long, default_value_t = 0.0)]
        p_e: f64,
        #[arg(long)]
        n: usize,
        /// Split point; defaults to half the signal.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Margin decoder failure bound.
    Margin {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        m: usize,
    },
    /// Expected match signal.
    Signal {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        h: usize,
        #[arg(long, default_value_t = 0.0)]
        p_e: f64,
    },
    /// Gaussian-maximum thresholds.
    Evt {
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Standard normal quantile.
    Invnorm {
        #[arg(long)]
        p: f64,
    },
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        format!("{}e{}", trim(mantissa.to_string()), e)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = trim(format!("{x:.decimals$}"));
        // rounding may carry into a new digit, e.g. 9.999995 -> 10.00000
        if s.trim_start_matches('-').split('.').next().unwrap().len() > digits {
            format_sig(s.parse().unwrap(), digits)
        } else {
            s
        }
    }
}

fn put(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| HbfError::io("<stdout>", e))
}

fn name_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let values: Vec<(&str, f64)> = match args.which {
        BoundsKind::Fp { n, d, eps, tau } => {
            let tau = match (tau, eps) {
                (Some(t), _) => t,
                (None, Some(e)) => fp_threshold(n, d, e)?,
                (None, None) => unreachable!("clap requires eps or tau"),
            };
            vec![("tau", tau), ("fp_bound", fp_bound(n, d, tau))]
        }
        BoundsKind::Fn { d, h, p_e, n, t } => {
            let mu = signal_mean(d, h, p_e);
            let t = t.unwrap_or(mu / 2.0);
            vec![("mu", mu), ("t", t), ("fn_bound", fn_bound(d, h, p_e, n, t)?)]
        }
        BoundsKind::Margin { rho, d, c, m } => {
            let b = margin_failure_bound(rho, d, c, m)?;
            vec![("margin_bound", b.bound), ("tau", b.tau), ("delta", b.delta)]
        }
        BoundsKind::Signal { d, h, p_e } => vec![("mu", signal_mean(d, h, p_e))],
        BoundsKind::Evt { sigma, m, eps } => {
            let mut v = vec![
                ("evt_exact", evt_threshold_exact(sigma, m, eps)?),
                ("evt_first", evt_threshold_approx(sigma, m, EvtOrder::First)?),
            ];
            if m >= 3 {
                v.push(("evt_gumbel", evt_threshold_approx(sigma, m, EvtOrder::Gumbel)?));
            }
            v
        }
        BoundsKind::Invnorm { p } => vec![("x", inv_norm_cdf(p)?)],
    };
    let text = if args.csv {
        let header: Vec<&str> = values.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = values.iter().map(|(_, v)| format!("{v:?}")).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    } else {
        let pairs: Vec<(&str, String)> = values.iter().map(|(k, v)| (*k, format_sig(*v, 6))).collect();
        name_values(&pairs)
    };
    put(out, &text)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| HbfError::io(path, e))
}

/// CSV to the configured path with the summary on stdout, or CSV to stdout
/// with the summary on stderr.
fn emit(cfg: &ExperimentConfig, csv: &[u8], summary: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            write_file(path, csv)?;
            put(out, summary)
        }
        None => {
            out.write_all(csv).map_err(|e| HbfError::io("<stdout>", e))?;
            put(err, summary)
        }
    }
}

fn experiment(kind: &ExperimentKind, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match kind {
        ExperimentKind::Fp(a) => {
            let cfg = a.to_config()?;
            let r = run_fp_experiment(&cfg)?;
            emit(&cfg, &r.csv, &r.summary.render(), out, err)
        }
        ExperimentKind::Fn(a) => {
            let cfg = a.to_config()?;
            let r = run_fn_experiment(&cfg)?;
            emit(&cfg, &r.csv, &r.summary.render(), out, err)
        }
        ExperimentKind::Capacity(a) => {
            let cfg = a.to_config()?;
            let (rows, csv) = run_capacity_sweep(&cfg)?;
            let summary: String = rows
                .iter()
                .map(|r| {
                    format!(
                        "n={} sigma_hat={} snr={} accuracy={}\n",
                        r.n,
                        format_sig(r.sigma_hat, 6),
                        format_sig(r.snr, 6),
                        r.accuracy
                    )
                })
                .collect();
            emit(&cfg, &csv, &summary, out, err)
        }
        ExperimentKind::Baseline(a) => {
            let cfg = a.to_config()?;
            let (rows, csv) = run_baseline_experiment(&cfg)?;
            let summary: String = rows
                .iter()
                .map(|r| {
                    format!(
                        "{}: success_prob={} expected_time_repeat={} measured_success={}\n",
                        r.system,
                        format_sig(r.success_prob, 6),
                        format_sig(r.expected_time_repeat, 6),
                        format_sig(r.measured_success, 6)
                    )
                })
                .collect();
            emit(&cfg, &csv, &summary, out, err)
        }
    }
}

fn build_cmd(a: &BuildArgs, out: &mut dyn Write) -> Result<()> {
    let records = read_records(&a.input)?;
    let cfg = BuildConfig::new(
        a.dim,
        a.rho.resolve(records.len()),
        derive_seed(a.seed, "key-codebook", 0),
        derive_seed(a.seed, "value-codebook", 0),
    );
    let mem = build(&records, &cfg)?;
    save_memory(&mem, &a.out)?;
    let labels: Vec<Vec<u8>> = records.iter().map(|r| r.value.clone()).collect();
    write_labels(&labels_path(&a.out), &labels)?;
    remove_stale_decoder(&a.out)?;
    let distinct = read_labels(&labels_path(&a.out))?.len();
    put(
        out,
        &name_values(&[
            ("items", records.len().to_string()),
            ("labels", distinct.to_string()),
            ("d", a.dim.to_string()),
            ("rho", mem.gain().to_string()),
        ]),
    )
}

/// Thresholds fitted to the old contents no longer apply after a write.
fn remove_stale_decoder(index: &Path) -> Result<()> {
    let path = decoder_path(index);
    match fs::remove_file(&path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(HbfError::io(path, e)),
    }
}

fn insert_cmd(a: &InsertArgs, out: &mut dyn Write) -> Result<()> {
    let records = match (&a.key, &a.value, &a.input) {
        (Some(k), Some(v), None) => vec![crate::index::Record::new(k.as_str(), v.as_str())],
        (None, None, Some(path)) => read_records(path)?,
        _ => return Err(HbfError::invalid("insert needs --key and --value, or --input")),
    };
    let mut mem = load_memory(&a.index)?;
    for r in &records {
        mem.insert(&r.key, &r.value)?;
    }
    save_memory(&mem, &a.index)?;
    let lp = labels_path(&a.index);
    let mut labels = read_labels(&lp)?;
    labels.extend(records.iter().map(|r| r.value.clone()));
    write_labels(&lp, &labels)?;
    remove_stale_decoder(&a.index)?;
    put(
        out,
        &name_values(&[
            ("inserted", records.len().to_string()),
            ("items", mem.item_count().to_string()),
        ]),
    )
}

fn query_cmd(a: &QueryArgs, out: &mut dyn Write) -> Result<()> {
    let mut mem = load_memory(&a.index)?;
    let labels = read_labels(&labels_path(&a.index))?;
    if mem.item_count() == 0 || labels.is_empty() {
        return put(out, "BOTTOM\n");
    }
    for (i, spec) in a.noise.iter().filter(|n| n.acts_on_memory()).enumerate() {
        mem = spec.apply_to_memory(&mem, derive_seed(a.seed, "query-memory-noise", i as u64))?;
    }
    let label_set = LabelSet::for_memory(&mem, labels)?;
    let decoder = match (a.tau, a.eps) {
        (Some(tau), _) => DecoderConfig::new(tau, a.delta.unwrap_or(0.0), a.top_k)?,
        (None, None) if read_decoder(&decoder_path(&a.index))?.is_some() => {
            let stored = read_decoder(&decoder_path(&a.index))?.unwrap();
            DecoderConfig::new(stored.tau, stored.delta, a.top_k.max(stored.top_k))?
        }
        (None, eps) => {
            let cal = calibrate_decoder(&mem, &label_set, &[], a.probes, eps.unwrap_or(0.01), a.seed)?;
            DecoderConfig::new(cal.decoder.tau, cal.decoder.delta, a.top_k)?
        }
    };
    let mut k = mem.key_codebook().vector(a.key.as_bytes())?.into_vector();
    for (i, spec) in a.noise.iter().filter(|n| !n.acts_on_memory()).enumerate() {
        k = spec.apply_to_key(&k, derive_seed(a.seed, "query-key-noise", i as u64))?;
    }
    let outcome = decode_vector(&mem, &k, &decoder, &label_set)?;
    let (s1, s2) = outcome.leading_scores();
    let mut text = match &outcome {
        DecodeOutcome::Hit { label, .. } => format!("label={}\n", String::from_utf8_lossy(label)),
        DecodeOutcome::Reject { .. } => "BOTTOM\n".to_string(),
    };
    let opt = |x: Option<f64>| x.map(|v| format_sig(v, 6)).unwrap_or_default();
    text += &name_values(&[
        ("s1", opt(s1)),
        ("s2", opt(s2)),
        ("tau", format_sig(decoder.tau, 6)),
        ("delta", format_sig(decoder.delta, 6)),
    ]);
    for (i, s) in outcome.top_k().iter().enumerate() {
        text += &format!(
            "top{}={} {}\n",
            i + 1,
            String::from_utf8_lossy(&s.label),
            format_sig(s.score, 6)
        );
    }
    put(out, &text)
}

fn calibrate_cmd(a: &CalibrateArgs, out: &mut dyn Write) -> Result<()> {
    let mem = load_memory(&a.index)?;
    let labels = read_labels(&labels_path(&a.index))?;
    if labels.is_empty() {
        return Err(HbfError::EmptyMemory);
    }
    let label_set = LabelSet::for_memory(&mem, labels)?;
    let members = match &a.input {
        Some(p) => read_records(p)?,
        None => Vec::new(),
    };
    let cal = calibrate_decoder(&mem, &label_set, &members, a.probes, a.eps, a.seed)?;
    let decoder = DecoderConfig::new(cal.decoder.tau, cal.decoder.delta, a.top_k)?;
    write_decoder(&decoder_path(&a.index), &decoder)?;
    put(
        out,
        &name_values(&[
            ("tau", format_sig(decoder.tau, 6)),
            ("delta", format_sig(decoder.delta, 6)),
            ("sigma_hat", format_sig(cal.sigma_hat, 6)),
            ("mu_hat", cal.mu_hat.map(|m| format_sig(m, 6)).unwrap_or_default()),
            ("evt_tau", format_sig(cal.evt_tau, 6)),
            ("probes", cal.probes.to_string()),
        ]),
    )
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Build(a) => build_cmd(a, out),
        Command::Insert(a) => insert_cmd(a, out),
        Command::Query(a) => query_cmd(a, out),
        Command::Calibrate(a) => calibrate_cmd(a, out),
        Command::Experiment { kind } => experiment(kind, out, err),
        Command::Bounds(a) => bounds(a, out),
        Command::Amplify(a) => {
            let cfg = a.to_config()?;
            let (summary, csv) = run_amplify_experiment(&cfg)?;
            emit(&cfg, &csv, &summary.render(), out, err)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}
