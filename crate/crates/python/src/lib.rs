//! Python bindings: hypervector algebra, the index, calibration, bounds and
//! the pointer-chasing model.

use ::hbf::baseline::{chase_simulate, ChaseModel};
use ::hbf::bounds::{self, EvtOrder};
use ::hbf::harness::persist::{load_memory, save_memory};
use ::hbf::harness::{calibrate_decoder, Calibration as CoreCalibration};
use ::hbf::{
    build, decode, Codebook, DecodeOutcome, DecoderConfig, HbfError, HbfMemory, HyperVector,
    LabelSet, Record,
};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: HbfError) -> PyErr {
    match e {
        HbfError::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for ::hbf::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn hv(data: Vec<f64>) -> PyResult<HyperVector> {
    HyperVector::new(data).or_raise()
}

/// ±1 codeword for `item` from the codebook `namespace` ("key" or "value").
#[pyfunction]
#[pyo3(signature = (namespace, seed, dim, item))]
fn codeword(namespace: &str, seed: u64, dim: usize, item: &str) -> PyResult<Vec<f64>> {
    let cb = match namespace {
        "key" => Codebook::keys(seed, dim),
        "value" => Codebook::values(seed, dim),
        other => return Err(PyValueError::new_err(format!("unknown codebook {other:?}"))),
    }
    .or_raise()?;
    Ok(cb.vector(item.as_bytes()).or_raise()?.into_vector().into_vec())
}

/// Circular convolution (binding).
#[pyfunction]
fn convolve(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(::hbf::convolve(&hv(a)?, &hv(b)?).or_raise()?.into_vec())
}

/// Circular correlation (unbinding): `correlate(k, m)[i] = Σ_j k[j] m[j+i]`.
#[pyfunction]
fn correlate(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(::hbf::correlate(&hv(a)?, &hv(b)?).or_raise()?.into_vec())
}

#[pyfunction]
fn cosine(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    ::hbf::cosine(&hv(a)?, &hv(b)?).or_raise()
}

#[pyclass(get_all, frozen)]
struct Calibration {
    tau: f64,
    delta: f64,
    sigma_hat: f64,
    mu_hat: Option<f64>,
    evt_tau: f64,
    eps: f64,
    probes: usize,
}

impl From<CoreCalibration> for Calibration {
    fn from(c: CoreCalibration) -> Self {
        Self {
            tau: c.decoder.tau,
            delta: c.decoder.delta,
            sigma_hat: c.sigma_hat,
            mu_hat: c.mu_hat,
            evt_tau: c.evt_tau,
            eps: c.eps,
            probes: c.probes,
        }
    }
}

#[pymethods]
impl Calibration {
    fn __repr__(&self) -> String {
        format!(
            "Calibration(tau={}, delta={}, sigma_hat={}, eps={})",
            self.tau, self.delta, self.sigma_hat, self.eps
        )
    }
}

/// Decode result: `label` is None for a rejection.
#[pyclass(get_all, frozen)]
struct Answer {
    label: Option<String>,
    s1: Option<f64>,
    s2: Option<f64>,
    top_k: Vec<(String, f64)>,
}

#[pymethods]
impl Answer {
    #[getter]
    fn hit(&self) -> bool {
        self.label.is_some()
    }

    fn __repr__(&self) -> String {
        match &self.label {
            Some(l) => format!("Answer(label={l:?}, s1={:?}, s2={:?})", self.s1, self.s2),
            None => format!("Answer(BOTTOM, s1={:?}, s2={:?})", self.s1, self.s2),
        }
    }
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn label_set(mem: &HbfMemory, labels: Vec<String>) -> PyResult<LabelSet> {
    LabelSet::for_memory(mem, labels.into_iter().map(String::into_bytes).collect()).or_raise()
}

fn records(pairs: Vec<(String, String)>) -> Vec<Record> {
    pairs.into_iter().map(|(k, v)| Record::new(k, v)).collect()
}

/// A holographic memory: the superposed vector plus the seeds of its
/// codebooks.
#[pyclass]
struct Memory {
    inner: HbfMemory,
}

#[pymethods]
impl Memory {
    /// Empty memory.
    #[new]
    #[pyo3(signature = (dim, rho=1.0, key_seed=1, value_seed=2))]
    fn new(dim: usize, rho: f64, key_seed: u64, value_seed: u64) -> PyResult<Self> {
        let cfg = ::hbf::BuildConfig::new(dim, rho, key_seed, value_seed);
        Ok(Self { inner: HbfMemory::empty(&cfg).or_raise()? })
    }

    /// Builds from `(key, value)` pairs; keys must be distinct.
    #[staticmethod]
    #[pyo3(signature = (pairs, dim, rho=1.0, key_seed=1, value_seed=2))]
    fn build(
        py: Python<'_>,
        pairs: Vec<(String, String)>,
        dim: usize,
        rho: f64,
        key_seed: u64,
        value_seed: u64,
    ) -> PyResult<Self> {
        let cfg = ::hbf::BuildConfig::new(dim, rho, key_seed, value_seed);
        let recs = records(pairs);
        let inner = py.detach(|| build(&recs, &cfg)).or_raise()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self { inner: load_memory(path).or_raise()? })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        save_memory(&self.inner, path).or_raise()
    }

    fn insert(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.insert(key.as_bytes(), value.as_bytes()).or_raise()
    }

    /// Copy with gain `rho`, rescaling the stored vector to match.
    fn renormalize(&self, rho: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.renormalize(rho).or_raise()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.gain()
    }

    #[getter]
    fn item_count(&self) -> u64 {
        self.inner.item_count()
    }

    fn vector(&self) -> Vec<f64> {
        self.inner.vector().as_slice().to_vec()
    }

    /// Raw score of every label for `key`, in the order given.
    fn scores(&self, key: &str, labels: Vec<String>) -> PyResult<Vec<f64>> {
        let set = label_set(&self.inner, labels)?;
        set.raw_scores(&self.inner.correlate_query(key.as_bytes()).or_raise()?).or_raise()
    }

    /// Fits `(tau, delta)` from non-member probes and, if given, member
    /// records.
    #[pyo3(signature = (labels, members=Vec::new(), probes=500, eps=0.01, seed=1))]
    fn calibrate(
        &self,
        py: Python<'_>,
        labels: Vec<String>,
        members: Vec<(String, String)>,
        probes: usize,
        eps: f64,
        seed: u64,
    ) -> PyResult<Calibration> {
        let set = label_set(&self.inner, labels)?;
        let members = records(members);
        let cal = py
            .detach(|| calibrate_decoder(&self.inner, &set, &members, probes, eps, seed))
            .or_raise()?;
        Ok(cal.into())
    }

    /// Margin-rule decode of `key` against `labels`.
    #[pyo3(signature = (key, labels, tau, delta=0.0, top_k=2))]
    fn query(&self, key: &str, labels: Vec<String>, tau: f64, delta: f64, top_k: usize) -> PyResult<Answer> {
        let set = label_set(&self.inner, labels)?;
        let cfg = DecoderConfig::new(tau, delta, top_k).or_raise()?;
        let outcome = decode(&self.inner, key.as_bytes(), &cfg, &set).or_raise()?;
        let (s1, s2) = outcome.leading_scores();
        let label = match &outcome {
            DecodeOutcome::Hit { label, .. } => Some(text(label)),
            DecodeOutcome::Reject { .. } => None,
        };
        let top_k = outcome.top_k().iter().map(|s| (text(&s.label), s.score)).collect();
        Ok(Answer { label, s1, s2, top_k })
    }

    fn __repr__(&self) -> String {
        format!(
            "Memory(dim={}, rho={}, items={})",
            self.inner.dim(),
            self.inner.gain(),
            self.inner.item_count()
        )
    }
}

#[pyfunction]
fn fp_bound(n: usize, d: usize, tau: f64) -> f64 {
    bounds::fp_bound(n, d, tau)
}

#[pyfunction]
fn fp_threshold(n: usize, d: usize, eps: f64) -> PyResult<f64> {
    bounds::fp_threshold(n, d, eps).or_raise()
}

/// False-negative bound; `t` defaults to half the expected signal.
#[pyfunction]
#[pyo3(signature = (d, n, h=0, p_e=0.0, t=None))]
fn fn_bound(d: usize, n: usize, h: usize, p_e: f64, t: Option<f64>) -> PyResult<f64> {
    match t {
        Some(t) => bounds::fn_bound(d, h, p_e, n, t),
        None => bounds::fn_bound_default(d, h, p_e, n),
    }
    .or_raise()
}

#[pyfunction]
#[pyo3(signature = (d, h=0, p_e=0.0))]
fn signal_mean(d: usize, h: usize, p_e: f64) -> f64 {
    bounds::signal_mean(d, h, p_e)
}

/// Level exceeded by the maximum of `m` iid N(0, sigma²) with probability
/// `eps`.
#[pyfunction]
fn evt_threshold(sigma: f64, m: usize, eps: f64) -> PyResult<f64> {
    bounds::evt_threshold_exact(sigma, m, eps).or_raise()
}

/// Gumbel location `b_m` of the maximum, or the first-order `sigma sqrt(2 ln m)`
/// when `first_order` is set.
#[pyfunction]
#[pyo3(signature = (sigma, m, first_order=false))]
fn evt_location(sigma: f64, m: usize, first_order: bool) -> PyResult<f64> {
    let order = if first_order { EvtOrder::First } else { EvtOrder::Gumbel };
    bounds::evt_threshold_approx(sigma, m, order).or_raise()
}

#[pyfunction]
fn norm_cdf(x: f64) -> f64 {
    bounds::norm_cdf(x)
}

#[pyfunction]
fn inv_norm_cdf(p: f64) -> PyResult<f64> {
    bounds::inv_norm_cdf(p).or_raise()
}

/// Analytic `(success_prob, expected_time_repeat)` of an ℓ-hop chase.
#[pyfunction]
#[pyo3(signature = (p, ell, hop_time=1.0))]
fn chase_model(p: f64, ell: u32, hop_time: f64) -> PyResult<(f64, f64)> {
    let m = ChaseModel::new(p, ell, hop_time).or_raise()?;
    Ok((m.success_prob(), m.expected_time_repeat()))
}

/// Simulated `(success_rate, mean_total_time)` over `trials` lookups.
#[pyfunction]
#[pyo3(signature = (p, ell, hop_time=1.0, trials=10_000, seed=1))]
fn chase_simulation(py: Python<'_>, p: f64, ell: u32, hop_time: f64, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    let m = ChaseModel::new(p, ell, hop_time).or_raise()?;
    let s = py.detach(|| chase_simulate(&m, trials, seed)).or_raise()?;
    Ok((s.success_rate, s.mean_total_time))
}

#[pymodule]
fn hbf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Memory>()?;
    m.add_class::<Calibration>()?;
    m.add_class::<Answer>()?;
    m.add_function(wrap_pyfunction!(codeword, m)?)?;
    m.add_function(wrap_pyfunction!(convolve, m)?)?;
    m.add_function(wrap_pyfunction!(correlate, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(fp_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fp_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(fn_bound, m)?)?;
    m.add_function(wrap_pyfunction!(signal_mean, m)?)?;
    m.add_function(wrap_pyfunction!(evt_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(evt_location, m)?)?;
    m.add_function(wrap_pyfunction!(norm_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(inv_norm_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(chase_model, m)?)?;
    m.add_function(wrap_pyfunction!(chase_simulation, m)?)?;
    Ok(())
}
