//! Seeded noise channels for memories and query keys.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HbfError, Result};
use crate::hypervector::{HyperVector, SignVector};
use crate::index::HbfMemory;

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A noise channel. `MemoryFlip` and `MemoryGauss` act on the stored memory,
/// `KeyHamming` and `KeyGauss` on the query key vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NoiseSpec {
    MemoryFlip(f64),
    MemoryGauss(f64),
    KeyHamming(usize),
    KeyGauss(f64),
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::MemoryFlip(p) => check_flip_rate(p),
            NoiseSpec::MemoryGauss(s) | NoiseSpec::KeyGauss(s) => check_sigma(s),
            NoiseSpec::KeyHamming(_) => Ok(()),
        }
    }

    pub fn acts_on_memory(&self) -> bool {
        matches!(self, NoiseSpec::MemoryFlip(_) | NoiseSpec::MemoryGauss(_))
    }

    /// Applies a memory channel; key channels leave the memory unchanged.
    pub fn apply_to_memory(&self, mem: &HbfMemory, seed: u64) -> Result<HbfMemory> {
        match *self {
            NoiseSpec::MemoryFlip(p) => corrupt_memory_flip(mem, p, seed),
            NoiseSpec::MemoryGauss(s) => corrupt_memory_gauss(mem, s, seed),
            _ => Ok(mem.clone()),
        }
    }

    /// Applies a key channel; memory channels leave the key unchanged.
    pub fn apply_to_key(&self, key: &HyperVector, seed: u64) -> Result<HyperVector> {
        match *self {
            NoiseSpec::KeyHamming(h) => {
                let signs = SignVector::new(key.as_slice().to_vec())?;
                Ok(perturb_key_hamming(&signs, h, seed)?.into_vector())
            }
            NoiseSpec::KeyGauss(s) => perturb_key_gauss(key, s, seed),
            _ => Ok(key.clone()),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::MemoryFlip(p) => write!(f, "mem-flip:{p}"),
            NoiseSpec::MemoryGauss(s) => write!(f, "mem-gauss:{s}"),
            NoiseSpec::KeyHamming(h) => write!(f, "key-hamming:{h}"),
            NoiseSpec::KeyGauss(s) => write!(f, "key-gauss:{s}"),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = HbfError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| HbfError::invalid(format!("noise spec {s:?} must be kind:value")))?;
        let num = |what: &str| {
            arg.trim()
                .parse::<f64>()
                .map_err(|_| HbfError::invalid(format!("bad {what} in noise spec {s:?}")))
        };
        let spec = match kind.trim() {
            "mem-flip" => NoiseSpec::MemoryFlip(num("flip rate")?),
            "mem-gauss" => NoiseSpec::MemoryGauss(num("sigma")?),
            "key-gauss" => NoiseSpec::KeyGauss(num("sigma")?),
            "key-hamming" => NoiseSpec::KeyHamming(arg.trim().parse().map_err(|_| {
                HbfError::invalid(format!("bad Hamming distance in noise spec {s:?}"))
            })?),
            other => {
                return Err(HbfError::invalid(format!(
                    "unknown noise kind {other:?} (expected mem-flip, mem-gauss, key-hamming, key-gauss)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for NoiseSpec {
    type Error = HbfError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NoiseSpec> for String {
    fn from(n: NoiseSpec) -> Self {
        n.to_string()
    }
}

fn check_flip_rate(p: f64) -> Result<()> {
    if !(0.0..0.5).contains(&p) {
        return Err(HbfError::invalid(format!(
            "flip rate must lie in [0, 0.5), got {p}"
        )));
    }
    Ok(())
}

fn check_sigma(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(HbfError::invalid(format!(
            "noise sigma must be finite and non-negative, got {s}"
        )));
    }
    Ok(())
}

/// Negates each memory coordinate independently with probability `p_e`.
pub fn corrupt_memory_flip(mem: &HbfMemory, p_e: f64, seed: u64) -> Result<HbfMemory> {
    check_flip_rate(p_e)?;
    let mut rng = rng_from(seed);
    let mut v = mem.vector().clone();
    for x in v.data_mut() {
        if rng.random_bool(p_e) {
            *x = -*x;
        }
    }
    Ok(mem.with_vector(v))
}

/// Adds i.i.d. `N(0, sigma_m²)` noise to every memory coordinate.
pub fn corrupt_memory_gauss(mem: &HbfMemory, sigma_m: f64, seed: u64) -> Result<HbfMemory> {
    check_sigma(sigma_m)?;
    if sigma_m == 0.0 {
        return Ok(mem.clone());
    }
    Ok(mem.with_vector(add_gaussian(mem.vector(), sigma_m, seed)))
}

/// Negates exactly `h` distinct, uniformly chosen coordinates, so that
/// `⟨key, result⟩ = d - 2h`.
pub fn perturb_key_hamming(key: &SignVector, h: usize, seed: u64) -> Result<SignVector> {
    let d = key.dim();
    if h > d {
        return Err(HbfError::invalid(format!(
            "Hamming distance {h} exceeds dimension {d}"
        )));
    }
    let mut out = key.clone();
    let mut rng = rng_from(seed);
    for i in sample(&mut rng, d, h) {
        out.negate_at(i);
    }
    Ok(out)
}

/// Adds i.i.d. `N(0, sigma_q²)` noise to a key embedding.
pub fn perturb_key_gauss(key: &HyperVector, sigma_q: f64, seed: u64) -> Result<HyperVector> {
    check_sigma(sigma_q)?;
    if sigma_q == 0.0 {
        return Ok(key.clone());
    }
    Ok(add_gaussian(key, sigma_q, seed))
}

fn add_gaussian(v: &HyperVector, sigma: f64, seed: u64) -> HyperVector {
    let mut rng = rng_from(seed);
    let data = v
        .as_slice()
        .iter()
        .map(|x| {
            let n: f64 = rng.sample(StandardNormal);
            x + sigma * n
        })
        .collect();
    HyperVector::from_vec_unchecked(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Codebook;
    use crate::hypervector::inner_product;
    use crate::index::{build, BuildConfig, Record};

    fn small_memory(d: usize) -> HbfMemory {
        let recs: Vec<Record> = (0..4)
            .map(|i| Record::new(format!("k{i}"), format!("v{i}")))
            .collect();
        build(&recs, &BuildConfig::new(d, 1.0, 1, 2)).unwrap()
    }

    #[test]
    fn zero_noise_is_identity() {
        let mem = small_memory(256);
        assert_eq!(corrupt_memory_flip(&mem, 0.0, 5).unwrap(), mem);
        assert_eq!(corrupt_memory_gauss(&mem, 0.0, 5).unwrap(), mem);
        let k = Codebook::keys(1, 256).unwrap().vector(b"x").unwrap();
        assert_eq!(perturb_key_hamming(&k, 0, 3).unwrap(), k);
        assert_eq!(perturb_key_gauss(k.as_vector(), 0.0, 3).unwrap(), *k.as_vector());
    }

    #[test]
    fn hamming_extremes() {
        let k = Codebook::keys(1, 300).unwrap().vector(b"x").unwrap();
        let all = perturb_key_hamming(&k, 300, 9).unwrap();
        assert_eq!(inner_product(k.as_vector(), all.as_vector()).unwrap(), -300.0);
        assert!(perturb_key_hamming(&k, 301, 9).is_err());
    }

    #[test]
    fn hamming_reference_value() {
        let k = Codebook::keys(4, 10_000).unwrap().vector(b"stored").unwrap();
        let q = perturb_key_hamming(&k, 500, 1234).unwrap();
        assert_eq!(inner_product(k.as_vector(), q.as_vector()).unwrap(), 9000.0);
    }

    #[test]
    fn flip_rate_domain() {
        let mem = small_memory(64);
        assert!(corrupt_memory_flip(&mem, 0.5, 0).is_err());
        assert!(corrupt_memory_flip(&mem, -0.1, 0).is_err());
        assert!(corrupt_memory_gauss(&mem, -1.0, 0).is_err());
        assert!(corrupt_memory_gauss(&mem, f64::INFINITY, 0).is_err());
    }

    #[test]
    fn same_seed_same_output() {
        let mem = small_memory(128);
        assert_eq!(
            corrupt_memory_flip(&mem, 0.2, 77).unwrap(),
            corrupt_memory_flip(&mem, 0.2, 77).unwrap()
        );
        assert_eq!(
            corrupt_memory_gauss(&mem, 0.7, 77).unwrap(),
            corrupt_memory_gauss(&mem, 0.7, 77).unwrap()
        );
        assert_ne!(
            corrupt_memory_gauss(&mem, 0.7, 77).unwrap(),
            corrupt_memory_gauss(&mem, 0.7, 78).unwrap()
        );
    }

    #[test]
    fn parse_and_display() {
        for s in ["mem-flip:0.01", "mem-gauss:1.5", "key-hamming:500", "key-gauss:0.25"] {
            let n: NoiseSpec = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        assert!("mem-flip:0.5".parse::<NoiseSpec>().is_err());
        assert!("bogus:1".parse::<NoiseSpec>().is_err());
        assert!("key-hamming".parse::<NoiseSpec>().is_err());
        assert!("key-hamming:-3".parse::<NoiseSpec>().is_err());
    }
}
