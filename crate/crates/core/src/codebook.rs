//! Deterministic pseudorandom ±1 codebooks.
//!
//! A vector is derived from `(namespace, seed, key)` without storing any
//! dictionary: SHA-256 over the length-prefixed triple yields a 256-bit
//! ChaCha20 key, and the ChaCha20 keystream (a counter-mode PRF) supplies one
//! 64-bit block per 64 coordinates. Bit `j` of block `b` gives the sign of
//! coordinate `64 b + j` (set bit means +1).

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HbfError, Result};
use crate::hypervector::SignVector;

pub const KEY_NAMESPACE: &[u8] = b"key";
pub const VALUE_NAMESPACE: &[u8] = b"value";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    namespace: Vec<u8>,
    seed: u64,
    dim: usize,
}

impl Codebook {
    pub fn new(namespace: impl Into<Vec<u8>>, seed: u64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(HbfError::invalid(format!(
                "codebook dimension must be at least 2, got {dim}"
            )));
        }
        Ok(Self {
            namespace: namespace.into(),
            seed,
            dim,
        })
    }

    pub fn keys(seed: u64, dim: usize) -> Result<Self> {
        Self::new(KEY_NAMESPACE, seed, dim)
    }

    pub fn values(seed: u64, dim: usize) -> Result<Self> {
        Self::new(VALUE_NAMESPACE, seed, dim)
    }

    pub fn namespace(&self) -> &[u8] {
        &self.namespace
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The sign vector assigned to `key`.
    pub fn vector(&self, key: &[u8]) -> Result<SignVector> {
        if key.is_empty() {
            return Err(HbfError::invalid("codebook key must be non-empty"));
        }
        let mut rng = ChaCha20Rng::from_seed(self.prf_key(key));
        let mut bits = Vec::with_capacity(self.dim);
        while bits.len() < self.dim {
            let block = rng.next_u64();
            let take = (self.dim - bits.len()).min(64);
            bits.extend((0..take).map(|j| (block >> j) & 1 == 1));
        }
        SignVector::from_bits(bits)
    }

    fn prf_key(&self, key: &[u8]) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"hbf-codebook-v1");
        h.update((self.namespace.len() as u64).to_le_bytes());
        h.update(&self.namespace);
        h.update(self.seed.to_le_bytes());
        h.update((key.len() as u64).to_le_bytes());
        h.update(key);
        h.finalize().into()
    }
}

/// Free-function form of [`Codebook::vector`].
pub fn codebook_vector(cb: &Codebook, key: &[u8]) -> Result<SignVector> {
    cb.vector(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypervector::inner_product;

    #[test]
    fn deterministic_and_signed() {
        let cb = Codebook::keys(7, 1000).unwrap();
        let a = cb.vector(b"fileA").unwrap();
        let b = cb.vector(b"fileA").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 1000);
        assert_eq!(a.as_vector().norm_sq(), 1000.0);
    }

    #[test]
    fn namespaces_are_separated() {
        let k = Codebook::keys(7, 512).unwrap().vector(b"x").unwrap();
        let v = Codebook::values(7, 512).unwrap().vector(b"x").unwrap();
        assert_ne!(k, v);
    }

    #[test]
    fn seeds_disagree_in_about_half_the_coordinates() {
        let d = 4096;
        let a = Codebook::keys(1, d).unwrap().vector(b"fileA").unwrap();
        let b = Codebook::keys(2, d).unwrap().vector(b"fileA").unwrap();
        let ip = inner_product(a.as_vector(), b.as_vector()).unwrap();
        let disagreements = (d as f64 - ip) / 2.0;
        assert!((disagreements - d as f64 / 2.0).abs() <= 4.0 * (d as f64).sqrt());
    }

    #[test]
    fn rejects_empty_key_and_tiny_dim() {
        let cb = Codebook::keys(0, 16).unwrap();
        assert!(cb.vector(b"").is_err());
        assert!(Codebook::keys(0, 1).is_err());
    }

    #[test]
    fn odd_dimension_is_filled_exactly() {
        let v = Codebook::values(3, 100).unwrap().vector(b"k").unwrap();
        assert_eq!(v.dim(), 100);
    }
}
