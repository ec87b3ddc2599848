//! Holographic Bloom filter.
//!
//! Key/value pairs are bound by circular convolution of pseudorandom ±1
//! hypervectors and superposed into a single real memory vector. A query
//! correlates the memory with the key vector, scores the result against the
//! value codebook, and accepts the best label only when it clears an
//! absolute threshold and beats the runner-up by a margin.

pub mod baseline;
pub mod bounds;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod fft;
pub mod harness;
pub mod hypervector;
pub mod index;
pub mod noise;
pub mod seeds;

pub use codebook::{codebook_vector, Codebook};
pub use error::{HbfError, Result};
pub use hypervector::{
    convolve, convolve_fft, convolve_naive, correlate, correlate_fft, correlate_naive, cosine,
    inner_product, HyperVector, SignVector,
};
pub use index::{
    build, decode, decode_vector, score_codebook, BuildConfig, DecodeOutcome, DecoderConfig,
    HbfMemory, LabelSet, Record, ScoredLabel,
};
pub use noise::NoiseSpec;
