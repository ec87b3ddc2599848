//! Binary index files.
//!
//! Layout, all little-endian:
//!
//! | offset | size  | field            |
//! |--------|-------|------------------|
//! | 0      | 4     | magic `"HBF1"`   |
//! | 4      | 4     | version (u32 = 1)|
//! | 8      | 8     | d (u64)          |
//! | 16     | 8     | gain ρ (f64)     |
//! | 24     | 8     | item count (u64) |
//! | 32     | 8     | key seed (u64)   |
//! | 40     | 8     | value seed (u64) |
//! | 48     | 8·d   | coordinates (f64)|

use std::fs;
use std::path::Path;

use crate::error::{HbfError, Result};
use crate::hypervector::HyperVector;
use crate::index::HbfMemory;

pub const MAGIC: [u8; 4] = *b"HBF1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

pub fn encode_memory(mem: &HbfMemory) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * mem.dim());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(mem.dim() as u64).to_le_bytes());
    out.extend_from_slice(&mem.gain().to_le_bytes());
    out.extend_from_slice(&mem.item_count().to_le_bytes());
    out.extend_from_slice(&mem.key_seed().to_le_bytes());
    out.extend_from_slice(&mem.value_seed().to_le_bytes());
    for x in mem.vector().as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

fn u64_at(bytes: &[u8], off: usize) -> u64 {
    u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap())
}

pub fn decode_memory(bytes: &[u8]) -> Result<HbfMemory> {
    let found = bytes.len() as u64;
    if bytes.len() < 4 {
        return Err(HbfError::Truncated {
            expected: HEADER_LEN as u64,
            found,
        });
    }
    if bytes[..4] != MAGIC {
        return Err(HbfError::BadMagic {
            found: bytes[..4].try_into().unwrap(),
        });
    }
    if bytes.len() < 8 {
        return Err(HbfError::Truncated {
            expected: HEADER_LEN as u64,
            found,
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(HbfError::VersionMismatch {
            found: version,
            expected: VERSION,
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(HbfError::Truncated {
            expected: HEADER_LEN as u64,
            found,
        });
    }
    let d = u64_at(bytes, 8);
    let gain = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let item_count = u64_at(bytes, 24);
    let key_seed = u64_at(bytes, 32);
    let value_seed = u64_at(bytes, 40);

    let expected = d
        .checked_mul(8)
        .and_then(|b| b.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| HbfError::Format(format!("dimension {d} is too large")))?;
    if found < expected {
        return Err(HbfError::Truncated { expected, found });
    }
    if found > expected {
        return Err(HbfError::Format(format!(
            "{} trailing bytes after the coordinate array",
            found - expected
        )));
    }
    let coords = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let vector = HyperVector::new(coords).map_err(|e| HbfError::Format(e.to_string()))?;
    HbfMemory::from_parts(vector, gain, item_count, key_seed, value_seed)
        .map_err(|e| HbfError::Format(e.to_string()))
}

pub fn save_memory(mem: &HbfMemory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_memory(mem)).map_err(|e| HbfError::io(path, e))
}

pub fn load_memory(path: impl AsRef<Path>) -> Result<HbfMemory> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HbfError::io(path, e))?;
    decode_memory(&bytes)
}
