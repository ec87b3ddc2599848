use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HbfError>;

#[derive(Debug, Error)]
pub enum HbfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not supported by the FFT kernel (power of two required)")]
    UnsupportedDimension(usize),

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("duplicate key {0:?}")]
    DuplicateKey(String),

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("memory holds no items")]
    EmptyMemory,

    #[error("degenerate calibration: impostor score spread is zero")]
    DegenerateCalibration,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic: expected \"HBF1\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("format error: {0}")]
    Format(String),
}

impl HbfError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HbfError::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HbfError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HbfError::Io { .. } => 3,
            HbfError::InvalidArgument(_) => 2,
            _ => 4,
        }
    }
}

pub(crate) fn label_text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}
