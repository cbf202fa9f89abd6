use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("failed to parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("path count mismatch: {aods} AoDs but {coefficients} fading coefficients")]
    PathCountMismatch { aods: usize, coefficients: usize },
    #[error("dimension mismatch: channel has {channel} entries, beamformer has {beam}")]
    DimensionMismatch { channel: usize, beam: usize },
    #[error("interference gain requested within FDC {0}; FRBs are orthogonal inside an FDC")]
    SameFdc(usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum LbapError {
    #[error("cost matrix must be square and non-empty: got {rows} rows with {len} entries")]
    NotSquare { rows: usize, len: usize },
    #[error("cost matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("shift M = {shift} violates M + min(a, b) > 0 (min = {min})")]
    InvalidShift { shift: f64, min: f64 },
    #[error("coefficient shapes are inconsistent: {0}")]
    Shape(String),
}

#[derive(Debug, Error)]
pub enum AllocationError {
    #[error("allocation has {got} FDCs, expected {expected}")]
    FdcCount { expected: usize, got: usize },
    #[error("FDC {fdc} allocation is not a permutation of 0..{k}")]
    NotPermutation { fdc: usize, k: usize },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("exhaustive search needs (K!)^N = {required} allocations, above the cap of {cap}")]
    CapExceeded { required: f64, cap: u64 },
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Error)]
pub enum TensorIoError {
    #[error("not a gain tensor blob (bad magic)")]
    BadMagic,
    #[error("unsupported gain tensor version {0}")]
    Version(u32),
    #[error("gain tensor blob truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
