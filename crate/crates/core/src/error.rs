use thiserror::Error;

use crate::planar_map::MapError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("walk is not in B({n},{k}): {reason}")]
    NotInWalkClass {
        n: usize,
        k: usize,
        reason: &'static str,
    },

    #[error("length {length} and final height {height} violate the parity/range constraint")]
    Parity { length: u64, height: u64 },

    #[error("not a Dyck path: {0}")]
    NotDyck(&'static str),

    #[error("{what}: {requested} exceeds the exhaustive-enumeration limit {limit}")]
    SizeGuard {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("contour time {time} is outside the open interval (0, {len})")]
    TimeOutOfRange { time: usize, len: usize },

    #[error("contour times must be non-empty and strictly increasing")]
    TimesNotIncreasing,

    #[error("shape is not binary: {0}")]
    NonBinaryShape(&'static str),

    #[error("contour pair violates the consistency condition between times {t} and {t_prime}")]
    ContourInconsistent { t: usize, t_prime: usize },

    #[error("invalid contour pair: {0}")]
    InvalidContourPair(&'static str),

    #[error("vertex {vertex} carries non-positive label {label}")]
    NotPositive { vertex: usize, label: i64 },

    #[error("root label must be 1, found {0}")]
    RootLabel(i64),

    #[error("malformed blossom tree: {0}")]
    Blossom(String),

    #[error("invalid increment {0}")]
    Increment(i64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("the bijection is undefined for n = 0")]
    EmptyBijection,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("sample {index} at n = {n} (seed {seed}) failed: {message}")]
    SampleFailure {
        n: usize,
        index: usize,
        seed: u64,
        message: String,
    },

    #[error(transparent)]
    Map(#[from] MapError),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
