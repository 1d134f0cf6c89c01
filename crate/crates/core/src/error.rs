use std::path::PathBuf;

use thiserror::Error;

use crate::spectral::Direction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("kernel length {0} is too short (need at least 2 samples)")]
    TooShort(usize),

    #[error("degenerate kernel: {0}")]
    Degenerate(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unstable mode {mode}: pole real part {real} is not negative")]
    Unstable { mode: usize, real: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("topology mismatch: {0}")]
    Topology(String),

    #[error("layer {layer} has {count} kernels per direction; use redundancy analysis for multi-kernel layers")]
    MultiKernelLayer { layer: u32, count: usize },

    #[error("redundancy analysis needs at least two kernels per direction (bundle has {0})")]
    SingleKernel(usize),

    #[error("unknown token id `{0}`")]
    UnknownToken(String),

    #[error("label `{label}` is not valid for the {task} task")]
    InvalidLabel { label: String, task: &'static str },

    #[error("missing kernel: layer {layer} {direction} index {index}")]
    MissingKernel {
        layer: u32,
        direction: Direction,
        index: u32,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error reflects bad input rather than a defect in this crate.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
