use std::path::PathBuf;

/// Errors raised by tensor algebra, regularization, solvers and imaging.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("size guard exceeded: {what} needs {needed} rows, cap is {cap}")]
    SizeGuard {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("zero tensor where a nonzero one is required ({0})")]
    ZeroTensor(&'static str),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("GCV is undefined at lambda = 0 with a zero singular value")]
    GcvDivisionHazard,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported blur model: {0}")]
    UnsupportedModel(String),

    #[error("solver aborted: {0}")]
    SolverAbort(String),

    #[error("bad tensor container: {0}")]
    Format(String),

    #[error("image error for {path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(op: &'static str, detail: impl Into<String>) -> Error {
    Error::DimensionMismatch {
        op,
        detail: detail.into(),
    }
}
