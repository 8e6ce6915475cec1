use thiserror::Error;

/// Errors raised across the library.
///
/// Variants are grouped by the kind of failure so that callers (the CLI in
/// particular) can map them onto a small set of exit codes with [`Error::kind`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid dimensions {0:?}: every dimension must be at least 1")]
    InvalidDims(Vec<usize>),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("need at least {required} samples, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "matrix is singular or indefinite (min eigenvalue {min_eigenvalue:e}, max eigenvalue {max_eigenvalue:e})"
    )]
    Singular {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("invalid hedge: {0}")]
    InvalidHedge(String),

    #[error("hedge system is inconsistent (residual {residual:e} above threshold {threshold:e})")]
    InconsistentHedge { residual: f64, threshold: f64 },

    #[error("malformed panel: {0}")]
    MalformedPanel(String),

    #[error("missing data at {0}")]
    MissingData(String),

    #[error("model parse error: {0}")]
    ModelParse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse failure category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Data,
    ModelParse,
    Numerical,
    Usage,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::MalformedPanel(_)
            | Error::MissingData(_)
            | Error::InsufficientSamples { .. }
            | Error::DegenerateData(_) => ErrorKind::Data,
            Error::ModelParse(_) | Error::InvalidModel(_) => ErrorKind::ModelParse,
            Error::NotPositiveSemidefinite { .. }
            | Error::Singular { .. }
            | Error::InconsistentHedge { .. } => ErrorKind::Numerical,
            Error::ModeOutOfRange { .. }
            | Error::ShapeMismatch(_)
            | Error::EmptyInput(_)
            | Error::InvalidDims(_)
            | Error::IndexOutOfRange(_)
            | Error::InvalidHedge(_) => ErrorKind::Usage,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
