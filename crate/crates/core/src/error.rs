use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("line {line}: word has {found} letters, header declares {expected} qubits")]
    WordLength {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndex { index: usize, n_modes: usize },

    #[error("{n} qubits exceeds the dense simulation cap of {cap}; use norm_upper_bound for norm estimates")]
    Capability { n: usize, cap: usize },

    #[error("operator is not Hermitian: {0}")]
    NonHermitian(String),

    #[error("the identity word has no circuit, it only contributes a global phase")]
    IdentityTerm,

    #[error("coupling graph is disconnected")]
    Disconnected,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, used by the CLI's JSON error output
    /// and mirrored by the FFI status codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } | Error::WordLength { .. } => "dimension",
            Error::Parse { .. } => "parse",
            Error::ModeIndex { .. } => "index",
            Error::Capability { .. } => "capability",
            Error::NonHermitian(_) => "non_hermitian",
            Error::IdentityTerm => "identity_term",
            Error::Disconnected => "disconnected",
            Error::NotNormalized(_) => "validation",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
