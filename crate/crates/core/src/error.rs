use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit count {len} is not a multiple of {bits_per_symbol} bits per symbol")]
    BitCount { len: usize, bits_per_symbol: usize },

    #[error("coded stream has odd length {0}")]
    OddCodedLength(usize),

    #[error("coded stream of length {0} is shorter than the encoder tail")]
    ShortCodedStream(usize),

    #[error("payload has {got} bits, frame needs {expected}")]
    PayloadSize { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid channel profile: {0}")]
    Profile(String),

    #[error("invalid mobility configuration: {0}")]
    Mobility(String),

    #[error("preamble entry at subcarrier {0} is zero")]
    ZeroPreamble(usize),

    #[error("invalid estimator parameter: {0}")]
    Parameter(String),

    #[error("missing model: {0}")]
    MissingModel(String),

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("symbol index must be at least 1, got {0}")]
    SymbolIndex(u64),

    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize, loss: f64 },

    #[error("model file: {0}")]
    CorruptModel(String),

    #[error("model does not fit: {0}")]
    ModelShape(String),

    #[error("model file version {found}, this build reads version {expected}")]
    ModelVersion { expected: u32, found: u32 },

    #[error("dataset file: {0}")]
    CorruptDataset(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 for model problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingModel(_)
            | Error::CorruptModel(_)
            | Error::ModelVersion { .. }
            | Error::ModelShape(_)
            | Error::NonFiniteLoss { .. } => 3,
            Error::Config(_)
            | Error::Profile(_)
            | Error::Mobility(_)
            | Error::UnknownEstimator(_)
            | Error::Parameter(_) => 2,
            _ => 1,
        }
    }
}
