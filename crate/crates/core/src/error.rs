use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("total dimension {requested} exceeds the configured maximum {max}")]
    Capacity { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not hermitian: max|M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary: max|U^dagger U - 1| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("non-finite amplitude encountered")]
    NonFinite,

    #[error("post-selected state is orthogonal to the initial state (|overlap| = {overlap:e}); weak value undefined")]
    OrthogonalPostSelection { overlap: f64 },

    #[error("pointer weak value undefined: amplitude c_{m} vanishes")]
    UndefinedPointerWeakValue { m: usize },

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("Fock truncation violated: population {population:e} at top level n_max = {n_max}")]
    Truncation { n_max: usize, population: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid probability {value} for outcome `{label}`")]
    InvalidProbability { label: String, value: f64 },

    #[error("g is unidentifiable at first order: Im(alpha* beta) = 0")]
    Unidentifiable,

    #[error("no first-order signal at pointer outcome m = 0 (P_w = 0)")]
    NoSignal,

    #[error("no shots in the conditioning event")]
    EmptyConditioning,

    #[error("invalid configuration:\n{}", format_config_errors(.0))]
    Config(Vec<ConfigError>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Stable machine-readable class, printed by the CLI as `error[<class>]`.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Serialization(_) => "serialization",
            Error::Capacity { .. } => "capacity",
            Error::Truncation { .. } => "truncation",
            Error::InvalidProbability { .. } => "validation",
            Error::NotHermitian { .. }
            | Error::NotUnitary { .. }
            | Error::NotNormalized { .. }
            | Error::NonFinite
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. } => "validation",
            Error::OrthogonalPostSelection { .. }
            | Error::UndefinedPointerWeakValue { .. }
            | Error::Unidentifiable
            | Error::NoSignal
            | Error::EmptyConditioning
            | Error::Precondition(_) => "precondition",
        }
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "config" => 2,
            "io" | "serialization" => 4,
            _ => 3,
        }
    }
}

/// One problem found while validating a configuration document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted key path, e.g. `sweep.points`.
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn format_config_errors(errors: &[ConfigError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
