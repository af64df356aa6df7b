//! Error type shared by every module in the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A state became non-finite during integration.
    #[error("integration fault at t = {t}: state is non-finite")]
    IntegrationFault { t: f64 },

    /// An ODE coefficient denominator (R_mem * C product) hit zero or below.
    #[error("singular coefficient at t = {t}: {detail}")]
    SingularCoefficient { t: f64, detail: String },

    /// An operation was given an empty series.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A series is too short for the requested stencil or fit.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Matrix dimensions do not match the operation's contract.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// Per-step trace drift exceeded tolerance before renormalization.
    #[error(
        "trace drift {drift:.3e} at t = {t} exceeds {tol:.1e}; reduce the step size below dt = {dt:.3e}"
    )]
    StepSize { t: f64, dt: f64, drift: f64, tol: f64 },

    /// Transfer-tensor propagation was given fewer history points than the
    /// memory depth.
    #[error("insufficient history: memory depth {depth} requires {depth} states, got {got}")]
    InsufficientHistory { depth: usize, got: usize },

    /// Log-decay fit found a non-decaying envelope.
    #[error("no decay: fitted slope {slope:.3e} is not negative")]
    NoDecay { slope: f64 },

    /// Log-decay fit found too few envelope peaks.
    #[error("insufficient peaks: need at least {needed}, found {got}")]
    InsufficientPeaks { needed: usize, got: usize },

    /// Cross-correlation of a zero-variance signal is undefined.
    #[error("undefined correlation: input has zero variance")]
    UndefinedCorrelation,

    /// g1 normalization is undefined when the population at tau = 0 is zero.
    /// The raw correlation values are carried so callers can still use them.
    #[error("undefined normalization: <sigma^dagger sigma> = 0 at tau = 0")]
    UndefinedNormalization { raw: Vec<Complex64> },

    /// A series claimed as uniformly sampled is not.
    #[error("non-uniform sampling: step at index {index} deviates by {deviation:.3e}")]
    NonUniformSampling { index: usize, deviation: f64 },

    /// A configuration value violates a module invariant.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    /// Strict config parsing rejected a key.
    #[error("unknown key `{key}` at `{path}`{}", suggestion.as_ref().map(|s| format!("; nearest valid key is `{s}`")).unwrap_or_default())]
    UnknownKey {
        path: String,
        key: String,
        suggestion: Option<String>,
    },

    /// A matrix failed the density-matrix invariants (Hermiticity, unit
    /// trace, positivity).
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// A pipeline stage failed; carries the stage name for the manifest.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
