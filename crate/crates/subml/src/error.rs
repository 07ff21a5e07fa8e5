use thiserror::Error;

/// Error type shared by all library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported order {m} for {scheme}")]
    UnsupportedOrder { scheme: &'static str, m: usize },

    #[error("pair scan cap exceeded: cardinality {cardinality} over cap {cap}")]
    CapExceeded { cardinality: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input")]
    EmptyInput,

    #[error("empty pair distance list")]
    EmptyPairs,

    #[error("objective is singular at beta = {0}")]
    SingularPoint(f64),

    #[error("target {target:.6e} is below the minimum achievable {minimum:.6e}")]
    Infeasible { target: f64, minimum: f64 },

    #[error(
        "target {target:.6e} exceeds the error-curve value {ceiling:.6e} at the bracket edge; \
         no root exists on this branch"
    )]
    TargetUnreachable { target: f64, ceiling: f64 },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sweep aborted at {snr_db} dB: {source}")]
    SweepAborted { snr_db: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
