use thiserror::Error;

/// Every failure the solver suite can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty facet family: {0}")]
    EmptyFacets(&'static str),

    #[error("coercivity violation: {0}")]
    Coercivity(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("profile is not quasiconvex: {0}")]
    Classification(String),

    #[error("degenerate interface pair: b1 = b2 = {0}")]
    DegeneratePair(f64),

    #[error("interface pair does not straddle zero: b1 = {b1}, b2 = {b2}")]
    NotStraddling { b1: f64, b2: f64 },

    #[error("inadmissible control: {0}")]
    Admissibility(String),

    #[error("trajectory spans [0, {available}] but t = {requested} was requested")]
    Span { available: f64, requested: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid value for `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("iteration did not converge within {iterations} iterations (last change {residual:e})")]
    Iteration { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }
}
