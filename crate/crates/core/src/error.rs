use thiserror::Error;

/// Errors produced by state construction, channel application, and
/// reconstruction routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock index {n} exceeds truncation {max}")]
    Truncation { n: usize, max: usize },

    #[error("{what} mismatch: {left} vs {right}")]
    Mismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("{param} = {value} outside {bounds}")]
    Domain {
        param: &'static str,
        value: f64,
        bounds: &'static str,
    },

    #[error("heralding projection annihilated the state (weight {weight:.3e})")]
    DegenerateHerald { weight: f64 },

    #[error("degenerate state construction: {0}")]
    DegenerateState(&'static str),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix has negligible trace ({0:.3e})")]
    ZeroTrace(f64),

    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
