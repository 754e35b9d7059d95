use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfCube { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("nonzero numerator {numerator} over zero denominator at coordinate {index}")]
    NonzeroOverZero { index: usize, numerator: f64 },

    #[error("pair is not in D_k: {0}")]
    NotInDk(String),

    #[error("tuple is not in the simplex: {0}")]
    NotInSimplex(String),

    #[error("no non-additivity witness: max |defect| {max_defect:e} below threshold {tau:e}")]
    NoWitness { max_defect: f64, tau: f64 },

    #[error("degenerate witness: |defect| {defect:e} below threshold {tau:e}")]
    DegenerateWitness { defect: f64, tau: f64 },

    #[error("tabulated function has no entry at {0:?}")]
    EvaluationOutsideTable(Vec<f64>),

    #[error("empty grid")]
    EmptyGrid,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
