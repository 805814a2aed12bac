use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: only 1 and 2 are supported")]
    InvalidDimension(usize),
    #[error("grid size {0} is not a power of two >= 8")]
    NotPowerOfTwo(usize),
    #[error("box length must be positive, got {0}")]
    NonPositiveBox(f64),
    #[error("exponential weight overflow: sigma * max|xi|_1 = {exponent:.3} exceeds the guard ln(1e120)")]
    OverflowGuard { exponent: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite values after step {step}; reduce dt")]
    NonFinite { step: usize },
    #[error("picard iteration did not converge in {iterations} iterations (residual {residual:.3e}); dt too large")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("dt = {dt:.3e} exceeds the contraction threshold {dt_max:.3e}")]
    AboveContractionThreshold { dt: f64, dt_max: f64 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("field is identically zero")]
    ZeroField,
    #[error("empty time interval [{0}, {1})")]
    EmptyInterval(f64, f64),
    #[error("estimate {id} expects {expected} input fields, got {got}")]
    ArityMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("every sample in the batch has a zero right-hand side")]
    AllRhsZero,
    #[error("grid mismatch between fields")]
    GridMismatch,
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("result table is empty")]
    EmptyTable,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
