use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("entry buffer has length {len}, expected {expected}")]
    BadShape { len: usize, expected: usize },
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(&'static str),
    #[error("invalid measurement scheme: {0}")]
    InvalidScheme(&'static str),
    #[error("LG string needs n >= 3, got {0}")]
    StringTooShort(usize),
    #[error("classical enumeration supports 3 <= n <= 12, got {0}")]
    EnumerationRange(usize),
    #[error("{name} = {value} must lie in [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("postselected subspace is empty for {0}")]
    EmptyPostselection(&'static str),
    #[error(
        "degenerate postselection: controlled-gate variants keep a total weight of {weight_sum:.4} \
         (expected ~1); the gate is not separating the nuclear states"
    )]
    DegeneratePostselection { weight_sum: f64 },
    #[error("fit did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("fit is degenerate: {0}")]
    DegenerateFit(&'static str),
}
