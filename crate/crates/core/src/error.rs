use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("columns are not orthonormal (residual {residual:e})")]
    NotIsometry { residual: f64 },

    #[error("generator vector has length {got}, expected {expected}")]
    GeneratorLength { expected: usize, got: usize },

    #[error("channel is not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("map is not completely positive (minimum Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("channel needs at least one Kraus operator")]
    EmptyKraus,

    #[error("output dimension {m} does not divide n*d = {n}*{d}")]
    Indivisible { n: usize, m: usize, d: usize },

    #[error("invalid environment spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("grouped Kraus blocks are ragged: {0}")]
    RaggedBlocks(String),

    #[error("point lies outside the tetrahedron: barycentric coordinate eps{index} = {value:e}")]
    OutsideTetrahedron { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed file: {0}")]
    Format(String),
}
