use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, AlgebraError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("one-form is not closed")]
    NotClosed,
    #[error("operator is not a vector field")]
    NotVectorField,
    #[error("the zero operator has no principal symbol")]
    ZeroOperator,
    #[error("symbol order {requested} is below the operator order {order}")]
    OrderBelowDegree { requested: i64, order: u32 },
    #[error("kappa must be nonzero")]
    ZeroKappa,
    #[error("affine map has a singular linear part")]
    SingularMatrix,
    #[error("malformed affine map: {0}")]
    MalformedAffine(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameter extraction failed: {0}")]
    Extraction(String),
}
