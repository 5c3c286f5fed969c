use thiserror::Error;

use crate::report::Witness;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("total dimension {0} exceeds the 2^31 index range")]
    IndexOverflow(u128),
    #[error("not a permutation of factor positions: {0:?}")]
    NonPermutation(Vec<usize>),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("input is not a Leibniz algebra: {0}")]
    InputNotLeibniz(Witness),
    #[error("input is not certified: {0}")]
    InputNotCertified(Witness),
    #[error("right translation is not a derivation of the bracket: {0}")]
    DerivationPreconditionFailed(Witness),
    #[error("adjoint map is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("exponential series did not converge within {0} terms")]
    SeriesNotConverged(usize),
    #[error("element is not central: {0}")]
    NotCentral(Witness),
    #[error("carrier of size {size} exceeds cap {cap}")]
    CarrierTooLarge { size: u128, cap: u128 },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("operation is not equivariant: {0}")]
    EquivarianceFailed(Witness),
    #[error("racks are not compatible: {0}")]
    CompatibilityFailed(Witness),
    #[error("coalgebra is not cocommutative")]
    NotCocommutative,
    #[error("claimed inverse does not invert: {0}")]
    InverseMismatch(String),
    #[error("group-like elements are not closed under the bracket: {0}")]
    NotClosed(Witness),
    #[error("invalid input: {0}")]
    InputInvalid(String),
    #[error("verdicts disagree: {0}")]
    VerdictDisagreement(String),
    #[error("operator does not satisfy the Yang-Baxter equation or is not invertible")]
    InputNotYbe,
    #[error("operator does not satisfy the n-Yang-Baxter equation or is not invertible")]
    InputNotNybe,
    #[error("verification dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: u128, cap: u128 },
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("not a group: {0}")]
    GroupAxiom(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown construction {0:?}")]
    UnknownConstruction(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
