use alloc::string::String;

/// Errors raised by the operator algebra, the prediction map and the
/// consistency checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("matrix data of length {len} is not square")]
    NotSquare { len: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max entrywise deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },

    #[error("malformed spectral decomposition: cumulative weight {total} < 1")]
    MalformedDecomposition { total: f64 },

    #[error("{value} is not an eigenvalue branch of the observable")]
    NotAnEigenvalue { value: f64 },

    #[error("collapse onto branch {value} with probability {probability:e}")]
    ZeroProbabilityCollapse { value: f64, probability: f64 },

    #[error("hidden variable {c} outside the open interval (0, 1)")]
    HiddenOutOfRange { c: f64 },

    #[error("injected hidden-variable sequence exhausted")]
    HiddenExhausted,

    #[error("expression has no leaves")]
    EmptyExpression,

    #[error("leaf {0} is not part of the expression")]
    UnknownLeaf(usize),

    #[error("leaves {first} and {second} do not commute (commutator norm {norm:e})")]
    NonCommutingLeaves { first: usize, second: usize, norm: f64 },

    #[error("evaluated expression is not Hermitian (max entrywise deviation {deviation:e})")]
    NonHermitianExpression { deviation: f64 },

    #[error("no value supplied for leaf {0}")]
    MissingLeafValue(usize),

    #[error("complex scale factor {re}{im:+}i cannot be evaluated over the reals")]
    ComplexScale { re: f64, im: f64 },

    #[error("invalid leaf permutation {0}")]
    InvalidPermutation(String),

    #[error("state is not an eigenvector of the evaluated expression (residual {residual:e})")]
    NotAnEigenstate { residual: f64 },

    #[error("product operator is not proportional to the identity (deviation {deviation:e})")]
    NotScalarIdentity { deviation: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
