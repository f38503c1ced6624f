use thiserror::Error;

/// Errors raised by the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("kernel nesting depth exceeds 1: `{0}` has a kernel inside a kernel argument")]
    KernelDepthExceeded(String),

    #[error("jet order {order} exceeds the configured cap {cap}")]
    MaxOrderExceeded { order: usize, cap: usize },

    #[error("no antiderivative in the expression class for `{0}`")]
    NonIntegrableKernel(String),

    #[error("cannot divide by `{0}`: divisor must be a single monomial without sin/cos factors")]
    NonMonomialDivisor(String),

    #[error("no numeric value bound for `{0}`")]
    Unbound(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("interior product of a 0-form")]
    DegreeZero,

    #[error("invalid vector field: {0}")]
    InvalidVectorField(String),

    #[error("source form is not locally variational (Helmholtz residuals nonzero)")]
    NotLocallyVariational,

    #[error("form is not d_H-closed: {0}")]
    NotClosed(String),

    #[error("no solution of d_H(unknown) = target within the ansatz ({0} unknowns)")]
    NoSolution(usize),

    #[error("jet order {0} is above the supported maximum of 2 for momenta")]
    OrderTooHigh(usize),

    #[error("the local Lagrangian does not reproduce the source form")]
    InconsistentPair,

    #[error("equation {0} cannot be solved for a leading derivative")]
    NotSolvableForLeading(usize),

    #[error("generalized symmetry certificate missing: {0}")]
    MissingCertificate(String),

    #[error("cochain has no value on `{0}`")]
    TransitionMissing(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("vector field is not global on the cover: {0}")]
    FieldNotGlobal(String),

    #[error("expected a function of base and fiber coordinates only, found `{0}`")]
    NotProjectable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
