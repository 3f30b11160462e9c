use thiserror::Error;

/// Errors raised by the differential-algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,
    #[error("expression depends on jets of order >= 1 and is not a point function of u")]
    NotAPointFunction,
    #[error("inconsistent jet substitution: {0}")]
    InconsistentJetSubstitution(String),
    #[error("leading coefficient has no {0}-th root in the rational class")]
    RootNotInClass(u32),
    #[error("insufficient precision: need coefficients down to xi^{needed}, guaranteed only down to xi^{available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("density is not conserved")]
    NotConserved,
    #[error("unsupported equation shape: {0}")]
    UnsupportedEquationShape(String),
    #[error("f must depend on u")]
    ConstantF,
    #[error("f is not a quadratic polynomial in u")]
    NotQuadratic,
    #[error("invalid evolution equation: {0}")]
    InvalidEquation(String),
    #[error("no theorem numbered {0}; expected 1, 2 or 3")]
    UnknownTheorem(u8),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
