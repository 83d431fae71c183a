use num_rational::BigRational;
use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A degree or index exceeded the configured guard.
    #[error("degree {requested} exceeds guard {guard}")]
    DegreeTooLarge { requested: u32, guard: u32 },

    /// A rational has no square root in Q(i, sqrt2).
    #[error("{0} has no square root in Q(i, sqrt2)")]
    NotRepresentable(BigRational),

    /// Attempt to invert the zero scalar.
    #[error("division by zero scalar")]
    DivisionByZero,

    /// Unrecognized operator symbol.
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    /// The two arguments of a two-variable Hermite expansion must commute.
    #[error("operator arguments do not commute: cross commutator is {0}")]
    NonCommutingArguments(String),

    /// Quadrature node count too small for the integrand degree.
    #[error("integrand degree {degree} exceeds quadrature exactness bound {bound}")]
    QuadratureDegree { degree: u32, bound: u32 },

    /// Unrecognized identity name.
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    /// Expression parse failure with byte position and expectation.
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    /// A Hermite polynomial was applied to something that is not a linear
    /// combination of mode operators.
    #[error("Hermite argument is not a linear form: {0}")]
    NonLinearHermiteArgument(String),

    /// A parameter value is outside the domain an operation accepts.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
