use std::fmt;

use crate::scalar::Scalar;

/// Why an expression could not be evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainErrorKind {
    DivisionByZero,
    LogNonPositive,
    FractionalPowerOfNegative,
    /// The result's binary exponent does not fit the float format.
    Overflow,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::LogNonPositive => "logarithm of a non-positive value",
            DomainErrorKind::FractionalPowerOfNegative => "fractional power of a negative value",
            DomainErrorKind::Overflow => "result outside the floating-point range",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown symbol `{name}` at position {position}")]
    UnknownSymbol { name: String, position: usize },

    #[error("domain error: {0}")]
    Domain(DomainErrorKind),

    #[error("jet division by a series with zero leading coefficient")]
    DivisionByZeroLeadingCoefficient,

    #[error("jet logarithm of a series with non-positive leading coefficient")]
    LogNonPositiveLeadingCoefficient,

    #[error("jets have different orders ({left} and {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("jets mix exact and floating-point coefficients")]
    MixedMode,

    #[error("{0} cannot be computed exactly; promote to floating point first")]
    NotExact(&'static str),

    #[error("inner series of a composition must have zero constant term")]
    CompositionConstantTerm,

    /// The derivative of the equation vanishes at the anchor, so the inverse
    /// function has no Taylor expansion there.
    #[error("{}", not_reversible_message(.round))]
    NotReversible { round: Option<usize> },

    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    NoConvergence { last: Scalar, iterations: usize },

    #[error("derivative vanished at iterate {at}")]
    DerivativeVanished { at: Scalar },

    #[error("no sign change between the bracket endpoints")]
    NoSignChange,

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn not_reversible_message(round: &Option<usize>) -> String {
    match round {
        Some(r) => format!("derivative vanishes at the anchor of round {r}; series is not reversible"),
        None => "derivative vanishes at the anchor; series is not reversible".to_string(),
    }
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownSymbol { .. } => "UnknownSymbol",
            Error::Domain(_) => "DomainError",
            Error::DivisionByZeroLeadingCoefficient => "DivisionByZeroLeadingCoefficient",
            Error::LogNonPositiveLeadingCoefficient => "LogNonPositiveLeadingCoefficient",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::MixedMode => "MixedMode",
            Error::NotExact(_) => "NotExact",
            Error::CompositionConstantTerm => "CompositionConstantTerm",
            Error::NotReversible { .. } => "NotReversible",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DerivativeVanished { .. } => "DerivativeVanished",
            Error::NoSignChange => "NoSignChange",
            Error::InvalidFamily(_) => "InvalidFamily",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

impl From<DomainErrorKind> for Error {
    fn from(kind: DomainErrorKind) -> Self {
        Error::Domain(kind)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
