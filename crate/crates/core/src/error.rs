//! Shared error type for mathematical failure modes.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty factor list")]
    EmptyFactors,
    #[error("factors are not pairwise coprime")]
    NotCoprime,
    #[error("a single non-constant factor admits no Bezout certificate")]
    DegenerateBezout,
    #[error("polynomial division by zero")]
    DivisionByZeroPoly,
    #[error("the zero homomorphism has no adapted basis; the module reduces to sl2 theory")]
    ZeroPhi,
    #[error("operation requires a nonzero vector")]
    ZeroVector,
    #[error("module elements carry different Whittaker types")]
    PhiMismatch,
    #[error("operator is not defined for this Whittaker type class")]
    WrongCase,
    #[error("reduction produced a zero scalar")]
    ReductionFailed,
    #[error("closure meets no quasi-Whittaker vector within the truncation")]
    TruncationTooSmall,
    #[error("empty factored polynomial")]
    EmptyPoly,
}

impl Error {
    /// Stable machine-readable code, used by the CLI error stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyFactors => "EmptyFactors",
            Error::NotCoprime => "NotCoprime",
            Error::DegenerateBezout => "DegenerateBezout",
            Error::DivisionByZeroPoly => "DivisionByZeroPoly",
            Error::ZeroPhi => "ZeroPhi",
            Error::ZeroVector => "ZeroVector",
            Error::PhiMismatch => "PhiMismatch",
            Error::WrongCase => "WrongCase",
            Error::ReductionFailed => "ReductionFailed",
            Error::TruncationTooSmall => "TruncationTooSmall",
            Error::EmptyPoly => "EmptyPoly",
        }
    }
}
