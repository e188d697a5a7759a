use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("denominator vanishes at the origin; F is not analytic there")]
    NotAnalyticAtOrigin,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("invalid exponent at offset {offset}: {message}")]
    BadExponent { offset: usize, message: String },

    #[error(
        "denominator factors do not multiply to the denominator: coefficient of {monomial} is {product} in the product but {denominator} in the denominator"
    )]
    FactorMismatch {
        monomial: String,
        product: String,
        denominator: String,
    },

    #[error("{location}: {message}")]
    Schema { location: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("the point does not lie on the singular variety (H = {value})")]
    NotOnVariety { value: String },

    #[error(
        "factor {index} has vanishing derivative in the last variable at the point; permute the variables"
    )]
    NotSolvable { index: usize },

    #[error("(n+1)-st derivative of H in the last variable vanishes; multiplicity is inconsistent")]
    InconsistentMultiplicity,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("direction {0} lies outside the cone")]
    OutsideCone(String),

    #[error("boundary direction unsupported: {0}")]
    BoundaryUnsupported(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("exact and floating-point rank disagree (exact {exact}, numeric {numeric})")]
    RankDisagreement { exact: usize, numeric: usize },

    #[error("oracle box too small: need {needed:?}, have {have:?}")]
    BoxTooSmall { needed: Vec<u32>, have: Vec<u32> },

    #[error("numerical procedure did not converge: {0}")]
    NonConvergence(String),

    #[error("the point is not strictly minimal: the variety meets the closed polydisk at {witness}")]
    NotMinimal { witness: String },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Unsupported,
    Minimality,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DimensionMismatch { .. }
            | Error::NotAnalyticAtOrigin
            | Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::BadExponent { .. }
            | Error::FactorMismatch { .. }
            | Error::Schema { .. }
            | Error::Io { .. }
            | Error::Invalid(_)
            | Error::NotOnVariety { .. } => ErrorKind::Input,
            Error::NotSolvable { .. }
            | Error::InconsistentMultiplicity
            | Error::Unsupported(_)
            | Error::OutsideCone(_)
            | Error::BoundaryUnsupported(_)
            | Error::Singular(_)
            | Error::BoxTooSmall { .. } => ErrorKind::Unsupported,
            Error::NotMinimal { .. } => ErrorKind::Minimality,
            Error::RankDisagreement { .. } | Error::NonConvergence(_) => ErrorKind::Internal,
        }
    }
}
