use thiserror::Error;

use crate::expr::{DomainError, ParseError};
use crate::lineforms::{BreakdownReason, Form};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("domain error at {at}: {source}")]
    Domain { at: f64, source: DomainError },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("need at least {needed} valid points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("derivative is not strictly monotone on [{lo}, {hi}]; split the domain")]
    NonMonotoneDerivative { lo: f64, hi: f64 },
    #[error("slope {m} outside the attainable range [{lo}, {hi}]")]
    SlopeOutOfRange { m: f64, lo: f64, hi: f64 },
    #[error("every parameter value is degenerate (m'(k) = 0): parallel lines have no envelope")]
    AllPointsDegenerate,
    #[error("f is linear on the interval, so there is no singular solution")]
    LinearClairautFunction,
    #[error("function is neither convex nor concave on the interval")]
    MixedConvexity,
    #[error("input is not convex: {0}")]
    NonConvex(String),
    #[error("second derivative vanishes at {x} (inflection point)")]
    Inflection { x: f64 },
    #[error("line cannot be written in {form} form: {reason}")]
    Breakdown { form: Form, reason: BreakdownReason },
    #[error("pole is the conic's center; its polar is the line at infinity")]
    DegeneratePolar,
    #[error("pole lies at infinity")]
    PoleAtInfinity,
    #[error("conic is degenerate (determinant ~ 0)")]
    SingularConic,
    #[error("chord parameter equals the slope m; the chord is undefined")]
    ChordParameterEqualsSlope,
    #[error("chords are parallel and do not intersect")]
    ParallelChords,
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("{x} lies outside the domain")]
    OutsideDomain { x: f64 },
    #[error("neither function lies below the other on the whole grid")]
    NotOrdered,
}

impl Error {
    /// Stable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Domain { .. } => "DomainError",
            Error::InvalidInput(_) => "InvalidInput",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::NonMonotoneDerivative { .. } => "NonMonotoneDerivative",
            Error::SlopeOutOfRange { .. } => "SlopeOutOfRange",
            Error::AllPointsDegenerate => "AllPointsDegenerate",
            Error::LinearClairautFunction => "LinearClairautFunction",
            Error::MixedConvexity => "MixedConvexity",
            Error::NonConvex(_) => "NonConvex",
            Error::Inflection { .. } => "Inflection",
            Error::Breakdown { .. } => "Breakdown",
            Error::DegeneratePolar => "DegeneratePolar",
            Error::PoleAtInfinity => "PoleAtInfinity",
            Error::SingularConic => "SingularConic",
            Error::ChordParameterEqualsSlope => "ChordParameterEqualsSlope",
            Error::ParallelChords => "ParallelChords",
            Error::UnknownCatalogEntry(_) => "UnknownCatalogEntry",
            Error::ConstraintViolation(_) => "ConstraintViolation",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::NotOrdered => "NotOrdered",
        }
    }

    /// Malformed input as opposed to a numeric or domain failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidInput(_) | Error::UnknownCatalogEntry(_))
    }

    pub(crate) fn domain(at: f64, source: DomainError) -> Error {
        Error::Domain { at, source }
    }
}
