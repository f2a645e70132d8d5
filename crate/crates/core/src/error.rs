use thiserror::Error;

use crate::factorization::{Kg2Report, Kg3Report};
use crate::moves::HrReport;

/// Errors raised by the library. Every variant names the offending token
/// so callers can report it without re-deriving context.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` refers to undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("color {color} is outside 1..={rank} (at `{token}`)")]
    ColorOutOfRange {
        token: String,
        color: usize,
        rank: usize,
    },
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("color set must be nonempty")]
    EmptyColorSet,
    #[error("edges are not composable: {0}")]
    NotComposable(String),
    #[error("2-path `{0}` is not covered by any square")]
    UncoveredPath(String),
    #[error("target color word {target:?} is not a permutation of {word:?}")]
    TargetNotPermutation { word: Vec<usize>, target: Vec<usize> },
    #[error("KG3 requires a passing KG2 report")]
    Kg2NotEstablished,
    #[error("squares do not form a composable cube configuration: {0}")]
    NotComposableConfiguration(String),
    #[error("KG2 validation failed")]
    Kg2Failure(Box<Kg2Report>),
    #[error("KG3 validation failed")]
    Kg3Failure(Box<Kg3Report>),
    #[error("monoid map is not injective (rank {rank} < {columns} columns)")]
    NotInjectiveOmega { rank: usize, columns: usize },
    #[error("monoid map is injective but has no integer left inverse")]
    NoIntegerLeftInverse,
    #[error("move hypotheses not met at `{vertex}`")]
    HypothesesNotMet {
        vertex: String,
        reason: String,
        report: Option<Box<HrReport>>,
    },
    #[error("induced square for `{path}` has {candidates} candidates")]
    InducedSquareAmbiguity { path: String, candidates: usize },
    #[error("bridge color {0} is not in the color set")]
    BridgeColorNotInB(usize),
    #[error("generated name `{0}` collides with an existing identifier")]
    NameCollision(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
