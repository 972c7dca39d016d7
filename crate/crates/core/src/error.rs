use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed word: generator index {index} outside 1..={rank}")]
    MalformedWord { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("not a pure braid (underlying permutation {permutation})")]
    NotPureBraid { permutation: String },

    #[error("word is not a letter-for-letter conjugate of x{index}")]
    NotConjugate { index: usize },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid multi-index {indices:?}: entries must be distinct and in range")]
    InvalidMultiIndex { indices: Vec<usize> },

    #[error("string link is not Borromean")]
    NotBorromean,

    #[error("resolution too coarse: separation {found:e} below {required:e}")]
    Refinement { found: f64, required: f64 },

    #[error("degenerate configuration at grid point {grid:?}")]
    DegenerateConfiguration { grid: Vec<usize> },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("bending radius {0} must exceed 1")]
    InvalidTorus(f64),

    #[error("periodicity fails; torus quotient undefined ({violations} violations)")]
    QuotientUndefined { violations: usize },

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },

    #[error("invalid interval family: {0}")]
    InvalidIntervals(String),

    #[error("basepoint mismatch between operands")]
    BasepointMismatch,

    #[error("ill-formed input at stage {stage}: component {component} hits the boundary away from its basepoint")]
    IllFormedInput { stage: usize, component: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
