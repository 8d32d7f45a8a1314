use thiserror::Error;

/// Errors produced by matrix construction, decomposition, generators, and ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error(
        "skew-symmetry violated at ({i},{j}): |F[i][j] + F[j][i]| = {residual:e} exceeds tolerance {tolerance:e}"
    )]
    SkewViolation {
        i: usize,
        j: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("diagonal entry {i} is {value:e}; self-evaluations must be zero")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("evaluator returned a non-finite value for pair ({a}, {b})")]
    NonFiniteEvaluation { a: String, b: String },

    #[error("labels must be pairwise distinct; `{label}` appears more than once")]
    DuplicateLabel { label: String },

    #[error("expected {expected} labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {reason}")]
    InvalidPermutation { reason: String },

    #[error("agent attribute vectors must have uniform length (found {first} and {other})")]
    RaggedAttributes { first: usize, other: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("enumeration would produce {count} strategies, above the limit of {limit}; sample instead")]
    EnumerationLimit { count: u128, limit: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("comparison graph is disconnected; components: {components:?}")]
    DisconnectedGraph { components: Vec<Vec<String>> },

    #[error("design matrix is rank deficient ({rank} < {cols}); remove constant columns (e.g. clamped boundary coordinates) before fitting")]
    RankDeficient { rank: usize, cols: usize },

    #[error("label `{label}` is missing from {what}")]
    MissingLabel { label: String, what: String },

    #[error("attribute column `{0}` not found or not numeric")]
    MissingAttribute(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
