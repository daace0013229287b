use thiserror::Error;

/// Errors produced by mesh ingestion, operator assembly and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("vertex index {index} out of range ({count} vertices)")]
    VertexIndex { index: usize, count: usize },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("non-manifold complex: {0}")]
    NonManifold(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate {p}-simplex {index}")]
    Degenerate { p: usize, index: usize },

    #[error("Hodge star {p} has nonpositive diagonal entry {value:e} at simplex {index}")]
    IndefiniteStar { p: usize, index: usize, value: f64 },

    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimit {
        what: String,
        size: usize,
        limit: usize,
    },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("inconsistent semidefinite system: relative residual {residual:e} stagnated")]
    Inconsistent { residual: f64 },

    #[error("input cochain is not a cocycle: |d omega|_inf = {norm:e}")]
    NotCocycle { norm: f64 },

    #[error("invalid dual path: {0}")]
    DualPath(String),

    #[error("harmonic basis has {found} columns but betti[{p}] = {expected}")]
    BettiMismatch {
        p: usize,
        expected: usize,
        found: usize,
    },

    #[error("mixed-system null vector {column} has |sigma|/|u| = {ratio:e}")]
    SigmaNotNegligible { column: usize, ratio: f64 },

    #[error("basis column {column} has relative Laplacian residual {residual:e}")]
    NotHarmonic { column: usize, residual: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
