use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported polynomial degree {degree} (maximum {max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("entry ({row}, {col}) is outside the sparsity pattern")]
    PatternViolation { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is numerically singular at pivot {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverDidNotConverge { iterations: usize, residual: f64 },

    #[error("solver failed on slab {slab}: {source}")]
    SlabSolveFailed {
        slab: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
