use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh parse error: {0}")]
    Parse(String),

    #[error("simplex {index} {simplex:?}: {reason}")]
    InvalidSimplex {
        index: usize,
        simplex: Vec<usize>,
        reason: String,
    },

    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),

    #[error("non-manifold facet {facet:?}: {cofaces} cofaces (expected 2)")]
    NonManifold { facet: Vec<usize>, cofaces: usize },

    #[error("degenerate simplex {index} {simplex:?}: volume {volume:e}")]
    DegenerateSimplex {
        index: usize,
        simplex: Vec<usize>,
        volume: f64,
    },

    #[error("vertex coordinates are required for this operation")]
    MissingCoordinates,

    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("eigensolver did not converge after {iterations} iterations ({converged}/{wanted} pairs converged)")]
    NoConvergence {
        iterations: usize,
        converged: usize,
        wanted: usize,
        partial: Box<crate::dec::SpectrumSlice>,
    },

    #[error("singular diagonalizing matrix: det P = 0 at beta = {beta}")]
    SingularP { beta: f64 },

    #[error("insufficient spectral coverage: resolved orders [{lo}, {hi}] do not contain [{a}, {b}]; increase the mode count")]
    InsufficientCoverage { lo: f64, hi: f64, a: f64, b: f64 },

    #[error("gluing hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no admissible (epsilon, delta): {0}")]
    NoAdmissibleParameters(String),

    #[error("algebra error: {0}")]
    Algebra(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
