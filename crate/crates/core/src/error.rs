use thiserror::Error;

/// Errors produced while building meshes, discretizing, or solving.
#[derive(Debug, Error)]
pub enum WgError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },

    #[error("refinement parameter n must be at least 1")]
    ZeroRefinement,

    #[error("polynomial degree k = {0} is not supported (k must be at least 2)")]
    InvalidDegree(usize),

    #[error("degenerate polygon (non-positive area {0:e})")]
    DegeneratePolygon(f64),

    #[error("field oracle does not provide a {0}")]
    MissingDerivative(&'static str),

    #[error("boundary data is not finite on edge {0}")]
    BoundaryData(usize),

    #[error("local mass matrix is singular on cell {0}")]
    SingularMass(usize),

    #[error("cholesky factorization failed: {0}")]
    Factorization(String),

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("direct solve residual {0:e} exceeds 1e-9")]
    InaccurateSolve(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("unknown problem id '{0}' (expected example1, example2 or patch-<k>)")]
    UnknownProblem(String),

    #[error("invalid study configuration: {0}")]
    InvalidStudy(String),

    #[error("refinement n = {n} failed: {source}")]
    StudyLevel {
        n: usize,
        #[source]
        source: Box<WgError>,
    },

    #[error("table parse error: {0}")]
    TableParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WgError>;
