use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("multiplier is not Hermitian: imaginary output is {ratio:.3e} of the output magnitude")]
    NonHermitianMultiplier { ratio: f64 },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum DiffeoError {
    #[error("not a diffeomorphism at this resolution: min det(d phi) = {min_det:.3e}")]
    NotDiffeomorphism { min_det: f64 },
    #[error("inverse did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("CFL violated at t = {t}: dt = {dt:.4e} exceeds limit {limit:.4e}")]
    Cfl { t: f64, dt: f64, limit: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid time-step configuration: {0}")]
    Config(String),
    #[error("flow map lost validity at t = {t}: {source}")]
    Diffeo {
        t: f64,
        #[source]
        source: DiffeoError,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl SolverError {
    /// Abort kinds map to exit code 2 in the command-line runner.
    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            SolverError::Cfl { .. } | SolverError::NonFinite { .. } | SolverError::Diffeo { .. }
        )
    }
}

#[derive(Debug, Error)]
pub enum LabError {
    #[error("degenerate probe: velocity response m = {m:.3e} (pick a probe left-down of the center)")]
    DegenerateProbe { m: f64 },
    #[error("hump radius r_{n} = {r_n:.4e} is {problem}; use a finer grid or a smaller n")]
    Unresolved { n: u32, r_n: f64, problem: String },
    #[error("bump radius {radius:.4e} is under-resolved (needs > {min:.4e})")]
    BumpUnderResolved { radius: f64, min: f64 },
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("supports overlap")]
    OverlappingSupports,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<DiffeoError> for LabError {
    fn from(e: DiffeoError) -> Self {
        LabError::Solver(SolverError::Diffeo { t: 0.0, source: e })
    }
}
