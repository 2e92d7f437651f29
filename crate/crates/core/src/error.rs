use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("degenerate ensemble grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("normalization undefined: {0}")]
    UndefinedNormalization(String),

    #[error("step size underflow at t = {t:e} s (state norm {state_norm:e}); system may be stiff")]
    Stiffness { t: f64, state_norm: f64 },

    #[error("integration produced a non-finite state at t = {t:e} s")]
    NonFinite { t: f64 },

    #[error("found {found} extrema in the analysis window, need at least 3")]
    InsufficientOscillation { found: usize },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("no steady state: {0}")]
    NoSteadyState(String),

    #[error("approximation not valid: {0}")]
    Validity(String),

    #[error("singular drift: {0}")]
    SingularDrift(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("ill-conditioned solve (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("photon truncation inadequate: top Fock level population {top_population:e}")]
    Truncation { top_population: f64 },

    #[error("steady state is not unique: null space multiplicity {multiplicity}")]
    NullSpaceDegenerate { multiplicity: usize },

    #[error("no steady state found: smallest singular value {sigma:e} exceeds threshold {threshold:e}")]
    NullSpaceMissing { sigma: f64, threshold: f64 },

    #[error("dimension too large: {0}")]
    DimensionOverflow(String),

    #[error("quadrature did not converge: successive estimates differ by {change:e}")]
    QuadratureNonConvergence { change: f64 },

    #[error("invalid manifest: {0}")]
    Spec(String),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Stiffness { .. }
                | Error::NonFinite { .. }
                | Error::RootFinding(_)
                | Error::IllConditioned { .. }
                | Error::Truncation { .. }
                | Error::NullSpaceDegenerate { .. }
                | Error::NullSpaceMissing { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::InsufficientOscillation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
