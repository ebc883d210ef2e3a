use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum NlseError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative density {0} passed where rho >= 0 is required")]
    NegativeDensity(f64),

    #[error("boundary condition violated: {0}")]
    BoundaryViolation(String),

    #[error("zero pivot at index {index} in tridiagonal solve")]
    ZeroPivot { index: usize },

    #[error("resonant spectral denominator at mode {0:?}")]
    ResonantShift((usize, usize)),

    #[error(
        "fixed-point iteration did not converge in {iterations} iterations \
         (residual {residual:.3e}); the time step is likely too large for \
         the nonlinearity strength"
    )]
    FixedPointDiverged {
        iterations: usize,
        residual: f64,
        /// Last iterate, kept so callers can inspect how the solve failed.
        last_iterate: Vec<crate::Cplx>,
    },

    #[error(
        "solution blew up: sup-norm grew by {growth:.3e}x the initial value \
         (tau/h^2 = {tau_over_h2:.3e})"
    )]
    BlowUp { growth: f64, tau_over_h2: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    ConfigInvalid(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, NlseError>;
