use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Grid too coarse to resolve the requested truncation without aliasing.
    #[error("grid of {samples} points cannot resolve truncation N={n} (need at least {required})")]
    Alias {
        samples: usize,
        n: usize,
        required: usize,
    },

    /// Chain clustering could not separate the family into classes of at most two
    /// elements before the tolerance collapsed.
    #[error("chain clustering tolerance fell below {floor:e} without resolving a cluster near {near}; run a resonance check")]
    EpsilonUnderflow { floor: f64, near: f64 },

    /// A single-control steering problem whose data violate the conserved mean.
    #[error(
        "mean constraint violated: |∫{component} dx| defect {defect:e} exceeds tolerance {tol:e}"
    )]
    ConstraintViolation {
        component: &'static str,
        defect: f64,
        tol: f64,
    },

    #[error("HUM operator is ill-conditioned (condition number {condition:e}, coercivity estimate {alpha:e}); try a longer horizon or a smaller truncation")]
    IllConditioned { condition: f64, alpha: f64 },

    #[error("weighted Gramian is numerically singular (minimum eigenvalue {min_eig:e})")]
    GramianSingular { min_eig: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
