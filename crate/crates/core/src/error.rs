use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller violated an operation's precondition (empty list, bad size...).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range for {len} subsystems")]
    SlotOutOfRange { index: usize, len: usize },

    /// Input failed a numerical validity check (Hermiticity, normalisation...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    #[error("{0} outside the supported domain")]
    Domain(String),

    /// Requested effective coupling exceeds what the z-drive can reach.
    #[error(
        "qubit {qubit}: target coupling {target:.6e} rad/s is infeasible, \
         maximum achievable is {max_achievable:.6e} rad/s ({max_mhz:.4} MHz x 2pi)"
    )]
    Infeasible {
        qubit: usize,
        target: f64,
        max_achievable: f64,
        max_mhz: f64,
    },

    #[error("rotating-wave validity check failed: {0}")]
    ValidityFailed(String),

    #[error("step size {dt:.6e} s exceeds the limit {limit:.6e} s")]
    StepSize { dt: f64, limit: f64 },

    #[error("trace drifted to {trace:.12} at t = {t:.6e} s")]
    TraceDrift { t: f64, trace: f64 },

    #[error("density matrix lost positivity at t = {t:.6e} s (eigenvalue below -{tolerance:e})")]
    Positivity { t: f64, tolerance: f64 },

    #[error("integration failed: {0}")]
    Integration(String),
}
