//! Error types shared across the solver backends.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical rate (g0, κ, γ or γ_p) was negative.
    #[error("rate `{name}` must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    /// κ = γ = 0: nothing ever leaves the system and the spectra diverge.
    #[error("no decay channel: kappa and gamma are both zero")]
    NoDecayChannel,

    /// A numerical grid violated its invariants.
    #[error("invalid grid: {0}")]
    GridInvalid(String),

    /// Step-size stability guard of the stochastic integrator.
    #[error("time step too large: dt*max_rate = {value:.3e} exceeds {limit}")]
    StepTooLarge { value: f64, limit: f64 },

    /// Residual excitation or correlation at the end of a finite horizon
    /// was too large for the requested transform.
    #[error("truncation error: {what} residual {residual:.3e} exceeds {limit:.1e}")]
    TruncationError {
        what: &'static str,
        residual: f64,
        limit: f64,
    },

    /// The decay horizon would need more steps than the cap allows
    /// (near-dark states, e.g. κ = γ = γ_p = 0).
    #[error("horizon cap exceeded: {steps_needed:.3e} steps needed, cap {cap}")]
    HorizonCapExceeded { steps_needed: f64, cap: usize },

    /// Mechanical analogue: drive and eigenfrequency bands overlap, the
    /// spectral-weight metric is meaningless.
    #[error("spectral bands overlap: separation {separation:.3} < {required:.3}")]
    BandsOverlap { separation: f64, required: f64 },

    /// Mechanical analogue: too few dephasing events in the analysis window.
    #[error("insufficient events: expected {expected:.1}, need at least {required}")]
    InsufficientEvents { expected: f64, required: usize },

    /// A cross-backend or phenomenology assertion failed.
    #[error("assertion failed: {0}")]
    AssertionFailed(String),

    /// Invalid input to an operation (precondition violation).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
