//! Emission spectra of a two-level emitter coupled to a lossy microcavity
//! under pure dephasing.
//!
//! The model is a single-excitation emitter/cavity pair with amplitude
//! equations
//!
//! ```text
//! dE/dt = -i g0 e^{+i(Δt + φ(t))} C - γ E
//! dC/dt = -i g0 e^{-i(Δt + φ(t))} E - κ C
//! ```
//!
//! where φ(t) is a Wiener phase with ⟨dφ²⟩ = 2 γ_p dt (pure dephasing of the
//! emitter-cavity coupling). Emission spectra are one-sided Fourier
//! transforms of the two-time correlators ⟨E(t+τ)E*(t)⟩ and ⟨C(t+τ)C*(t)⟩,
//! integrated over t:
//!
//! ```text
//! S_E(Ω) = (2γ/π) Re ∫dt ∫dτ e^{i(Ω-Δ)τ} ⟨E(t+τ)E*(t)⟩
//! S_C(Ω) = (2κ/π) Re ∫dt ∫dτ e^{i Ω τ}   ⟨C(t+τ)C*(t)⟩
//! ```
//!
//! Three mutually cross-validating backends compute them:
//!
//! * [`closed_form`] — exact rational-function spectra at γ_p = 0, plus a
//!   dense ODE-based pipeline through the generic transform machinery.
//! * [`regression`] — noise-averaged moment equations and τ-regression of
//!   the correlators; deterministic and fast for any γ_p.
//! * [`stochastic`] — Monte Carlo over explicit noise paths; the literal
//!   model, used to validate the averaged equations.
//!
//! # Units
//!
//! All rates and frequencies are **angular** frequencies in GHz (= rad/ns);
//! time is in ns, so ω·t products are dimensionless with no 2π factor.
//! κ and γ are *amplitude* decay rates: intensities decay at 2κ, 2γ.
//! The spectral axis Ω is measured relative to the cavity resonance; the
//! emitter line sits at Ω = Δ = ω₀ − ω_c.

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod mech;
pub mod model;
pub mod presets;
pub mod regression;
pub mod spectra;
pub mod stochastic;
pub mod validation;

pub use error::Error;
pub use model::{AmplitudeState, NumericalGrid, Regime, SystemParams};
pub use spectra::{Backend, SolverQuality, Spectrum};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
