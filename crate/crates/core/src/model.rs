//! Physical parameters, unit conventions and regime classification.
//!
//! Units: angular GHz (rad/ns) for every rate and frequency, ns for time.
//! κ and γ multiply amplitudes, so intensities decay at 2κ and 2γ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::Mat2;
use crate::Result;

/// The five physical rates/detunings of the emitter-cavity system.
///
/// * `g0` — emitter-cavity coupling strength
/// * `kappa` — cavity amplitude decay rate
/// * `gamma` — emitter amplitude decay rate (non-cavity channels)
/// * `gamma_p` — pure dephasing rate of the coupling phase
/// * `delta` — detuning Δ = ω₀ − ω_c (any sign)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub g0: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_p: f64,
    pub delta: f64,
}

impl SystemParams {
    /// Validate the five raw numbers into a parameter set.
    ///
    /// Errors with [`Error::NegativeRate`] if any rate is negative and with
    /// [`Error::NoDecayChannel`] if κ = γ = 0 (no emission channel; all
    /// spectra would diverge).
    pub fn new(g0: f64, kappa: f64, gamma: f64, gamma_p: f64, delta: f64) -> Result<Self> {
        for (name, value) in [
            ("g0", g0),
            ("kappa", kappa),
            ("gamma", gamma),
            ("gamma_p", gamma_p),
        ] {
            if !(value >= 0.0) {
                return Err(Error::NegativeRate { name, value });
            }
        }
        if kappa == 0.0 && gamma == 0.0 {
            return Err(Error::NoDecayChannel);
        }
        if !delta.is_finite() {
            return Err(Error::InvalidInput(format!("delta must be finite, got {delta}")));
        }
        Ok(Self {
            g0,
            kappa,
            gamma,
            gamma_p,
            delta,
        })
    }

    /// Copy with a different dephasing rate.
    pub fn with_gamma_p(&self, gamma_p: f64) -> Result<Self> {
        Self::new(self.g0, self.kappa, self.gamma, gamma_p, self.delta)
    }

    /// Copy with a different detuning.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.g0, self.kappa, self.gamma, self.gamma_p, delta)
    }

    /// Coupling regime of the coherent exchange.
    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Sum of all rate scales; sets spectral windows.
    pub fn total_width(&self) -> f64 {
        self.g0 + self.kappa + self.gamma + self.gamma_p
    }
}

/// Coupling regime: `Strong` iff g0² > ((κ−γ)/2)².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Strong,
    Weak,
}

pub fn classify_regime(p: &SystemParams) -> Regime {
    let loss_asym = (p.kappa - p.gamma) * 0.5;
    if p.g0 * p.g0 > loss_asym * loss_asym {
        Regime::Strong
    } else {
        Regime::Weak
    }
}

/// Constant-coefficient generator of the amplitude equations in the frame
/// rotating at the cavity resonance: with Ẽ = E e^{−iΔt},
///
/// ```text
/// d/dt (Ẽ, C) = M (Ẽ, C),   M = [[−γ−iΔ, −i g0], [−i g0, −κ]]
/// ```
///
/// Valid at γ_p = 0; the stochastic and regression backends own γ_p > 0.
pub fn system_matrix(p: &SystemParams) -> Mat2 {
    let ig0 = Complex64::new(0.0, -p.g0);
    Mat2::new(
        Complex64::new(-p.gamma, -p.delta),
        ig0,
        ig0,
        Complex64::new(-p.kappa, 0.0),
    )
}

/// Complex emitter/cavity amplitudes at one instant.
///
/// `e_amp` is the emitter envelope in the frame of the emitter resonance
/// (the natural frame of the amplitude equations), `c_amp` the cavity
/// envelope in the cavity frame. |e|² + |c|² ≤ 1; the difference has leaked
/// into the reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub e_amp: Complex64,
    pub c_amp: Complex64,
    /// ns
    pub t: f64,
}

impl AmplitudeState {
    /// Remaining excitation |E|² + |C|².
    pub fn excitation(&self) -> f64 {
        self.e_amp.norm_sqr() + self.c_amp.norm_sqr()
    }
}

/// Uniform time grid plus frequency window for spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalGrid {
    /// ns
    pub t_max: f64,
    /// ns
    pub dt: f64,
    pub n_t: usize,
    /// angular GHz, relative to the cavity resonance
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
}

/// Margin multiplier of the default frequency window.
pub const OMEGA_MARGIN: f64 = 5.0;

impl NumericalGrid {
    /// Validate invariants: dt > 0, t_max = n_t·dt, ω window strictly
    /// increasing and covering Ω = 0 and Ω = Δ with margin ≥ 5(κ+γ+γ_p+g0).
    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::GridInvalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_t == 0 {
            return Err(Error::GridInvalid("n_t must be >= 1".into()));
        }
        let tm = self.n_t as f64 * self.dt;
        if (tm - self.t_max).abs() > 1e-9 * self.t_max.max(1.0) {
            return Err(Error::GridInvalid(format!(
                "t_max = {} is not n_t*dt = {}",
                self.t_max, tm
            )));
        }
        if !(self.omega_min < self.omega_max) || self.n_omega < 2 {
            return Err(Error::GridInvalid(
                "omega grid must be strictly increasing with >= 2 points".into(),
            ));
        }
        let w = p.total_width();
        let margin = OMEGA_MARGIN * w;
        let lo_need = p.delta.min(0.0) - margin;
        let hi_need = p.delta.max(0.0) + margin;
        // tiny slack for round-off in externally supplied windows
        let eps = 1e-9 * (1.0 + margin);
        if self.omega_min > lo_need + eps || self.omega_max < hi_need - eps {
            return Err(Error::GridInvalid(format!(
                "omega window [{}, {}] does not cover [{lo_need}, {hi_need}]",
                self.omega_min, self.omega_max
            )));
        }
        Ok(())
    }

    /// Frequency samples, evenly spaced over [omega_min, omega_max].
    pub fn omega_values(&self) -> Vec<f64> {
        let n = self.n_omega;
        let step = (self.omega_max - self.omega_min) / (n - 1) as f64;
        (0..n).map(|i| self.omega_min + step * i as f64).collect()
    }

    /// Time samples 0, dt, ..., t_max.
    pub fn t_values(&self) -> Vec<f64> {
        (0..=self.n_t).map(|i| i as f64 * self.dt).collect()
    }
}
