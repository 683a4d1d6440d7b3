//! Named parameter presets behind the figure-reproduction commands, so
//! tests and the CLI reference presets instead of scattering magic numbers.

use crate::mech::MechParams;
use crate::model::SystemParams;
use crate::Result;

/// Strong-coupling reference set: g0 = 8, κ = 1.6, γ = 0.32 GHz.
pub fn fig2_params(gamma_p: f64, delta: f64) -> Result<SystemParams> {
    SystemParams::new(8.0, 1.6, 0.32, gamma_p, delta)
}

/// Micropillar-like set: g0 = 38, κ = 43, γ = 0.1 GHz.
pub fn fig4_params(gamma_p: f64, delta: f64) -> Result<SystemParams> {
    SystemParams::new(38.0, 43.0, 0.1, gamma_p, delta)
}

/// Detunings of the anti-crossing maps (fig2a/fig2b).
pub fn fig2_detunings() -> Vec<f64> {
    (-6..=6).map(|i| 4.0 * i as f64).collect()
}

/// Dephasing rates of the left-peak-ratio curves (fig3a).
pub fn fig3a_gamma_ps() -> Vec<f64> {
    vec![0.0, 1.0, 5.0, 10.0]
}

/// Detunings of the left-peak-ratio curves (fig3a).
pub fn fig3a_detunings() -> Vec<f64> {
    (0..=16).map(|i| 2.0 * i as f64).collect()
}

/// Detunings of the cavity-fraction curves (fig3b).
pub fn fig3b_detunings() -> Vec<f64> {
    vec![0.0, 8.0, 16.0, 24.0]
}

/// Dephasing axis of the cavity-fraction curves (fig3b).
pub fn fig3b_gamma_ps() -> Vec<f64> {
    (0..=20).map(|i| i as f64).collect()
}

/// Detunings of the micropillar spectra (fig4).
pub fn fig4_detunings() -> Vec<f64> {
    vec![20.0, 40.0, 80.0]
}

/// Dephasing rates of the micropillar spectra (fig4).
pub fn fig4_gamma_ps() -> Vec<f64> {
    vec![0.0, 20.0]
}

/// Mechanical-analogue demo: eigenfrequency 6 rad/ns, drive detuned by
/// five bandwidths (2κ_c = 1/ns).
pub fn mech_demo() -> Result<MechParams> {
    MechParams::new(30.0, 6.0, 0.5, 11.0, 0.0, 1.0)
}

/// Jump rates of the mechanical demo.
pub fn mech_jump_rates() -> Vec<f64> {
    vec![0.0, 0.1, 1.0]
}

/// Time step and length of the mechanical demo (resolves the drive, holds
/// ≥ 50 events at the lowest non-zero rate after the transient cut).
pub fn mech_grid() -> (f64, usize) {
    (0.02, 40_000)
}
