//! Noise-averaged backend: closed single-time moment equations and
//! τ-regression of the two-time correlators.
//!
//! Averaging the stochastic amplitude equations over the Gaussian white
//! phase noise (Furutsu-Novikov closure) gives, with s = ⟨C̃E*⟩ and
//! C̃ = C e^{+i(Δt+φ)},
//!
//! ```text
//! dn_E/dt = −2γ n_E + 2 g0 Im s
//! dn_C/dt = −2κ n_C − 2 g0 Im s
//! ds/dt   = −(γ+κ+γ_p − iΔ) s − i g0 (n_E − n_C)
//! ```
//!
//! and the correlators obey the same linear dynamics in τ with equal-time
//! moments as initial data:
//!
//! ```text
//! ∂τ W_E = −γ W_E − i g0 V          W_E(0) = n_E(t),  V(0) = s(t)
//! ∂τ V   = −(κ+γ_p−iΔ) V − i g0 W_E
//! ∂τ Y_C = −κ Y_C − i g0 Z          Y_C(0) = n_C(t),  Z(0) = s*(t)
//! ∂τ Z   = −(γ+γ_p+iΔ) Z − i g0 Y_C
//! ```
//!
//! These equations are cross-validated against the Monte Carlo backend,
//! which simulates the noise literally; agreement of the two is one of the
//! headline checks of this crate.
//!
//! Everything here is linear with constant coefficients, so time stepping
//! uses exact matrix exponentials and the t-integral of the moments needed
//! for spectra is the resolvent solve  ∫₀^∞ m(t) dt = −A⁻¹ m(0).

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::Error;
use crate::fourier::CorrelatorSeries;
use crate::linalg::Mat2;
use crate::model::SystemParams;
use crate::spectra::{CorrelationPlan, SolverQuality};
use crate::stochastic::CorrelationGrid;
use crate::Result;

/// Single-time noise-averaged moments at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// ⟨|E|²⟩
    pub n_e: f64,
    /// ⟨|C|²⟩
    pub n_c: f64,
    /// ⟨C̃ E*⟩
    pub s: Complex64,
    /// ns
    pub t: f64,
}

impl MomentState {
    pub fn initial() -> Self {
        Self {
            n_e: 1.0,
            n_c: 0.0,
            s: Complex64::new(0.0, 0.0),
            t: 0.0,
        }
    }

    fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.n_e, self.n_c, self.s.re, self.s.im)
    }

    fn from_vector(v: &Vector4<f64>, t: f64) -> Self {
        Self {
            n_e: v[0],
            n_c: v[1],
            s: Complex64::new(v[2], v[3]),
            t,
        }
    }
}

/// Real 4x4 generator of (n_E, n_C, Re s, Im s).
pub fn moment_matrix(p: &SystemParams) -> Matrix4<f64> {
    let g = p.gamma + p.kappa + p.gamma_p;
    #[rustfmt::skip]
    let a = Matrix4::new(
        -2.0 * p.gamma, 0.0,            0.0,      2.0 * p.g0,
        0.0,            -2.0 * p.kappa, 0.0,     -2.0 * p.g0,
        0.0,            0.0,            -g,      -p.delta,
        -p.g0,          p.g0,           p.delta, -g,
    );
    a
}

/// τ-generator of the emitter-referenced pair (W_E, V).
pub fn emitter_pair_matrix(p: &SystemParams) -> Mat2 {
    let ig0 = Complex64::new(0.0, -p.g0);
    Mat2::new(
        Complex64::new(-p.gamma, 0.0),
        ig0,
        ig0,
        Complex64::new(-(p.kappa + p.gamma_p), p.delta),
    )
}

/// τ-generator of the cavity-referenced pair (Y_C, Z).
pub fn cavity_pair_matrix(p: &SystemParams) -> Mat2 {
    let ig0 = Complex64::new(0.0, -p.g0);
    Mat2::new(
        Complex64::new(-p.kappa, 0.0),
        ig0,
        ig0,
        Complex64::new(-(p.gamma + p.gamma_p), -p.delta),
    )
}

/// Evolve the moments on a uniform grid with the exact propagator.
pub fn evolve_moments(p: &SystemParams, dt: f64, n_steps: usize) -> Vec<MomentState> {
    let prop = (moment_matrix(p) * dt).exp();
    let mut v = MomentState::initial().to_vector();
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(MomentState::from_vector(&v, 0.0));
    for i in 1..=n_steps {
        v = prop * v;
        out.push(MomentState::from_vector(&v, i as f64 * dt));
    }
    out
}

/// Moments at a single time (one exact propagator application).
pub fn moments_at(p: &SystemParams, t: f64) -> MomentState {
    let prop = (moment_matrix(p) * t).exp();
    let v = prop * MomentState::initial().to_vector();
    MomentState::from_vector(&v, t)
}

/// Exact t-integral of the moments, ∫₀^∞ m dt = −A⁻¹ m(0).
///
/// Errors with [`Error::HorizonCapExceeded`] when the moment system has a
/// non-decaying mode fed by the initial excitation (dark states).
pub fn integrated_moments(p: &SystemParams) -> Result<MomentState> {
    if p.g0 == 0.0 {
        // decoupled: cavity never populated; emitter decays at 2γ
        if p.gamma > 0.0 {
            return Ok(MomentState {
                n_e: 1.0 / (2.0 * p.gamma),
                n_c: 0.0,
                s: Complex64::new(0.0, 0.0),
                t: f64::INFINITY,
            });
        }
        return Err(Error::HorizonCapExceeded {
            steps_needed: f64::INFINITY,
            cap: crate::spectra::HORIZON_STEP_CAP,
        });
    }
    let a = moment_matrix(p);
    let rhs = -MomentState::initial().to_vector();
    match a.lu().solve(&rhs) {
        Some(v) => Ok(MomentState::from_vector(&v, f64::INFINITY)),
        None => Err(Error::HorizonCapExceeded {
            steps_needed: f64::INFINITY,
            cap: crate::spectra::HORIZON_STEP_CAP,
        }),
    }
}

/// Emitter-referenced regression pair (W_E, V)(τ) from the given initial
/// moments; exact propagator per grid point.
pub fn evolve_regression_emitter(
    p: &SystemParams,
    init: &MomentState,
    tau_grid: &[f64],
) -> Vec<(Complex64, Complex64)> {
    evolve_pair(emitter_pair_matrix(p), [c64(init.n_e), init.s], tau_grid)
}

/// Cavity-referenced regression pair (Y_C, Z)(τ).
pub fn evolve_regression_cavity(
    p: &SystemParams,
    init: &MomentState,
    tau_grid: &[f64],
) -> Vec<(Complex64, Complex64)> {
    evolve_pair(cavity_pair_matrix(p), [c64(init.n_c), init.s.conj()], tau_grid)
}

fn c64(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn evolve_pair(gen: Mat2, init: [Complex64; 2], tau_grid: &[f64]) -> Vec<(Complex64, Complex64)> {
    tau_grid
        .iter()
        .map(|&tau| {
            let v = gen.exp_scaled(tau).apply(init);
            (v[0], v[1])
        })
        .collect()
}

/// Exact derivatives [u, Ru, R²u, ...] of a pair solution at one point,
/// first components only.
fn generator_derivs(gen: &Mat2, u: [Complex64; 2], n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut v = u;
    for _ in 0..n {
        out.push(v[0]);
        v = gen.apply(v);
    }
    out
}

/// t-integrated correlator series for both spectra, using the exact moment
/// integral. This is the default fast path of the regression backend: the
/// only numerical error left is the τ-transform quadrature.
///
/// `theta_abs` is the largest |θ| the transform will be evaluated at; it
/// sets the τ step via the quality's θ·dτ bound.
pub fn tau_series_exact(
    p: &SystemParams,
    q: &SolverQuality,
    theta_abs: f64,
) -> Result<(CorrelatorSeries, CorrelatorSeries)> {
    let mbar = integrated_moments(p)?;
    let tau_max = crate::spectra::tau_horizon(p, q.tau_rel_cut)?;
    let d_tau = (q.theta_dtau_max / theta_abs.max(1e-12)).min(tau_max / 16.0);
    let n_tau = (tau_max / d_tau).ceil() as usize;
    if n_tau > crate::spectra::MAX_TAU_SAMPLES {
        return Err(Error::HorizonCapExceeded {
            steps_needed: n_tau as f64,
            cap: crate::spectra::MAX_TAU_SAMPLES,
        });
    }

    let re = emitter_pair_matrix(p);
    let rc = cavity_pair_matrix(p);
    let ue = [c64(mbar.n_e), mbar.s];
    let uc = [c64(mbar.n_c), mbar.s.conj()];
    let pe = re.exp_scaled(d_tau);
    let pc = rc.exp_scaled(d_tau);

    let mut ge = Vec::with_capacity(n_tau + 1);
    let mut gc = Vec::with_capacity(n_tau + 1);
    let (mut ve, mut vc) = (ue, uc);
    for _ in 0..=n_tau {
        ge.push(ve[0]);
        gc.push(vc[0]);
        ve = pe.apply(ve);
        vc = pc.apply(vc);
    }
    // ve/vc have overshot by one step; recover the endpoint states
    let end_e = re.exp_scaled(n_tau as f64 * d_tau).apply(ue);
    let end_c = rc.exp_scaled(n_tau as f64 * d_tau).apply(uc);

    let series_e = CorrelatorSeries {
        values: ge,
        d_tau,
        left_derivs: generator_derivs(&re, ue, 6),
        right_derivs: generator_derivs(&re, end_e, 6),
        theta_shift: p.delta,
    };
    let series_c = CorrelatorSeries {
        values: gc,
        d_tau,
        left_derivs: generator_derivs(&rc, uc, 6),
        right_derivs: generator_derivs(&rc, end_c, 6),
        theta_shift: 0.0,
    };
    Ok((series_e, series_c))
}

/// Correlators on the same decimated (t, τ) grid the Monte Carlo backend
/// uses, for like-for-like comparison: identical quadrature path, so the
/// difference between the two backends is purely statistical.
pub fn correlation_grid(p: &SystemParams, plan: &CorrelationPlan) -> CorrelationGrid {
    let n_outer = plan.n_outer();
    let n_tau1 = plan.n_tau + 1;
    let d_tau = plan.d_tau();
    let dt_outer = plan.dt * plan.outer_stride as f64;

    let prop_outer = (moment_matrix(p) * dt_outer).exp();
    let pe = emitter_pair_matrix(p).exp_scaled(d_tau);
    let pc = cavity_pair_matrix(p).exp_scaled(d_tau);

    let mut corr_e = vec![Complex64::new(0.0, 0.0); n_outer * n_tau1];
    let mut corr_c = vec![Complex64::new(0.0, 0.0); n_outer * n_tau1];
    let mut m = MomentState::initial().to_vector();
    for i in 0..n_outer {
        let ms = MomentState::from_vector(&m, i as f64 * dt_outer);
        let mut ve = [c64(ms.n_e), ms.s];
        let mut vc = [c64(ms.n_c), ms.s.conj()];
        for j in 0..n_tau1 {
            corr_e[i * n_tau1 + j] = ve[0];
            corr_c[i * n_tau1 + j] = vc[0];
            ve = pe.apply(ve);
            vc = pc.apply(vc);
        }
        m = prop_outer * m;
    }

    CorrelationGrid {
        t: (0..n_outer).map(|i| i as f64 * dt_outer).collect(),
        tau: (0..n_tau1).map(|j| j as f64 * d_tau).collect(),
        corr_e,
        corr_c,
        stats: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use approx::assert_relative_eq;

    fn fig2(gamma_p: f64, delta: f64) -> SystemParams {
        SystemParams::new(8.0, 1.6, 0.32, gamma_p, delta).unwrap()
    }

    #[test]
    fn moments_factorize_at_zero_dephasing() {
        // n_E = |E|², n_C = |C|², s = C̃E* for the pure-state solution
        let p = fig2(0.0, 7.0);
        let dt = 0.002;
        let moments = evolve_moments(&p, dt, 2500);
        let ts: Vec<f64> = moments.iter().map(|m| m.t).collect();
        let amps = closed_form::solve_amplitudes(&p, &ts);
        for (m, a) in moments.iter().zip(&amps).step_by(100) {
            assert_relative_eq!(m.n_e, a.e_amp.norm_sqr(), epsilon = 1e-10);
            assert_relative_eq!(m.n_c, a.c_amp.norm_sqr(), epsilon = 1e-10);
            // C̃ = C e^{+i(Δt)}: s = C e^{iΔt} E*  (paper-frame E)
            let phase = Complex64::from_polar(1.0, p.delta * m.t);
            let s_expect = a.c_amp * phase * a.e_amp.conj();
            assert!((m.s - s_expect).norm() < 1e-10);
        }
    }

    #[test]
    fn probability_conservation_by_quadrature() {
        // 2γ ∫ n_E + 2κ ∫ n_C = 1 over an adaptive horizon
        for p in [fig2(0.0, 0.0), fig2(5.0, 0.0), fig2(5.0, 24.0), fig2(20.0, -40.0)] {
            let t_max = crate::spectra::adaptive_horizon(&p).unwrap().t_max * 2.0;
            let n = 40_000;
            let dt = t_max / n as f64;
            let ms = evolve_moments(&p, dt, n);
            let mut acc = 0.0;
            for (i, m) in ms.iter().enumerate() {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * dt * (2.0 * p.gamma * m.n_e + 2.0 * p.kappa * m.n_c);
            }
            assert!(
                (acc - 1.0).abs() < 1e-6,
                "conservation off: {acc} for {p:?}"
            );
        }
    }

    #[test]
    fn integrated_moments_match_quadrature() {
        let p = fig2(5.0, 24.0);
        let mbar = integrated_moments(&p).unwrap();
        // fraction of light exiting through the cavity = 2κ ∫ n_C
        let frac = 2.0 * p.kappa * mbar.n_c;
        let n = 60_000;
        let dt = 3.0 * crate::spectra::adaptive_horizon(&p).unwrap().t_max / n as f64;
        let ms = evolve_moments(&p, dt, n);
        let mut acc = 0.0;
        for (i, m) in ms.iter().enumerate() {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * dt * 2.0 * p.kappa * m.n_c;
        }
        assert_relative_eq!(frac, acc, epsilon = 1e-5);
        // probability conservation is exact for the resolvent integral
        assert_relative_eq!(
            2.0 * p.gamma * mbar.n_e + 2.0 * p.kappa * mbar.n_c,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn regression_initial_conditions() {
        let p = fig2(5.0, 16.0);
        let init = moments_at(&p, 0.8);
        let we = evolve_regression_emitter(&p, &init, &[0.0]);
        assert!((we[0].0 - Complex64::new(init.n_e, 0.0)).norm() < 1e-14);
        assert!((we[0].1 - init.s).norm() < 1e-14);
        let yc = evolve_regression_cavity(&p, &init, &[0.0]);
        assert!((yc[0].0 - Complex64::new(init.n_c, 0.0)).norm() < 1e-14);
        assert!((yc[0].1 - init.s.conj()).norm() < 1e-14);
    }

    #[test]
    fn regression_factorizes_at_zero_dephasing() {
        // W_E(τ) = E(t+τ) E*(t) for γ_p = 0
        let p = fig2(0.0, 16.0);
        let t0 = 0.45;
        let init = moments_at(&p, t0);
        let taus: Vec<f64> = (0..60).map(|i| i as f64 * 0.05).collect();
        let we = evolve_regression_emitter(&p, &init, &taus);
        let ts: Vec<f64> = taus.iter().map(|tau| t0 + tau).collect();
        let amps = closed_form::solve_amplitudes(&p, &ts);
        let a0 = closed_form::solve_amplitudes(&p, &[t0])[0];
        for ((w, _), a) in we.iter().zip(&amps) {
            let expect = a.e_amp * a0.e_amp.conj();
            assert!(
                (w - expect).norm() < 1e-10,
                "tau={}: {w} vs {expect}",
                a.t - t0
            );
        }
    }

    #[test]
    fn pair_generators_swap_identity() {
        // swapping (γ↔κ, Δ↔−Δ) maps the emitter pair onto the cavity pair
        let p = SystemParams::new(5.0, 2.5, 0.7, 3.0, 11.0).unwrap();
        let swapped = SystemParams::new(5.0, 0.7, 2.5, 3.0, -11.0).unwrap();
        let a = emitter_pair_matrix(&swapped);
        let b = cavity_pair_matrix(&p);
        for (x, y) in [(a.a, b.a), (a.b, b.b), (a.c, b.c), (a.d, b.d)] {
            assert!((x - y).norm() == 0.0, "{x} vs {y}");
        }
    }

    #[test]
    fn regression_solutions_decay() {
        let p = fig2(7.0, -24.0);
        let init = moments_at(&p, 0.3);
        let taus = [60.0, 120.0];
        for (w, _) in evolve_regression_emitter(&p, &init, &taus) {
            assert!(w.norm() < 1e-8);
        }
        for (y, _) in evolve_regression_cavity(&p, &init, &taus) {
            assert!(y.norm() < 1e-8);
        }
    }

    #[test]
    fn decoupled_emitter_has_analytic_integral() {
        let p = SystemParams::new(0.0, 1.6, 0.32, 5.0, 0.0).unwrap();
        let mbar = integrated_moments(&p).unwrap();
        assert_relative_eq!(mbar.n_e, 1.0 / 0.64, epsilon = 1e-12);
        assert_eq!(mbar.n_c, 0.0);
    }

    #[test]
    fn dark_state_is_rejected() {
        // g0 = 0 with γ = 0: the excitation never reaches any decay channel
        let p = SystemParams::new(0.0, 1.6, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            integrated_moments(&p),
            Err(Error::HorizonCapExceeded { .. })
        ));
    }
}
