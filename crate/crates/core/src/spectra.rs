//! Emission spectra from two-time correlators: grid policy, horizons,
//! the Eq.-of-motion-agnostic Fourier machinery and the conservation
//! bookkeeping.
//!
//! The two spectra use *different* kernels:
//!
//! ```text
//! S_E(Ω) = (2γ/π) Re Σ_t w_t Σ_τ w_τ e^{i(Ω−Δ)τ} ⟨E(t+τ)E*(t)⟩
//! S_C(Ω) = (2κ/π) Re Σ_t w_t Σ_τ w_τ e^{i Ω τ}   ⟨C(t+τ)C*(t)⟩
//! ```
//!
//! (the emitter envelope lives in the emitter frame, the cavity envelope in
//! the cavity frame). Each correlator series carries its kernel shift so the
//! two cannot be silently confused; a validation trap test exercises the
//! failure mode deliberately.
//!
//! Total emission ∫(S_E+S_C)dΩ = 1: every backend is checked against this.
//! Finite frequency windows lose the S_E wings, which decay only as
//! (γ/π)/(Ω−Δ)²; integrated intensities therefore add a measured-edge tail
//! correction (S·|θ_edge| for the emitter, S·|θ_edge|/3 for the cavity).

use serde::{Deserialize, Serialize};

use crate::closed_form;
use crate::error::Error;
use crate::fourier::{fourier_integral, CorrelatorSeries};
use crate::model::{NumericalGrid, SystemParams, OMEGA_MARGIN};
use crate::regression;
use crate::stochastic::{ensemble_correlations, CorrelationGrid, EnsembleConfig};
use crate::Result;

/// Solver backend identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    ClosedForm,
    Regression,
    MonteCarlo,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Backend::ClosedForm => "closed_form",
            Backend::Regression => "regression",
            Backend::MonteCarlo => "monte_carlo",
        };
        f.write_str(s)
    }
}

/// Accuracy policy knobs shared by all numerical backends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverQuality {
    /// bound on θ_max · dτ (quadrature phase per τ step)
    pub theta_dtau_max: f64,
    /// Euler-Maclaurin endpoint correction terms (0..=3)
    pub em_order: usize,
    /// FFT grid resolution: dθ ≤ narrowest linewidth / this
    pub resolution_divisor: f64,
    /// remaining excitation at t_max
    pub t_residual: f64,
    /// correlator decay target at τ_max
    pub tau_rel_cut: f64,
    /// frequency samples of the output grid
    pub n_omega: usize,
    /// cap on the decimated outer t grid
    pub max_outer: usize,
    /// Monte Carlo step refinement below the stability default: the
    /// mid-step scheme's O(dt²) bias must stay below the statistical
    /// resolution of a 2e4-trajectory ensemble
    pub mc_step_refine: f64,
}

impl SolverQuality {
    /// Default figure/sweep-grade accuracy (≲ 1e-3 relative).
    pub fn standard() -> Self {
        Self {
            theta_dtau_max: 0.8,
            em_order: 2,
            resolution_divisor: 20.0,
            t_residual: 1e-6,
            tau_rel_cut: 1e-5,
            n_omega: 2048,
            max_outer: 256,
            mc_step_refine: 3.0,
        }
    }

    /// Oracle-comparison grade (≲ 1e-6 relative for deterministic routes).
    pub fn high() -> Self {
        Self {
            theta_dtau_max: 0.2,
            em_order: 3,
            resolution_divisor: 64.0,
            t_residual: 1e-9,
            tau_rel_cut: 1e-8,
            n_omega: 2048,
            max_outer: 256,
            mc_step_refine: 3.0,
        }
    }
}

impl Default for SolverQuality {
    fn default() -> Self {
        Self::standard()
    }
}

/// Step cap of the horizon search (signals near-dark states).
pub const HORIZON_STEP_CAP: usize = 100_000;

/// Hard cap on τ samples of a correlator series.
pub const MAX_TAU_SAMPLES: usize = 4_000_000;

/// Default integrator step: 0.1 / max(g0, κ, γ, |Δ|+γ_p, 1) ns.
pub fn default_dt(p: &SystemParams) -> f64 {
    0.1 / p
        .g0
        .max(p.kappa)
        .max(p.gamma)
        .max(p.delta.abs() + p.gamma_p)
        .max(1.0)
}

/// Slowest decay rate (|Re| of the slowest eigenvalue) of the moment
/// system; `None` for dark states.
fn moment_slowest(p: &SystemParams) -> Option<f64> {
    if p.g0 == 0.0 {
        // cavity never populated; only the emitter mode is excited
        return (p.gamma > 0.0).then_some(2.0 * p.gamma);
    }
    let eigs = regression::moment_matrix(p).complex_eigenvalues();
    let slowest = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    (slowest < -1e-12).then_some(-slowest)
}

/// Slowest decay rate of the two τ-regression pairs.
fn pair_slowest(p: &SystemParams) -> Option<f64> {
    if p.g0 == 0.0 {
        return (p.gamma > 0.0).then_some(p.gamma);
    }
    let a = regression::emitter_pair_matrix(p).slowest_decay();
    let b = regression::cavity_pair_matrix(p).slowest_decay();
    let slowest = a.max(b);
    (slowest < -1e-12).then_some(-slowest)
}

/// Decay horizons for the two-time integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    /// ns; remaining excitation below the residual target
    pub t_max: f64,
    /// ns; correlators decayed below the relative cut
    pub tau_max: f64,
}

/// Smallest horizons with remaining excitation < 1e-6, estimated from the
/// slowest eigenvalues of the moment and regression generators; errors with
/// [`Error::HorizonCapExceeded`] past 1e5 default steps (near-dark states).
pub fn adaptive_horizon(p: &SystemParams) -> Result<Horizon> {
    Ok(Horizon {
        t_max: t_horizon(p, 1e-6)?,
        tau_max: tau_horizon(p, 1e-6)?,
    })
}

pub(crate) fn t_horizon(p: &SystemParams, residual: f64) -> Result<f64> {
    let rate = moment_slowest(p).ok_or(Error::HorizonCapExceeded {
        steps_needed: f64::INFINITY,
        cap: HORIZON_STEP_CAP,
    })?;
    let t_max = (1.0 / residual).ln() / rate;
    let steps = t_max / default_dt(p);
    if steps > HORIZON_STEP_CAP as f64 {
        return Err(Error::HorizonCapExceeded {
            steps_needed: steps,
            cap: HORIZON_STEP_CAP,
        });
    }
    Ok(t_max)
}

pub(crate) fn tau_horizon(p: &SystemParams, rel_cut: f64) -> Result<f64> {
    let rate = pair_slowest(p).ok_or(Error::HorizonCapExceeded {
        steps_needed: f64::INFINITY,
        cap: HORIZON_STEP_CAP,
    })?;
    let tau_max = (1.0 / rel_cut).ln() / rate;
    let steps = tau_max / default_dt(p);
    if steps > 40.0 * HORIZON_STEP_CAP as f64 {
        return Err(Error::HorizonCapExceeded {
            steps_needed: steps,
            cap: 40 * HORIZON_STEP_CAP,
        });
    }
    Ok(tau_max)
}

/// Default grid: ω window [min(0,Δ)−5W, max(0,Δ)+5W] with W the summed
/// rate scale, t horizon from the slowest moment eigenvalue.
pub fn default_grid(p: &SystemParams, q: &SolverQuality) -> Result<NumericalGrid> {
    let dt = default_dt(p);
    let t_raw = t_horizon(p, q.t_residual)?;
    let n_t = (t_raw / dt).ceil() as usize;
    let w = p.total_width();
    Ok(NumericalGrid {
        t_max: n_t as f64 * dt,
        dt,
        n_t,
        omega_min: p.delta.min(0.0) - OMEGA_MARGIN * w,
        omega_max: p.delta.max(0.0) + OMEGA_MARGIN * w,
        n_omega: q.n_omega,
    })
}

/// Largest |θ| either kernel is evaluated at on this ω window.
pub fn theta_abs_max(p: &SystemParams, omega_min: f64, omega_max: f64) -> f64 {
    omega_min
        .abs()
        .max(omega_max.abs())
        .max((omega_min - p.delta).abs())
        .max((omega_max - p.delta).abs())
}

/// Discretization of the (t, τ) correlation grid shared by the Monte Carlo
/// backend and the like-for-like regression route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPlan {
    /// fine integrator step, ns
    pub dt: f64,
    /// fine steps to t_max (multiple of outer_stride)
    pub n_t: usize,
    /// fine steps between outer t samples (multiple of tau_stride)
    pub outer_stride: usize,
    /// fine steps per τ sample
    pub tau_stride: usize,
    pub n_tau: usize,
}

impl CorrelationPlan {
    pub fn n_outer(&self) -> usize {
        self.n_t / self.outer_stride + 1
    }

    pub fn d_tau(&self) -> f64 {
        self.dt * self.tau_stride as f64
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.n_t as f64
    }

    pub fn tau_max(&self) -> f64 {
        self.d_tau() * self.n_tau as f64
    }

    /// Trapezoid weights on the outer t grid.
    pub fn t_weights(&self) -> Vec<f64> {
        let n = self.n_outer();
        let h = self.dt * self.outer_stride as f64;
        (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect()
    }
}

/// Build the correlation grid plan for the given quality and kernel range.
pub fn correlation_plan(
    p: &SystemParams,
    q: &SolverQuality,
    theta_abs: f64,
    max_outer: usize,
) -> Result<CorrelationPlan> {
    let t_raw = t_horizon(p, q.t_residual)?;
    let tau_max = tau_horizon(p, q.tau_rel_cut)?;

    // a wide kernel range can demand a finer step than the integrator default
    let d_tau_target = q.theta_dtau_max / theta_abs.max(1e-12);
    let dt = default_dt(p).min(d_tau_target);
    let tau_stride = ((d_tau_target / dt).floor() as usize).max(1);
    let n_tau = (tau_max / (dt * tau_stride as f64)).ceil() as usize;
    if n_tau > MAX_TAU_SAMPLES {
        return Err(Error::HorizonCapExceeded {
            steps_needed: n_tau as f64,
            cap: MAX_TAU_SAMPLES,
        });
    }

    let n_t_raw = (t_raw / dt).ceil() as usize;
    let per_outer = (n_t_raw.div_ceil(max_outer.saturating_sub(1).max(1))).max(1);
    let outer_stride = per_outer.div_ceil(tau_stride) * tau_stride;
    let n_t = n_t_raw.div_ceil(outer_stride) * outer_stride;

    Ok(CorrelationPlan {
        dt,
        n_t,
        outer_stride,
        tau_stride,
        n_tau,
    })
}

/// Computed emission spectra on a frequency grid (densities in 1/GHz,
/// normalized so the two integrate to 1 together).
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// angular GHz relative to the cavity resonance
    pub omega: Vec<f64>,
    pub s_e: Vec<f64>,
    pub s_c: Vec<f64>,
    /// per-point standard errors (Monte Carlo backend)
    pub s_e_err: Option<Vec<f64>>,
    pub s_c_err: Option<Vec<f64>>,
    pub meta: SpectrumMeta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub params: SystemParams,
    pub backend: Backend,
    pub quality: SolverQuality,
}

impl Spectrum {
    /// CSV serialization: `omega_ghz,s_e,s_c[,s_e_err,s_c_err]` with full
    /// round-trip float formatting. `comment` lines (if any) are prefixed
    /// with `# `.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let with_err = self.s_e_err.is_some();
        out.push_str(if with_err {
            "omega_ghz,s_e,s_c,s_e_err,s_c_err\n"
        } else {
            "omega_ghz,s_e,s_c\n"
        });
        for i in 0..self.omega.len() {
            if with_err {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    self.omega[i],
                    self.s_e[i],
                    self.s_c[i],
                    self.s_e_err.as_ref().unwrap()[i],
                    self.s_c_err.as_ref().unwrap()[i],
                ));
            } else {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.omega[i], self.s_e[i], self.s_c[i]
                ));
            }
        }
        out
    }
}

/// Truncation guard threshold (relative) at the τ and t horizons.
const TRUNCATION_LIMIT: f64 = 1e-4;

/// `noise_floor` widens the guard for Monte Carlo series, whose tail
/// estimate is dominated by the statistical floor rather than by actual
/// correlation left at τ_max.
fn check_tau_truncation(series: &CorrelatorSeries, noise_floor: f64) -> Result<()> {
    let g0 = series.values[0].norm();
    if g0 < 1e-300 {
        return Ok(()); // identically dark channel
    }
    let ratio = series.values[series.values.len() - 1].norm() / g0;
    let limit = TRUNCATION_LIMIT + noise_floor;
    if ratio > limit {
        return Err(Error::TruncationError {
            what: "correlator at tau_max",
            residual: ratio,
            limit,
        });
    }
    Ok(())
}

/// Narrowest linewidth scale, for the FFT resolution target.
fn narrowest_linewidth(p: &SystemParams) -> f64 {
    let floor = 1e-3 * p.total_width().max(1e-6);
    pair_slowest(p).unwrap_or(floor).max(floor)
}

/// The generic spectra engine: transform a pair of t-integrated correlator
/// series into S_E, S_C on the requested frequency grid.
pub fn spectra_from_series(
    series_e: &CorrelatorSeries,
    series_c: &CorrelatorSeries,
    p: &SystemParams,
    omega: &[f64],
    q: &SolverQuality,
    backend: Backend,
) -> Result<Spectrum> {
    spectra_from_series_inner(series_e, series_c, p, omega, q, backend, [0.0, 0.0])
}

fn spectra_from_series_inner(
    series_e: &CorrelatorSeries,
    series_c: &CorrelatorSeries,
    p: &SystemParams,
    omega: &[f64],
    q: &SolverQuality,
    backend: Backend,
    noise_floors: [f64; 2],
) -> Result<Spectrum> {
    check_tau_truncation(series_e, noise_floors[0])?;
    check_tau_truncation(series_c, noise_floors[1])?;

    let d_theta_max = narrowest_linewidth(p) / q.resolution_divisor;
    let eval = |series: &CorrelatorSeries, prefactor: f64| -> Result<Vec<f64>> {
        if prefactor == 0.0 || series.values[0].norm() < 1e-300 {
            return Ok(vec![0.0; omega.len()]);
        }
        let theta_abs = omega
            .iter()
            .map(|&w| (w - series.theta_shift).abs())
            .fold(0.0f64, f64::max);
        if theta_abs * series.d_tau > q.theta_dtau_max * 1.05 {
            return Err(Error::GridInvalid(format!(
                "tau step {:.3e} too coarse for |theta| up to {:.3e}",
                series.d_tau, theta_abs
            )));
        }
        let transform = fourier_integral(series, q.em_order, d_theta_max, theta_abs);
        Ok(omega
            .iter()
            .map(|&w| prefactor * transform.eval(w - series.theta_shift).re)
            .collect())
    };

    let s_e = eval(series_e, 2.0 * p.gamma / std::f64::consts::PI)?;
    let s_c = eval(series_c, 2.0 * p.kappa / std::f64::consts::PI)?;
    Ok(Spectrum {
        omega: omega.to_vec(),
        s_e,
        s_c,
        s_e_err: None,
        s_c_err: None,
        meta: SpectrumMeta {
            params: *p,
            backend,
            quality: *q,
        },
    })
}

/// Spectra from a (t, τ) correlation grid: trapezoid t integration, then
/// the generic τ transform. Monte Carlo grids also get per-point error
/// bands from the per-batch correlators.
pub fn correlations_to_spectra(
    grid: &CorrelationGrid,
    p: &SystemParams,
    omega: &[f64],
    q: &SolverQuality,
    backend: Backend,
) -> Result<Spectrum> {
    // residual excitation at the end of the t grid
    let t_end = *grid.t.last().expect("non-empty grid");
    let m_end = regression::moments_at(p, t_end);
    let residual = m_end.n_e + m_end.n_c;
    if residual > TRUNCATION_LIMIT {
        return Err(Error::TruncationError {
            what: "excitation at t_max",
            residual,
            limit: TRUNCATION_LIMIT,
        });
    }

    let d_tau = grid.tau[1] - grid.tau[0];
    let (ge, gc) = grid.t_integrated();

    // statistical floor of the tail for the truncation guard: the Monte
    // Carlo estimate of G(τ_max) cannot drop below its own standard error
    let tail_floor = |batches: &[Vec<num_complex::Complex64>], g0: f64| -> f64 {
        let nb = batches.len();
        if nb < 2 || g0 < 1e-300 {
            return 0.0;
        }
        let last = batches[0].len() - 1;
        let mean = batches.iter().map(|b| b[last]).sum::<num_complex::Complex64>() / nb as f64;
        let var = batches
            .iter()
            .map(|b| (b[last] - mean).norm_sqr())
            .sum::<f64>()
            / (nb - 1) as f64;
        6.0 * (var / nb as f64).sqrt() / g0
    };
    let floors = match &grid.stats {
        Some(st) => [
            tail_floor(&st.batch_g_e, ge[0].norm()),
            tail_floor(&st.batch_g_c, gc[0].norm()),
        ],
        None => [0.0, 0.0],
    };

    let series_e = CorrelatorSeries::from_samples(ge, d_tau, p.delta);
    let series_c = CorrelatorSeries::from_samples(gc, d_tau, 0.0);
    let mut spec = spectra_from_series_inner(&series_e, &series_c, p, omega, q, backend, floors)?;

    if let Some(stats) = &grid.stats {
        let n_batches = stats.batch_g_e.len();
        if n_batches >= 2 {
            let nb_scale = (n_batches as f64).sqrt();
            let batch_floors = [floors[0] * nb_scale, floors[1] * nb_scale];
            let mut acc_e = vec![(0.0f64, 0.0f64); omega.len()];
            let mut acc_c = vec![(0.0f64, 0.0f64); omega.len()];
            for b in 0..n_batches {
                let se_b = CorrelatorSeries::from_samples(stats.batch_g_e[b].clone(), d_tau, p.delta);
                let sc_b = CorrelatorSeries::from_samples(stats.batch_g_c[b].clone(), d_tau, 0.0);
                let sp = spectra_from_series_inner(&se_b, &sc_b, p, omega, q, backend, batch_floors)?;
                for i in 0..omega.len() {
                    acc_e[i].0 += sp.s_e[i];
                    acc_e[i].1 += sp.s_e[i] * sp.s_e[i];
                    acc_c[i].0 += sp.s_c[i];
                    acc_c[i].1 += sp.s_c[i] * sp.s_c[i];
                }
            }
            let nb = n_batches as f64;
            let se_of = |acc: &[(f64, f64)]| -> Vec<f64> {
                acc.iter()
                    .map(|&(s, s2)| {
                        let var = (s2 / nb - (s / nb) * (s / nb)).max(0.0) * nb / (nb - 1.0);
                        (var / nb).sqrt()
                    })
                    .collect()
            };
            spec.s_e_err = Some(se_of(&acc_e));
            spec.s_c_err = Some(se_of(&acc_c));
        }
    }
    Ok(spec)
}

/// Compute a spectrum with the chosen backend on the given (or default)
/// grid.
pub fn compute_spectrum(
    p: &SystemParams,
    backend: Backend,
    q: &SolverQuality,
    ensemble: Option<&EnsembleConfig>,
    grid: Option<&NumericalGrid>,
) -> Result<Spectrum> {
    let owned;
    let grid = match grid {
        Some(g) => {
            g.validate(p)?;
            g
        }
        None => {
            owned = default_grid(p, q)?;
            &owned
        }
    };
    let omega = grid.omega_values();
    match backend {
        Backend::ClosedForm => {
            if p.gamma_p != 0.0 {
                return Err(Error::InvalidInput(
                    "closed_form backend requires gamma_p = 0".into(),
                ));
            }
            Ok(closed_form::spectrum(p, &omega, q))
        }
        Backend::Regression => {
            let theta_abs = theta_abs_max(p, grid.omega_min, grid.omega_max);
            let (se, sc) = regression::tau_series_exact(p, q, theta_abs)?;
            spectra_from_series(&se, &sc, p, &omega, q, Backend::Regression)
        }
        Backend::MonteCarlo => {
            let theta_abs = theta_abs_max(p, grid.omega_min, grid.omega_max);
            let plan = correlation_plan(p, q, theta_abs, q.max_outer)?;
            let default_ens = EnsembleConfig::default();
            let ens = ensemble.unwrap_or(&default_ens);
            let corr = ensemble_correlations(p, ens, &plan)?;
            correlations_to_spectra(&corr, p, &omega, q, Backend::MonteCarlo)
        }
    }
}

/// Integrated intensities (I_E, I_C, cavity fraction) of a spectrum.
///
/// Trapezoid over the grid plus measured-edge tail corrections for the
/// out-of-window wings (the emitter spectrum decays only as 1/θ²).
pub fn spectrum_norms(s: &Spectrum) -> (f64, f64, f64) {
    let n = s.omega.len();
    let mut i_e = 0.0;
    let mut i_c = 0.0;
    for i in 1..n {
        let h = s.omega[i] - s.omega[i - 1];
        i_e += 0.5 * h * (s.s_e[i] + s.s_e[i - 1]);
        i_c += 0.5 * h * (s.s_c[i] + s.s_c[i - 1]);
    }
    let delta = s.meta.params.delta;
    i_e += (s.s_e[0] * (s.omega[0] - delta).abs()).max(0.0);
    i_e += (s.s_e[n - 1] * (s.omega[n - 1] - delta).abs()).max(0.0);
    i_c += (s.s_c[0] * s.omega[0].abs() / 3.0).max(0.0);
    i_c += (s.s_c[n - 1] * s.omega[n - 1].abs() / 3.0).max(0.0);
    let total = i_e + i_c;
    let fraction = if total > 1e-300 { i_c / total } else { 0.0 };
    (i_e, i_c, fraction)
}
