//! Monte Carlo backend: explicit dephasing noise paths, per-realization
//! integration of the amplitude equations, and ensemble-averaged two-time
//! correlators.
//!
//! The dephasing phase φ(t) = ∫₀ᵗ f dt′ is a Wiener path with increment
//! variance ⟨dφ²⟩ = 2 γ_p dt. It enters only through the coupling phase
//! e^{±i(Δt+φ)}, so one step of the integrator is the exact exponential of
//! the generator frozen at the mid-step phase:
//!
//! ```text
//! A(ψ) = [[−γ, −i g0 e^{iψ}], [−i g0 e^{−iψ}, −κ]],  ψ = Δ(t+dt/2) + φ(t+dt/2)
//! ```
//!
//! Decay is treated exactly (A + A† = diag(−2γ, −2κ), so every step is a
//! contraction and |E|²+|C|² never grows), and the mid-step phase is a true
//! sample of the Wiener path: noise paths are generated on the half-step
//! grid. This is the Stratonovich (physical white-noise-limit) reading of
//! the multiplicative phase; its validation is the agreement with the
//! regression backend.
//!
//! Reproducibility contract: trajectory i uses an RNG seeded by
//! `derive_seed(master_seed, i)` (a SplitMix64 mix), batches accumulate in
//! fixed index order, and batch partial sums combine in batch order.
//! Results are bit-identical for a given (master_seed, n_traj, batch_count,
//! grid) on any thread count and platform.

use num_complex::Complex64;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::Error;
use crate::model::{AmplitudeState, SystemParams};
use crate::spectra::CorrelationPlan;
use crate::Result;

/// One realization of the cumulative dephasing phase φ(t), φ(0) = 0.
#[derive(Debug, Clone)]
pub struct NoisePath {
    pub seed: u64,
    /// grid spacing of `phi`, ns
    pub dt: f64,
    /// φ(i·dt), radians; increments are i.i.d. N(0, 2 γ_p dt)
    pub phi: Vec<f64>,
}

/// Wiener phase path on a uniform grid; deterministic in `seed`.
pub fn generate_noise(gamma_p: f64, dt: f64, n_steps: usize, seed: u64) -> NoisePath {
    let mut phi = Vec::with_capacity(n_steps + 1);
    phi.push(0.0);
    if gamma_p == 0.0 {
        phi.resize(n_steps + 1, 0.0);
        return NoisePath { seed, dt, phi };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = Normal::new(0.0, (2.0 * gamma_p * dt).sqrt()).expect("valid stddev");
    let mut acc = 0.0;
    for _ in 0..n_steps {
        acc += step.sample(&mut rng);
        phi.push(acc);
    }
    NoisePath { seed, dt, phi }
}

/// SplitMix64; the per-trajectory seed derivation.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for trajectory `index` under `master_seed`; execution-order free.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index.wrapping_add(0x517c_c1b7_2722_0a95)))
}

/// Stability guard threshold for dt * max-rate.
const STEP_GUARD: f64 = 0.1;

/// Per-step propagator scalars; the phase enters only the off-diagonal.
struct StepCoeffs {
    /// e^{α dt} cosh(μ dt)
    ch: f64,
    /// e^{α dt} sinh(μ dt)/μ
    sl: f64,
    /// (κ−γ)/2
    b: f64,
    g0: f64,
}

fn step_coeffs(p: &SystemParams, dt: f64) -> StepCoeffs {
    let alpha = -0.5 * (p.gamma + p.kappa);
    let b = 0.5 * (p.kappa - p.gamma);
    let mu2 = b * b - p.g0 * p.g0;
    let ea = (alpha * dt).exp();
    let (ch, sl) = if mu2.abs() < 1e-12 {
        (ea, ea * dt)
    } else if mu2 > 0.0 {
        let mu = mu2.sqrt();
        (ea * (mu * dt).cosh(), ea * (mu * dt).sinh() / mu)
    } else {
        let w = (-mu2).sqrt();
        (ea * (w * dt).cos(), ea * (w * dt).sin() / w)
    };
    StepCoeffs { ch, sl, b, g0: p.g0 }
}

#[inline]
fn advance(
    c: &StepCoeffs,
    psi: f64,
    e: Complex64,
    cav: Complex64,
) -> (Complex64, Complex64) {
    let p = Complex64::from_polar(1.0, psi);
    let coupling = Complex64::new(0.0, -c.g0) * c.sl;
    let e_next = (c.ch + c.sl * c.b) * e + coupling * p * cav;
    let c_next = coupling * p.conj() * e + (c.ch - c.sl * c.b) * cav;
    (e_next, c_next)
}

/// Integrate one noisy trajectory on `n_steps` steps of `dt`.
///
/// `noise` must be sampled on the half-step grid (`noise.dt == dt/2`) so the
/// integrator can read true mid-step phase values.
pub fn integrate_trajectory(
    p: &SystemParams,
    noise: &NoisePath,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<AmplitudeState>> {
    let rate = p
        .g0
        .max(p.kappa)
        .max(p.gamma)
        .max(p.delta.abs())
        .max(p.gamma_p);
    if dt * rate > STEP_GUARD * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge {
            value: dt * rate,
            limit: STEP_GUARD,
        });
    }
    if (noise.dt - dt / 2.0).abs() > 1e-12 * dt {
        return Err(Error::InvalidInput(format!(
            "noise path step {} is not half the integrator step {}",
            noise.dt, dt
        )));
    }
    if noise.phi.len() < 2 * n_steps + 1 {
        return Err(Error::InvalidInput(format!(
            "noise path too short: {} samples for {} steps",
            noise.phi.len(),
            n_steps
        )));
    }

    let coeffs = step_coeffs(p, dt);
    let mut e = Complex64::new(1.0, 0.0);
    let mut c = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(AmplitudeState { e_amp: e, c_amp: c, t: 0.0 });
    for i in 0..n_steps {
        let t_mid = (i as f64 + 0.5) * dt;
        let psi = p.delta * t_mid + noise.phi[2 * i + 1];
        (e, c) = advance(&coeffs, psi, e, c);
        out.push(AmplitudeState {
            e_amp: e,
            c_amp: c,
            t: (i + 1) as f64 * dt,
        });
    }
    Ok(out)
}

/// Ensemble size, seeding and batching for error estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub master_seed: u64,
    /// number of batches for batch-mean standard errors; must divide n_traj
    pub batch_count: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_traj: 20_000,
            master_seed: 1,
            batch_count: 20,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidInput("n_traj must be >= 1".into()));
        }
        if self.batch_count == 0 || self.n_traj % self.batch_count != 0 {
            return Err(Error::InvalidInput(format!(
                "batch_count {} must divide n_traj {}",
                self.batch_count, self.n_traj
            )));
        }
        Ok(())
    }
}

/// Statistical annotations of a Monte Carlo correlation grid.
#[derive(Debug, Clone)]
pub struct CorrelationStats {
    /// standard error of the complex mean per (t, τ) cell, flattened
    pub se_e: Vec<f64>,
    pub se_c: Vec<f64>,
    /// per-batch t-integrated correlators, [batch][τ]
    pub batch_g_e: Vec<Vec<Complex64>>,
    pub batch_g_c: Vec<Vec<Complex64>>,
}

/// Two-time correlators ⟨E(t+τ)E*(t)⟩, ⟨C(t+τ)C*(t)⟩ on a decimated
/// (t, τ) grid, row-major `[t][τ]`.
#[derive(Debug, Clone)]
pub struct CorrelationGrid {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub corr_e: Vec<Complex64>,
    pub corr_c: Vec<Complex64>,
    /// present for the Monte Carlo backend only
    pub stats: Option<CorrelationStats>,
}

impl CorrelationGrid {
    pub fn n_t(&self) -> usize {
        self.t.len()
    }

    pub fn n_tau(&self) -> usize {
        self.tau.len()
    }

    pub fn at_e(&self, i: usize, j: usize) -> Complex64 {
        self.corr_e[i * self.tau.len() + j]
    }

    pub fn at_c(&self, i: usize, j: usize) -> Complex64 {
        self.corr_c[i * self.tau.len() + j]
    }

    /// Trapezoid weights of the outer t grid.
    pub fn t_weights(&self) -> Vec<f64> {
        let n = self.t.len();
        if n == 1 {
            return vec![1.0];
        }
        let h = self.t[1] - self.t[0];
        (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect()
    }

    /// t-integrated correlators G_X(τ) = Σ_t w_t corr_X[t][τ].
    pub fn t_integrated(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let w = self.t_weights();
        let m = self.tau.len();
        let mut ge = vec![Complex64::new(0.0, 0.0); m];
        let mut gc = vec![Complex64::new(0.0, 0.0); m];
        for (i, &wi) in w.iter().enumerate() {
            let row_e = &self.corr_e[i * m..(i + 1) * m];
            let row_c = &self.corr_c[i * m..(i + 1) * m];
            for j in 0..m {
                ge[j] += wi * row_e[j];
                gc[j] += wi * row_c[j];
            }
        }
        (ge, gc)
    }
}

struct BatchAccum {
    sum_e: Vec<Complex64>,
    sum_c: Vec<Complex64>,
    sq_e: Vec<f64>,
    sq_c: Vec<f64>,
    g_e: Vec<Complex64>,
    g_c: Vec<Complex64>,
}

fn run_batch(
    p: &SystemParams,
    plan: &CorrelationPlan,
    master_seed: u64,
    traj_range: std::ops::Range<usize>,
) -> BatchAccum {
    let n_outer = plan.n_outer();
    let n_tau1 = plan.n_tau + 1;
    let n_cells = n_outer * n_tau1;
    let mut acc = BatchAccum {
        sum_e: vec![Complex64::new(0.0, 0.0); n_cells],
        sum_c: vec![Complex64::new(0.0, 0.0); n_cells],
        sq_e: vec![0.0; n_cells],
        sq_c: vec![0.0; n_cells],
        g_e: vec![Complex64::new(0.0, 0.0); n_tau1],
        g_c: vec![Complex64::new(0.0, 0.0); n_tau1],
    };

    let n_hist = plan.n_t + plan.n_tau * plan.tau_stride;
    let n_sub = n_hist / plan.tau_stride;
    let outer_q = plan.outer_stride / plan.tau_stride;
    let coeffs = step_coeffs(p, plan.dt);
    let w = plan.t_weights();

    let mut e_sub = vec![Complex64::new(0.0, 0.0); n_sub + 1];
    let mut c_sub = vec![Complex64::new(0.0, 0.0); n_sub + 1];

    for traj in traj_range {
        let seed = derive_seed(master_seed, traj as u64);
        let noise = generate_noise(p.gamma_p, plan.dt / 2.0, 2 * n_hist, seed);
        let mut e = Complex64::new(1.0, 0.0);
        let mut c = Complex64::new(0.0, 0.0);
        e_sub[0] = e;
        c_sub[0] = c;
        for i in 0..n_hist {
            let t_mid = (i as f64 + 0.5) * plan.dt;
            let psi = p.delta * t_mid + noise.phi[2 * i + 1];
            (e, c) = advance(&coeffs, psi, e, c);
            if (i + 1) % plan.tau_stride == 0 {
                let q = (i + 1) / plan.tau_stride;
                e_sub[q] = e;
                c_sub[q] = c;
            }
        }

        for i in 0..n_outer {
            let base = i * outer_q;
            let eb = e_sub[base].conj();
            let cb = c_sub[base].conj();
            let wi = w[i];
            let row = i * n_tau1;
            for j in 0..n_tau1 {
                let pe = e_sub[base + j] * eb;
                let pc = c_sub[base + j] * cb;
                acc.sum_e[row + j] += pe;
                acc.sum_c[row + j] += pc;
                acc.sq_e[row + j] += pe.norm_sqr();
                acc.sq_c[row + j] += pc.norm_sqr();
                acc.g_e[j] += wi * pe;
                acc.g_c[j] += wi * pc;
            }
        }
    }
    acc
}

/// Ensemble-averaged correlation grid.
///
/// Deterministic for fixed (config, plan, params) regardless of thread
/// count: each batch is reduced sequentially in trajectory order and batch
/// partials combine in batch order; parallelism only distributes whole
/// batches.
pub fn ensemble_correlations(
    p: &SystemParams,
    config: &EnsembleConfig,
    plan: &CorrelationPlan,
) -> Result<CorrelationGrid> {
    config.validate()?;
    let per_batch = config.n_traj / config.batch_count;
    let n_outer = plan.n_outer();
    let n_tau1 = plan.n_tau + 1;
    let n_cells = n_outer * n_tau1;

    let mut total = BatchAccum {
        sum_e: vec![Complex64::new(0.0, 0.0); n_cells],
        sum_c: vec![Complex64::new(0.0, 0.0); n_cells],
        sq_e: vec![0.0; n_cells],
        sq_c: vec![0.0; n_cells],
        g_e: vec![Complex64::new(0.0, 0.0); n_tau1],
        g_c: vec![Complex64::new(0.0, 0.0); n_tau1],
    };
    let mut batch_g_e = Vec::with_capacity(config.batch_count);
    let mut batch_g_c = Vec::with_capacity(config.batch_count);

    // waves of whole batches bound the number of live accumulators
    let wave = (rayon::current_num_threads().max(1) * 2).min(config.batch_count);
    let mut next = 0usize;
    while next < config.batch_count {
        let hi = (next + wave).min(config.batch_count);
        let accs: Vec<BatchAccum> = (next..hi)
            .into_par_iter()
            .map(|b| run_batch(p, plan, config.master_seed, b * per_batch..(b + 1) * per_batch))
            .collect();
        for acc in accs {
            for (t, x) in total.sum_e.iter_mut().zip(&acc.sum_e) {
                *t += x;
            }
            for (t, x) in total.sum_c.iter_mut().zip(&acc.sum_c) {
                *t += x;
            }
            for (t, x) in total.sq_e.iter_mut().zip(&acc.sq_e) {
                *t += x;
            }
            for (t, x) in total.sq_c.iter_mut().zip(&acc.sq_c) {
                *t += x;
            }
            for (t, x) in total.g_e.iter_mut().zip(&acc.g_e) {
                *t += x;
            }
            for (t, x) in total.g_c.iter_mut().zip(&acc.g_c) {
                *t += x;
            }
            let inv = 1.0 / per_batch as f64;
            batch_g_e.push(acc.g_e.iter().map(|z| z * inv).collect());
            batch_g_c.push(acc.g_c.iter().map(|z| z * inv).collect());
        }
        next = hi;
    }

    let n = config.n_traj as f64;
    let mean = |sum: &[Complex64]| -> Vec<Complex64> { sum.iter().map(|z| z / n).collect() };
    let corr_e = mean(&total.sum_e);
    let corr_c = mean(&total.sum_c);
    let se = |sq: &[f64], m: &[Complex64]| -> Vec<f64> {
        sq.iter()
            .zip(m)
            .map(|(&s2, z)| {
                if config.n_traj < 2 {
                    0.0
                } else {
                    let var = (s2 / n - z.norm_sqr()).max(0.0) * n / (n - 1.0);
                    (var / n).sqrt()
                }
            })
            .collect()
    };
    let se_e = se(&total.sq_e, &corr_e);
    let se_c = se(&total.sq_c, &corr_c);

    let dt_outer = plan.dt * plan.outer_stride as f64;
    let d_tau = plan.d_tau();
    Ok(CorrelationGrid {
        t: (0..n_outer).map(|i| i as f64 * dt_outer).collect(),
        tau: (0..n_tau1).map(|j| j as f64 * d_tau).collect(),
        corr_e,
        corr_c,
        stats: Some(CorrelationStats {
            se_e,
            se_c,
            batch_g_e,
            batch_g_c,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::spectra::{correlation_plan, SolverQuality};

    fn fig2(gamma_p: f64, delta: f64) -> SystemParams {
        SystemParams::new(8.0, 1.6, 0.32, gamma_p, delta).unwrap()
    }

    #[test]
    fn zero_dephasing_noise_is_zero() {
        let n = generate_noise(0.0, 0.01, 1000, 42);
        assert!(n.phi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn noise_increment_variance_matches_model() {
        // sample variance of 1e5 increments within 3σ of the χ² spread
        let (gamma_p, dt, n) = (5.0, 0.01, 100_000usize);
        let path = generate_noise(gamma_p, dt, n, 7);
        let incs: Vec<f64> = path.phi.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = incs.iter().sum::<f64>() / n as f64;
        let var = incs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        let expected = 2.0 * gamma_p * dt;
        let tol = 3.0 * (2.0 / (n as f64 - 1.0)).sqrt() * expected;
        assert!(
            (var - expected).abs() < tol,
            "var {var} vs {expected} ± {tol}"
        );
    }

    #[test]
    fn same_seed_same_path() {
        let a = generate_noise(3.0, 0.005, 5000, 123);
        let b = generate_noise(3.0, 0.005, 5000, 123);
        assert_eq!(a.phi, b.phi);
        let c = generate_noise(3.0, 0.005, 5000, 124);
        assert!(a.phi != c.phi);
    }

    #[test]
    fn trajectory_matches_closed_form_without_noise() {
        // O(dt²) global error; at dt = 1e-3 the max amplitude error < 1e-4
        // (on resonance the frozen-phase step is the exact propagator, so
        // this holds with an enormous margin)
        let p = fig2(0.0, 0.0);
        let dt = 1e-3;
        let n = 8000;
        let noise = generate_noise(0.0, dt / 2.0, 2 * n, 0);
        let traj = integrate_trajectory(&p, &noise, dt, n).unwrap();
        let ts: Vec<f64> = traj.iter().map(|a| a.t).collect();
        let exact = closed_form::solve_amplitudes(&p, &ts);
        let mut max_err = 0.0f64;
        for (got, want) in traj.iter().zip(&exact) {
            max_err = max_err
                .max((got.e_amp - want.e_amp).norm())
                .max((got.c_amp - want.c_amp).norm());
        }
        assert!(max_err < 1e-4, "max_err = {max_err:.3e}");
    }

    #[test]
    fn step_halving_shows_second_order_convergence() {
        // detuned: the mid-step phase freeze leaves a genuine O(dt²) error
        let p = fig2(0.0, 8.0);
        let dt = 2e-3;
        let n = 4000;
        let t_end = dt * n as f64;
        let exact = closed_form::solve_amplitudes(&p, &[t_end])[0];
        let err_at = |steps: usize| -> f64 {
            let h = t_end / steps as f64;
            let noise = generate_noise(0.0, h / 2.0, 2 * steps, 0);
            let traj = integrate_trajectory(&p, &noise, h, steps).unwrap();
            (traj.last().unwrap().e_amp - exact.e_amp).norm()
                + (traj.last().unwrap().c_amp - exact.c_amp).norm()
        };
        let e1 = err_at(n);
        let e2 = err_at(2 * n);
        let order = (e1 / e2).log2();
        assert!(
            (1.6..2.6).contains(&order),
            "convergence order {order:.2} (errors {e1:.2e} -> {e2:.2e})"
        );
    }

    #[test]
    fn decoupled_decay_is_exact_per_step() {
        let p = SystemParams::new(0.0, 1.6, 0.32, 0.0, 0.0).unwrap();
        let dt = 0.05;
        let noise = generate_noise(0.0, dt / 2.0, 40, 0);
        let traj = integrate_trajectory(&p, &noise, dt, 20).unwrap();
        for a in &traj {
            let expect = (-0.32 * a.t).exp();
            assert!((a.e_amp.re - expect).abs() < 1e-14);
            assert!(a.c_amp.norm() < 1e-300);
        }
    }

    #[test]
    fn dissipativity_along_noisy_trajectories() {
        let p = fig2(5.0, 16.0);
        let dt = 2e-3;
        let n = 4000;
        for seed in [1u64, 99, 919] {
            let noise = generate_noise(p.gamma_p, dt / 2.0, 2 * n, seed);
            let traj = integrate_trajectory(&p, &noise, dt, n).unwrap();
            let mut prev = f64::INFINITY;
            for a in &traj {
                let exc = a.excitation();
                assert!(exc <= prev * (1.0 + 1e-13), "excitation grew at t={}", a.t);
                prev = exc;
            }
            assert!(traj.last().unwrap().excitation() <= 1.0);
        }
    }

    #[test]
    fn step_guard_rejects_large_dt() {
        let p = fig2(0.0, 80.0);
        let noise = generate_noise(0.0, 0.005, 200, 0);
        assert!(matches!(
            integrate_trajectory(&p, &noise, 0.01, 100),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn ensemble_zero_dephasing_is_deterministic_product() {
        // all realizations identical: corr_E[t][τ] = E(t+τ)E*(t) exactly
        let p = fig2(0.0, 8.0);
        let q = SolverQuality::standard();
        let plan = correlation_plan(&p, &q, 60.0, 32).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 4,
            master_seed: 5,
            batch_count: 2,
        };
        let grid = ensemble_correlations(&p, &cfg, &plan).unwrap();
        let dt_fine = plan.dt;
        let n_hist = plan.n_t + plan.n_tau * plan.tau_stride;
        let noise = generate_noise(0.0, dt_fine / 2.0, 2 * n_hist, 0);
        let traj = integrate_trajectory(&p, &noise, dt_fine, n_hist).unwrap();
        for i in (0..grid.n_t()).step_by(7) {
            let base = i * plan.outer_stride;
            for j in (0..grid.n_tau()).step_by(11) {
                let expect = traj[base + j * plan.tau_stride].e_amp * traj[base].e_amp.conj();
                let got = grid.at_e(i, j);
                assert!((got - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn ensemble_deterministic_across_thread_counts() {
        let p = fig2(4.0, 12.0);
        let q = SolverQuality::standard();
        let plan = correlation_plan(&p, &q, 80.0, 24).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 64,
            master_seed: 17,
            batch_count: 8,
        };
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let g1 = pool1.install(|| ensemble_correlations(&p, &cfg, &plan)).unwrap();
        let g4 = pool4.install(|| ensemble_correlations(&p, &cfg, &plan)).unwrap();
        assert_eq!(g1.corr_e, g4.corr_e);
        assert_eq!(g1.corr_c, g4.corr_c);
        let (s1, s4) = (g1.stats.unwrap(), g4.stats.unwrap());
        assert_eq!(s1.se_e, s4.se_e);
        assert_eq!(s1.batch_g_c, s4.batch_g_c);
    }

    #[test]
    fn tau_zero_column_matches_moments_within_errors() {
        let p = fig2(5.0, 0.0);
        let q = SolverQuality::standard();
        let plan = correlation_plan(&p, &q, 80.0, 24).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 2000,
            master_seed: 3,
            batch_count: 10,
        };
        let grid = ensemble_correlations(&p, &cfg, &plan).unwrap();
        let stats = grid.stats.as_ref().unwrap();
        let n_tau1 = grid.n_tau();
        let mut violations = 0;
        for (i, &t) in grid.t.iter().enumerate() {
            let m = crate::regression::moments_at(&p, t);
            let got = grid.at_e(i, 0);
            // τ=0 diagonal is real and in [0, 1]
            assert!(got.im.abs() < 1e-12);
            assert!(got.re >= 0.0 && got.re <= 1.0 + 1e-12);
            let se = stats.se_e[i * n_tau1].max(1e-12);
            if (got.re - m.n_e).abs() > 3.0 * se {
                violations += 1;
            }
        }
        // a few 3σ excursions among ~24 points are statistically possible
        assert!(violations <= 2, "{violations} cells off by > 3 SE");
    }

    #[test]
    fn batch_error_scales_with_ensemble_size() {
        // quadrupling n_traj halves the batch-mean error (within 30%)
        let p = fig2(5.0, 8.0);
        let q = SolverQuality::standard();
        let plan = correlation_plan(&p, &q, 80.0, 16).unwrap();
        let err_of = |n_traj: usize, seed: u64| -> f64 {
            let cfg = EnsembleConfig {
                n_traj,
                master_seed: seed,
                batch_count: 8,
            };
            let grid = ensemble_correlations(&p, &cfg, &plan).unwrap();
            let stats = grid.stats.unwrap();
            // aggregate spread of batch means of G_E
            let n_tau1 = grid.tau.len();
            let mean: Vec<Complex64> = (0..n_tau1)
                .map(|j| stats.batch_g_e.iter().map(|b| b[j]).sum::<Complex64>() / 8.0)
                .collect();
            let mut acc = 0.0;
            for b in &stats.batch_g_e {
                for j in 0..n_tau1 {
                    acc += (b[j] - mean[j]).norm_sqr();
                }
            }
            acc.sqrt()
        };
        // average over a few master seeds to tame the χ² spread of the
        // error estimate itself
        let seeds = [11u64, 12, 13, 14];
        let e1: f64 = seeds.iter().map(|&s| err_of(400, s)).sum::<f64>() / 4.0;
        let e4: f64 = seeds.iter().map(|&s| err_of(1600, s)).sum::<f64>() / 4.0;
        let ratio = e1 / e4;
        assert!(
            (1.4..2.9).contains(&ratio),
            "error ratio {ratio:.2}, expected ≈ 2"
        );
    }
}
