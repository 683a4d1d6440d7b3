//! Exact zero-dephasing solutions: amplitudes from the 2x2 matrix
//! exponential and rational-function spectra.
//!
//! For deterministic amplitudes the double integral of the spectra
//! collapses (Re ∫∫ e^{iθτ} X(t+τ)X*(t) = ½|X̂(θ)|² with X̂ the one-sided
//! transform), giving
//!
//! ```text
//! S_E(Ω) = (γ/π) |−iΩ+κ|² / |D(Ω)|²
//! S_C(Ω) = (κ/π) g0²      / |D(Ω)|²
//! D(Ω)   = (−iΩ+γ+iΔ)(−iΩ+κ) + g0²
//! ```
//!
//! This backend is the highest-precision oracle in the crate; the generic
//! pipeline (ODE → correlators → transform) must agree with it to 1e-6,
//! which is exactly what the collapsed-form identity assumes and therefore
//! what the acceptance check verifies.

use num_complex::Complex64;

use crate::error::Error;
use crate::fourier::CorrelatorSeries;
use crate::linalg::Mat2;
use crate::model::{system_matrix, AmplitudeState, SystemParams};
use crate::spectra::{Backend, SolverQuality, Spectrum, SpectrumMeta};
use crate::Result;

/// Amplitudes E(t), C(t) for E(0)=1, C(0)=0 at γ_p = 0 (γ_p is ignored by
/// this backend). Exact per grid point; the grid need not be uniform.
pub fn solve_amplitudes(p: &SystemParams, t_grid: &[f64]) -> Vec<AmplitudeState> {
    let m = system_matrix(p);
    let init = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    t_grid
        .iter()
        .map(|&t| {
            let v = m.exp_scaled(t).apply(init);
            // rotating-frame Ẽ back to the emitter frame: E = Ẽ e^{iΔt}
            let phase = Complex64::from_polar(1.0, p.delta * t);
            AmplitudeState {
                e_amp: v[0] * phase,
                c_amp: v[1],
                t,
            }
        })
        .collect()
}

/// (S_E, S_C) at a single frequency.
pub fn spectral_density(p: &SystemParams, omega: f64) -> (f64, f64) {
    let i = Complex64::new(0.0, 1.0);
    let d = (-i * omega + p.gamma + i * p.delta) * (-i * omega + p.kappa) + p.g0 * p.g0;
    let d2 = d.norm_sqr();
    let s_e = p.gamma / std::f64::consts::PI * (-i * omega + p.kappa).norm_sqr() / d2;
    let s_c = p.kappa / std::f64::consts::PI * p.g0 * p.g0 / d2;
    (s_e, s_c)
}

/// Closed-form spectra on an arbitrary frequency grid.
pub fn spectra_on(p: &SystemParams, omega: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut s_e = Vec::with_capacity(omega.len());
    let mut s_c = Vec::with_capacity(omega.len());
    for &w in omega {
        let (e, c) = spectral_density(p, w);
        s_e.push(e);
        s_c.push(c);
    }
    (s_e, s_c)
}

pub fn spectrum(p: &SystemParams, omega: &[f64], q: &SolverQuality) -> Spectrum {
    let (s_e, s_c) = spectra_on(p, omega);
    Spectrum {
        omega: omega.to_vec(),
        s_e,
        s_c,
        s_e_err: None,
        s_c_err: None,
        meta: SpectrumMeta {
            params: *p,
            backend: Backend::ClosedForm,
            quality: *q,
        },
    }
}

/// Adaptive Simpson quadrature with interval doubling until the measured
/// tail contribution drops below 1e-6: ∫(S_E+S_C) dΩ over the real line.
pub fn norm_integral(p: &SystemParams) -> f64 {
    let f = |w: f64| {
        let (a, b) = spectral_density(p, w);
        a + b
    };
    let w_scale = p.total_width();
    let mut half_span = 10.0 * w_scale;
    for _ in 0..24 {
        let lo = p.delta.min(0.0) - half_span;
        let hi = p.delta.max(0.0) + half_span;
        let (se_lo, sc_lo) = spectral_density(p, lo);
        let (se_hi, sc_hi) = spectral_density(p, hi);
        let tail = se_lo * (lo - p.delta).abs()
            + se_hi * (hi - p.delta).abs()
            + sc_lo * lo.abs() / 3.0
            + sc_hi * hi.abs() / 3.0;
        if tail < 1e-6 {
            // split at the two feature centres so the recursion sees the
            // narrow peaks early
            let a = p.delta.min(0.0);
            let b = p.delta.max(0.0);
            let mut total = adaptive_simpson(&f, lo, a, 1e-10, 48)
                + adaptive_simpson(&f, b, hi, 1e-10, 48);
            if b > a {
                total += adaptive_simpson(&f, a, b, 1e-10, 48);
            }
            return total + tail;
        }
        half_span *= 2.0;
    }
    f64::NAN
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, m, fm, whole, tol.max(1e-14), depth)
}

fn outer(a: [Complex64; 2], b: [Complex64; 2]) -> Mat2 {
    Mat2::new(
        a[0] * b[0].conj(),
        a[0] * b[1].conj(),
        a[1] * b[0].conj(),
        a[1] * b[1].conj(),
    )
}

fn mat_add(x: Mat2, y: Mat2, w: f64) -> Mat2 {
    Mat2::new(x.a + w * y.a, x.b + w * y.b, x.c + w * y.c, x.d + w * y.d)
}

/// The generic deterministic pipeline at γ_p = 0: solve the amplitude ODE
/// on a fine grid, t-integrate the correlators, and hand τ series (in the
/// cavity-rotating frame, so both kernels reduce to e^{iΩτ}) to the shared
/// transform. Exercises the full correlation route independently of the
/// collapsed rational form.
///
/// Returns (emitter series, cavity series); both carry `theta_shift = 0`.
pub fn tau_series_dense(
    p: &SystemParams,
    q: &SolverQuality,
    theta_abs: f64,
) -> Result<(CorrelatorSeries, CorrelatorSeries)> {
    if p.gamma_p != 0.0 {
        return Err(Error::InvalidInput(
            "dense closed-form pipeline requires gamma_p = 0".into(),
        ));
    }
    let m = system_matrix(p);
    let (l1, l2) = m.eigenvalues();
    let slow = l1.re.max(l2.re);
    if slow >= -1e-12 {
        return Err(Error::HorizonCapExceeded {
            steps_needed: f64::INFINITY,
            cap: crate::spectra::HORIZON_STEP_CAP,
        });
    }
    let t_end = (1.0 / q.t_residual).ln() / (2.0 * -slow);
    let tau_end = (1.0 / q.tau_rel_cut).ln() / -slow;

    // t quadrature of Q = ∫ v v† dt; the integrand beats at eigenvalue
    // frequency differences, bounded by 2 max|Im λ|. The t grid is short,
    // so it can afford half the phase budget of the τ grid.
    let omega_t = 2.0 * l1.im.abs().max(l2.im.abs());
    let h_t = (0.5 * q.theta_dtau_max / omega_t.max(1e-12)).min(t_end / 64.0);
    let n_t = (t_end / h_t).ceil() as usize;
    if n_t > crate::spectra::MAX_TAU_SAMPLES {
        return Err(Error::HorizonCapExceeded {
            steps_needed: n_t as f64,
            cap: crate::spectra::MAX_TAU_SAMPLES,
        });
    }
    let prop_t = m.exp_scaled(h_t);
    let init = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut v = init;
    let mut q_mat = Mat2::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    for i in 0..=n_t {
        let w = if i == 0 || i == n_t { 0.5 * h_t } else { h_t };
        q_mat = mat_add(q_mat, outer(v, v), w);
        v = prop_t.apply(v);
    }
    let v_end = m.exp_scaled(n_t as f64 * h_t).apply(init);
    // Euler-Maclaurin endpoint corrections of the t integral (orders h², h⁴)
    let powers = |u: [Complex64; 2]| -> Vec<[Complex64; 2]> {
        let mut out = vec![u];
        for k in 1..=3 {
            out.push(m.apply(out[k - 1]));
        }
        out
    };
    let d0 = powers(init);
    let d1 = powers(v_end);
    let y_deriv = |d: &[[Complex64; 2]], k: usize| -> Mat2 {
        // Y^{(k)} = Σ_j C(k,j) (M^j v)(M^{k−j} v)†
        let mut acc = Mat2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let binom: &[f64] = match k {
            1 => &[1.0, 1.0],
            3 => &[1.0, 3.0, 3.0, 1.0],
            _ => unreachable!(),
        };
        for (j, &c) in binom.iter().enumerate() {
            acc = mat_add(acc, outer(d[j], d[k - j]), c);
        }
        acc
    };
    let em_coeff = [-1.0 / 12.0, 1.0 / 720.0];
    for (mth, &coeff) in em_coeff.iter().enumerate().take(q.em_order.min(2)) {
        let k = 2 * mth + 1;
        let corr = mat_add(y_deriv(&d1, k), y_deriv(&d0, k), -1.0); // Y^{(k)}(T) − Y^{(k)}(0)
        q_mat = mat_add(q_mat, corr, coeff * h_t.powi(2 * (mth + 1) as i32));
    }

    // τ series: G_X(τ) = [e^{Mτ} Q]_XX
    let h_tau = (q.theta_dtau_max / theta_abs.max(1e-12)).min(tau_end / 16.0);
    let n_tau = (tau_end / h_tau).ceil() as usize;
    if n_tau > crate::spectra::MAX_TAU_SAMPLES {
        return Err(Error::HorizonCapExceeded {
            steps_needed: n_tau as f64,
            cap: crate::spectra::MAX_TAU_SAMPLES,
        });
    }
    let prop_tau = m.exp_scaled(h_tau);
    let mut r = q_mat;
    let mut ge = Vec::with_capacity(n_tau + 1);
    let mut gc = Vec::with_capacity(n_tau + 1);
    for _ in 0..=n_tau {
        ge.push(r.a);
        gc.push(r.d);
        r = prop_tau.mul(&r);
    }
    let r_end = m.exp_scaled(n_tau as f64 * h_tau).mul(&q_mat);
    let derivs = |which: fn(&Mat2) -> Complex64, at: Mat2| -> Vec<Complex64> {
        let mut out = Vec::with_capacity(6);
        let mut cur = at;
        for _ in 0..6 {
            out.push(which(&cur));
            cur = m.mul(&cur);
        }
        out
    };
    let series_e = CorrelatorSeries {
        values: ge,
        d_tau: h_tau,
        left_derivs: derivs(|x| x.a, q_mat),
        right_derivs: derivs(|x| x.a, r_end),
        theta_shift: 0.0,
    };
    let series_c = CorrelatorSeries {
        values: gc,
        d_tau: h_tau,
        left_derivs: derivs(|x| x.d, q_mat),
        right_derivs: derivs(|x| x.d, r_end),
        theta_shift: 0.0,
    };
    Ok((series_e, series_c))
}
