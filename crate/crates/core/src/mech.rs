//! Classical analogue: a damped mass driven through a spring by a piston
//! whose phase randomizes at Poisson times.
//!
//! ```text
//! ẍ + κ_c ẋ + (k_c + g_c) x = g_c f(t),   f = A cos(ω_d t + θ(t))
//! ```
//!
//! with θ jumping to an independent Uniform[0, 2π) value at each event.
//! Every jump re-excites the transient at the eigenfrequency √(k_c+g_c),
//! so the spectral weight at the eigenfrequency grows with the jump rate —
//! the same intensity shifting the emitter-cavity system shows under pure
//! dephasing, in a purely classical setting.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::Mat2;
use crate::Result;

/// Piston-mass model parameters. The mass is 1, so spring constants are
/// squared angular frequencies ((rad/ns)²) and κ_c is a rate (1/ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechParams {
    pub k_c: f64,
    pub g_c: f64,
    pub kappa_c: f64,
    /// rad/ns
    pub drive_freq: f64,
    /// Poisson rate of phase-randomization events, 1/ns
    pub jump_rate: f64,
    pub amplitude: f64,
}

impl MechParams {
    pub fn new(
        k_c: f64,
        g_c: f64,
        kappa_c: f64,
        drive_freq: f64,
        jump_rate: f64,
        amplitude: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("k_c", k_c),
            ("g_c", g_c),
            ("kappa_c", kappa_c),
            ("jump_rate", jump_rate),
        ] {
            if !(v >= 0.0) {
                return Err(Error::NegativeRate { name, value: v });
            }
        }
        Ok(Self {
            k_c,
            g_c,
            kappa_c,
            drive_freq,
            jump_rate,
            amplitude,
        })
    }

    /// Eigenfrequency √(k_c + g_c) of the mass.
    pub fn eigenfrequency(&self) -> f64 {
        (self.k_c + self.g_c).sqrt()
    }

    /// Steady-state response amplitude to a pure sinusoidal drive.
    pub fn steady_amplitude(&self) -> f64 {
        let w = self.drive_freq;
        let denom = Complex64::new(self.k_c + self.g_c - w * w, self.kappa_c * w);
        self.g_c * self.amplitude / denom.norm()
    }
}

/// Poisson phase-jump events in [0, t_max): (time, new phase).
pub fn piston_events(mech: &MechParams, t_max: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut events = Vec::new();
    if mech.jump_rate == 0.0 {
        return events;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / mech.jump_rate;
        if t >= t_max {
            return events;
        }
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        events.push((t, phase));
    }
}

/// Piston position f(t) on the given grid; deterministic per seed.
pub fn piston_signal(mech: &MechParams, t_grid: &[f64], seed: u64) -> Vec<f64> {
    let t_max = t_grid.last().copied().unwrap_or(0.0) + 1e-12;
    let events = piston_events(mech, t_max, seed);
    let mut phase = 0.0;
    let mut next = 0usize;
    t_grid
        .iter()
        .map(|&t| {
            while next < events.len() && events[next].0 <= t {
                phase = events[next].1;
                next += 1;
            }
            mech.amplitude * (mech.drive_freq * t + phase).cos()
        })
        .collect()
}

/// x(t) for x(0) = ẋ(0) = 0 given piston samples on a uniform grid.
///
/// The homogeneous part is propagated exactly; the forcing is integrated
/// exactly for a piecewise-linear f, so the scheme is second-order in the
/// sampling of f.
pub fn simulate_mass(mech: &MechParams, f: &[f64], dt: f64) -> Vec<f64> {
    simulate_mass_from(mech, f, dt, 0.0, 0.0)
}

pub fn simulate_mass_from(mech: &MechParams, f: &[f64], dt: f64, x0: f64, v0: f64) -> Vec<f64> {
    let w2 = mech.k_c + mech.g_c;
    if w2 == 0.0 {
        // both springs absent: no restoring force and no forcing (g_c = 0)
        return vec![x0; f.len()];
    }
    let z = |re: f64| Complex64::new(re, 0.0);
    let h = Mat2::new(z(0.0), z(1.0), z(-w2), z(-mech.kappa_c));
    let p = h.exp_scaled(dt);
    // I0 = H^{-1}(P − I),  J = H^{-1}(dt·P − I0),  I1 = I0 − J/dt
    let hinv = {
        let det = w2; // det H = ω₀²
        Mat2::new(
            z(-mech.kappa_c / det),
            z(-1.0 / det),
            z(1.0),
            z(0.0),
        )
    };
    let pm1 = Mat2::new(
        p.a - z(1.0),
        p.b,
        p.c,
        p.d - z(1.0),
    );
    let i0 = hinv.mul(&pm1);
    let j = {
        let dtp = Mat2::new(p.a * dt, p.b * dt, p.c * dt, p.d * dt);
        let m = Mat2::new(dtp.a - i0.a, dtp.b - i0.b, dtp.c - i0.c, dtp.d - i0.d);
        hinv.mul(&m)
    };
    let i1 = Mat2::new(
        i0.a - j.a / dt,
        i0.b - j.b / dt,
        i0.c - j.c / dt,
        i0.d - j.d / dt,
    );
    // forcing vector b = (0, g_c)
    let m0 = (i0.b.re * mech.g_c, i0.d.re * mech.g_c);
    let m1 = (i1.b.re * mech.g_c, i1.d.re * mech.g_c);
    let (pa, pb, pc, pd) = (p.a.re, p.b.re, p.c.re, p.d.re);

    let mut x = x0;
    let mut v = v0;
    let mut out = Vec::with_capacity(f.len());
    out.push(x);
    for i in 1..f.len() {
        let f0 = f[i - 1];
        let df = f[i] - f0;
        let xn = pa * x + pb * v + m0.0 * f0 + m1.0 * df;
        let vn = pc * x + pd * v + m0.1 * f0 + m1.1 * df;
        x = xn;
        v = vn;
        out.push(x);
    }
    out
}

/// Integrated power of the FFT of x in bands of half-width κ_c around the
/// drive frequency and around the eigenfrequency, after discarding the
/// startup transient.
pub fn spectral_weights(x: &[f64], mech: &MechParams, dt: f64) -> Result<(f64, f64)> {
    if mech.kappa_c <= 0.0 {
        return Err(Error::InvalidInput(
            "spectral bands need kappa_c > 0".into(),
        ));
    }
    let eigen = mech.eigenfrequency();
    let sep = (mech.drive_freq - eigen).abs();
    if sep < 2.0 * mech.kappa_c {
        return Err(Error::BandsOverlap {
            separation: sep,
            required: 2.0 * mech.kappa_c,
        });
    }
    let t_total = (x.len() - 1) as f64 * dt;
    let t_transient = (20.0 / mech.kappa_c).min(0.5 * t_total);
    let i0 = (t_transient / dt).ceil() as usize;
    let window = &x[i0..];
    let t_window = (window.len() - 1) as f64 * dt;
    if mech.jump_rate > 0.0 {
        let expected = mech.jump_rate * t_window;
        if expected < 50.0 {
            return Err(Error::InsufficientEvents {
                expected,
                required: 50,
            });
        }
    }

    let n = window.len();
    let mut buf: Vec<Complex64> = window.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let d_omega = std::f64::consts::TAU / (n as f64 * dt);
    let band_power = |center: f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..=n / 2 {
            let w = k as f64 * d_omega;
            if (w - center).abs() <= mech.kappa_c {
                acc += buf[k].norm_sqr();
            }
        }
        acc
    };
    Ok((band_power(mech.drive_freq), band_power(eigen)))
}

/// One-sided power spectrum (ω_k, |X_k|²) of a real signal on a uniform
/// grid; no windowing, no transient handling — callers slice beforehand.
pub fn power_spectrum(x: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let d_omega = std::f64::consts::TAU / (n as f64 * dt);
    let half = n / 2;
    let omega = (0..=half).map(|k| k as f64 * d_omega).collect();
    let power = (0..=half).map(|k| buf[k].norm_sqr()).collect();
    (omega, power)
}

/// One-sided sign-test p-value: P(X ≥ successes) for X ~ Binomial(trials, ½).
pub fn sign_test_p_value(successes: usize, trials: usize) -> f64 {
    let mut log_c = 0.0f64; // ln C(n, 0)
    let mut p = 0.0;
    let n = trials as f64;
    for k in 0..=trials {
        if k >= successes {
            p += (log_c - n * std::f64::consts::LN_2).exp();
        }
        log_c += ((trials - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    p.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn demo() -> MechParams {
        MechParams::new(30.0, 6.0, 0.5, 11.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn zero_jump_rate_gives_pure_sinusoid() {
        let m = demo();
        let ts: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let f = piston_signal(&m, &ts, 42);
        for (i, &t) in ts.iter().enumerate() {
            assert_relative_eq!(f[i], (11.0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_drive_frequency_gives_plateaus() {
        let m = MechParams::new(30.0, 6.0, 0.5, 0.0, 0.5, 2.0).unwrap();
        let ts: Vec<f64> = (0..40_000).map(|i| i as f64 * 0.01).collect();
        let f = piston_signal(&m, &ts, 3);
        assert!(f.iter().all(|&v| (-2.0..=2.0).contains(&v)));
        let mut plateaus = 1;
        for w in f.windows(2) {
            if w[0] != w[1] {
                plateaus += 1;
            }
        }
        let events = piston_events(&m, ts.last().unwrap() + 1e-12, 3).len();
        assert_eq!(plateaus, events + 1);
    }

    #[test]
    fn poisson_event_count_within_three_sigma() {
        let m = MechParams::new(30.0, 6.0, 0.5, 11.0, 1.0, 1.0).unwrap();
        let n = piston_events(&m, 1000.0, 77).len() as f64;
        assert!(
            (n - 1000.0).abs() < 3.0 * 1000.0f64.sqrt(),
            "event count {n}"
        );
    }

    #[test]
    fn events_deterministic_per_seed() {
        let m = MechParams::new(30.0, 6.0, 0.5, 11.0, 0.3, 1.0).unwrap();
        assert_eq!(piston_events(&m, 500.0, 9), piston_events(&m, 500.0, 9));
        assert_ne!(piston_events(&m, 500.0, 9), piston_events(&m, 500.0, 10));
    }

    #[test]
    fn constant_forcing_reaches_static_displacement() {
        let m = demo();
        let f = vec![0.7; 60_000];
        let x = simulate_mass(&m, &f, 0.01);
        let expect = 6.0 * 0.7 / 36.0;
        assert_relative_eq!(*x.last().unwrap(), expect, epsilon = 1e-9);
    }

    #[test]
    fn free_oscillation_frequency() {
        // κ_c = 0, f ≡ 0, x(0) = 1: x(t) = cos(√(k_c+g_c) t) to 4 digits
        let m = MechParams::new(30.0, 6.0, 0.0, 11.0, 0.0, 1.0).unwrap();
        let f = vec![0.0; 20_001];
        let dt = 5e-4;
        let x = simulate_mass_from(&m, &f, dt, 1.0, 0.0);
        for i in [5000usize, 12_000, 20_000] {
            let t = i as f64 * dt;
            assert!(
                (x[i] - (6.0 * t).cos()).abs() < 1e-4,
                "x({t}) = {} vs {}",
                x[i],
                (6.0 * t).cos()
            );
        }
    }

    #[test]
    fn damped_free_motion_dissipates_energy() {
        let m = demo();
        let f = vec![0.0; 5000];
        let dt = 0.01;
        let x = simulate_mass_from(&m, &f, dt, 1.0, 0.0);
        // energy from finite-difference velocity is only approximate, so
        // compare over whole periods
        let energy = |i: usize| {
            let v = (x[i + 1] - x[i - 1]) / (2.0 * dt);
            0.5 * v * v + 0.5 * 36.0 * x[i] * x[i]
        };
        let period = (std::f64::consts::TAU / 6.0 / dt).round() as usize;
        let mut prev = energy(period);
        for k in 2..8 {
            let e = energy(k * period);
            assert!(e < prev, "energy grew: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn steady_state_amplitude_matches_transfer_function() {
        let m = demo();
        let dt = 0.005;
        let n = 200_000;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let f = piston_signal(&m, &ts, 0);
        let x = simulate_mass(&m, &f, dt);
        // project the tail onto e^{−iω_d t} over an integer period count
        let period = std::f64::consts::TAU / m.drive_freq;
        let n_per = (period / dt).round() as usize;
        let cycles = 40;
        let start = n - cycles * n_per;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in start..n {
            acc += x[i] * Complex64::from_polar(1.0, -m.drive_freq * ts[i]);
        }
        let measured = 2.0 * acc.norm() / (cycles * n_per) as f64;
        assert_relative_eq!(measured, m.steady_amplitude(), epsilon = 1e-3);
    }

    #[test]
    fn linearity_in_the_drive() {
        let m = demo();
        let dt = 0.01;
        let ts: Vec<f64> = (0..5000).map(|i| i as f64 * dt).collect();
        let f: Vec<f64> = piston_signal(&m, &ts, 5);
        let f3: Vec<f64> = f.iter().map(|v| 3.0 * v).collect();
        let x = simulate_mass(&m, &f, dt);
        let x3 = simulate_mass(&m, &f3, dt);
        let scale = x3.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in x.iter().zip(&x3) {
            assert!((3.0 * a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn undisturbed_drive_leaves_eigenband_empty() {
        let m = demo();
        let dt = 0.02;
        let n = 40_000;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let f = piston_signal(&m, &ts, 1);
        let x = simulate_mass(&m, &f, dt);
        let (wd, we) = spectral_weights(&x, &m, dt).unwrap();
        assert!(we / wd < 1e-2, "eigen/drive = {:.2e}", we / wd);
    }

    #[test]
    fn eigenweight_grows_with_jump_rate() {
        let dt = 0.02;
        let n = 40_000;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let ratio = |rate: f64, seed: u64| {
            let m = MechParams::new(30.0, 6.0, 0.5, 11.0, rate, 1.0).unwrap();
            let f = piston_signal(&m, &ts, seed);
            let x = simulate_mass(&m, &f, dt);
            let (wd, we) = spectral_weights(&x, &m, dt).unwrap();
            we / wd
        };
        let mut wins = 0;
        for seed in 0..6 {
            let r0 = ratio(0.0, seed);
            let r1 = ratio(0.1, seed);
            let r2 = ratio(1.0, seed);
            if r2 > r1 && r1 > r0 {
                wins += 1;
            }
        }
        assert!(wins >= 5, "monotone in only {wins}/6 seeds");
    }

    #[test]
    fn overlapping_bands_are_rejected() {
        let m = MechParams::new(30.0, 6.0, 3.0, 8.0, 0.0, 1.0).unwrap();
        let x = vec![0.0; 1000];
        assert!(matches!(
            spectral_weights(&x, &m, 0.02),
            Err(Error::BandsOverlap { .. })
        ));
    }

    #[test]
    fn too_few_events_are_rejected() {
        let m = MechParams::new(30.0, 6.0, 0.5, 11.0, 0.05, 1.0).unwrap();
        let dt = 0.02;
        let ts: Vec<f64> = (0..10_000).map(|i| i as f64 * dt).collect();
        let f = piston_signal(&m, &ts, 1);
        let x = simulate_mass(&m, &f, dt);
        assert!(matches!(
            spectral_weights(&x, &m, dt),
            Err(Error::InsufficientEvents { .. })
        ));
    }

    #[test]
    fn sign_test_reference_values() {
        // P(X ≥ 15 | n=20) ≈ 0.0207, P(X ≥ 14 | n=20) ≈ 0.0577
        assert!((sign_test_p_value(15, 20) - 0.02069).abs() < 1e-4);
        assert!((sign_test_p_value(14, 20) - 0.05766).abs() < 1e-4);
        assert_relative_eq!(sign_test_p_value(0, 20), 1.0, epsilon = 1e-12);
    }
}
