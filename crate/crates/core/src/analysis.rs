//! Peak extraction, intensity-shift metrics and parameter sweeps.
//!
//! Peak intensity means the spectral height at the local maximum, not the
//! integrated area. Peaks are local maxima filtered by topographic
//! prominence (≥ 2% of the global maximum) and merged when closer than 4
//! grid steps; merging by prominence is what turns the shallow double-hump
//! of a dephasing-broadened doublet into the single peak it visually is.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::spectra::{compute_spectrum, spectrum_norms, Backend, SolverQuality, Spectrum};
use crate::stochastic::EnsembleConfig;
use crate::model::SystemParams;
use crate::Result;

/// Which emission spectrum a peak set was extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumComponent {
    Emitter,
    Cavity,
}

/// Classification of a peak relative to the two resonances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeakSide {
    CavitySide,
    EmitterSide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    /// angular GHz
    pub omega: f64,
    /// spectral density at the maximum
    pub height: f64,
    /// enclosing valley-to-valley interval
    pub window: (f64, f64),
    pub side: PeakSide,
}

#[derive(Debug, Clone)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub component: SpectrumComponent,
}

/// Prominence threshold as a fraction of the global maximum.
const PROMINENCE_FRAC: f64 = 0.02;
/// Peaks closer than this many grid steps merge into the taller one.
const MERGE_STEPS: usize = 4;

/// Local maxima of the chosen spectrum with prominence ≥ 2% of the global
/// maximum, merged if closer than 4 grid steps. Classified `CavitySide` if
/// |Ω| < |Ω − Δ|, else `EmitterSide`.
pub fn find_peaks(spec: &Spectrum, component: SpectrumComponent) -> PeakSet {
    let y = match component {
        SpectrumComponent::Emitter => &spec.s_e,
        SpectrumComponent::Cavity => &spec.s_c,
    };
    let idx = accepted_peak_indices(y);
    let delta = spec.meta.params.delta;
    let n = y.len();
    let peaks = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            // valley-to-valley window against the neighbouring accepted peaks
            let lo_bound = if k == 0 { 0 } else { argmin(y, idx[k - 1], i) };
            let hi_bound = if k + 1 == idx.len() {
                n - 1
            } else {
                argmin(y, i, idx[k + 1])
            };
            let omega = spec.omega[i];
            let side = if omega.abs() < (omega - delta).abs() {
                PeakSide::CavitySide
            } else {
                PeakSide::EmitterSide
            };
            Peak {
                omega,
                height: y[i],
                window: (spec.omega[lo_bound], spec.omega[hi_bound]),
                side,
            }
        })
        .collect();
    PeakSet { peaks, component }
}

fn argmin(y: &[f64], lo: usize, hi: usize) -> usize {
    (lo..=hi)
        .min_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap())
        .unwrap_or(lo)
}

/// Prominence-filtered local maxima, indices in ascending order.
///
/// Candidates are visited tallest first; each is kept only if it rises by
/// at least the prominence threshold above the saddles separating it from
/// already-accepted (taller) peaks. Exactly-equal twin maxima therefore
/// cannot both survive a shallow connecting dip, independent of
/// floating-point tie order.
fn accepted_peak_indices(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let gmax = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(gmax > 0.0) {
        return Vec::new();
    }
    let threshold = PROMINENCE_FRAC * gmax;

    let mut candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect();
    candidates.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap().then(a.cmp(&b)));

    let mut accepted: Vec<usize> = Vec::new();
    'cand: for &i in &candidates {
        if accepted.is_empty() {
            accepted.push(i);
            continue;
        }
        let mut prom = f64::INFINITY;
        let mut sep_ok = true;
        let left = accepted.iter().filter(|&&a| a < i).max();
        let right = accepted.iter().filter(|&&a| a > i).min();
        for nb in [left, right].into_iter().flatten() {
            let (lo, hi) = if *nb < i { (*nb, i) } else { (i, *nb) };
            let saddle = y[argmin(y, lo, hi)];
            prom = prom.min(y[i] - saddle);
            if hi - lo < MERGE_STEPS {
                sep_ok = false;
            }
        }
        if !sep_ok || prom < threshold {
            continue 'cand;
        }
        accepted.push(i);
    }
    accepted.sort_unstable();
    accepted
}

/// Relative left-peak (cavity-peak) intensity of a cavity spectrum:
/// h_left / (h_left + h_right) from the two tallest peaks, `None` when the
/// structure has merged into a single peak. For Δ < 0 the mirror convention
/// applies: "left" always means the cavity-side peak.
pub fn relative_left_peak_intensity(peaks: &PeakSet, delta: f64) -> Option<f64> {
    if peaks.peaks.len() < 2 {
        return None;
    }
    let mut by_height: Vec<&Peak> = peaks.peaks.iter().collect();
    by_height.sort_by(|a, b| b.height.partial_cmp(&a.height).unwrap());
    let (a, b) = (by_height[0], by_height[1]);
    let (lo, hi) = if a.omega < b.omega { (a, b) } else { (b, a) };
    let cavity_side = if delta >= 0.0 { lo } else { hi };
    let other = if delta >= 0.0 { hi } else { lo };
    Some(cavity_side.height / (cavity_side.height + other.height))
}

/// One sweep cell.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub delta: f64,
    pub gamma_p: f64,
    pub left_peak_ratio: Option<f64>,
    pub cavity_fraction: f64,
    pub n_peaks: usize,
    pub peak_positions: Vec<f64>,
}

/// Metric matrices over a (Δ, γ_p) grid, row-major over deltas then
/// gamma_p values.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub deltas: Vec<f64>,
    pub gamma_ps: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, i_delta: usize, i_gp: usize) -> &SweepCell {
        &self.cells[i_delta * self.gamma_ps.len() + i_gp]
    }

    /// CSV: `delta_ghz,gamma_p_ghz,left_peak_ratio,cavity_fraction,n_peaks`
    /// with an empty ratio field for merged single peaks.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str("delta_ghz,gamma_p_ghz,left_peak_ratio,cavity_fraction,n_peaks\n");
        for c in &self.cells {
            let ratio = c.left_peak_ratio.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.delta, c.gamma_p, ratio, c.cavity_fraction, c.n_peaks
            ));
        }
        out
    }
}

/// Sweep the metrics over detuning and dephasing lists.
pub fn sweep(
    base: &SystemParams,
    deltas: &[f64],
    gamma_ps: &[f64],
    backend: Backend,
    q: &SolverQuality,
    ensemble: Option<&EnsembleConfig>,
) -> Result<SweepResult> {
    if deltas.is_empty() || gamma_ps.is_empty() {
        return Err(Error::InvalidInput("sweep lists must be non-empty".into()));
    }
    let mut cells = Vec::with_capacity(deltas.len() * gamma_ps.len());
    for &delta in deltas {
        for &gp in gamma_ps {
            let p = base.with_delta(delta)?.with_gamma_p(gp)?;
            let backend = match backend {
                Backend::ClosedForm if gp != 0.0 => Backend::Regression,
                b => b,
            };
            let spec = compute_spectrum(&p, backend, q, ensemble, None)?;
            let (_, _, fraction) = spectrum_norms(&spec);
            let peaks = find_peaks(&spec, SpectrumComponent::Cavity);
            cells.push(SweepCell {
                delta,
                gamma_p: gp,
                left_peak_ratio: relative_left_peak_intensity(&peaks, delta),
                cavity_fraction: fraction,
                n_peaks: peaks.peaks.len(),
                peak_positions: peaks.peaks.iter().map(|pk| pk.omega).collect(),
            });
        }
    }
    Ok(SweepResult {
        deltas: deltas.to_vec(),
        gamma_ps: gamma_ps.to_vec(),
        cells,
    })
}

/// Measured cavity-side/emitter-side height ratios of an intensity-shift
/// comparison.
#[derive(Debug, Clone)]
pub struct ShiftReport {
    pub delta: f64,
    pub gamma_p_low: f64,
    pub gamma_p_high: f64,
    /// S_C cavity-side / emitter-side height ratio at the two dephasings;
    /// infinite when no emitter-side peak survives
    pub ratio_low: f64,
    pub ratio_high: f64,
    /// the S_E maximum stays on the emitter side at high dephasing
    pub emitter_peak_dominant: bool,
    /// equal dephasing rates: nothing asserted
    pub degenerate: bool,
}

fn side_ratio(spec: &Spectrum) -> f64 {
    let peaks = find_peaks(spec, SpectrumComponent::Cavity);
    let hc = peaks
        .peaks
        .iter()
        .filter(|p| p.side == PeakSide::CavitySide)
        .map(|p| p.height)
        .fold(0.0f64, f64::max);
    let he = peaks
        .peaks
        .iter()
        .filter(|p| p.side == PeakSide::EmitterSide)
        .map(|p| p.height)
        .fold(0.0f64, f64::max);
    if he > 0.0 {
        hc / he
    } else {
        f64::INFINITY
    }
}

/// Assert the intensity-shift phenomenology at fixed detuning: raising the
/// dephasing from `gp_low` to `gp_high` must strictly increase the
/// cavity-side/emitter-side height ratio of S_C while the S_E maximum
/// remains emitter-sided. Needs |Δ| ≥ 2 g0 so the two sides are
/// distinguishable.
pub fn intensity_shift_check(
    base: &SystemParams,
    delta: f64,
    gp_low: f64,
    gp_high: f64,
    q: &SolverQuality,
) -> Result<ShiftReport> {
    if delta.abs() < 2.0 * base.g0 {
        return Err(Error::InvalidInput(format!(
            "need |delta| >= 2 g0 to separate the peaks, got {delta} vs g0 = {}",
            base.g0
        )));
    }
    if gp_low > gp_high {
        return Err(Error::InvalidInput("gamma_p_low > gamma_p_high".into()));
    }
    let spec_at = |gp: f64| -> Result<Spectrum> {
        let p = base.with_delta(delta)?.with_gamma_p(gp)?;
        compute_spectrum(&p, Backend::Regression, q, None, None)
    };
    let low = spec_at(gp_low)?;
    let high = spec_at(gp_high)?;
    let ratio_low = side_ratio(&low);
    let ratio_high = side_ratio(&high);

    let se_peaks = find_peaks(&high, SpectrumComponent::Emitter);
    let emitter_peak_dominant = se_peaks
        .peaks
        .iter()
        .max_by(|a, b| a.height.partial_cmp(&b.height).unwrap())
        .map(|p| p.side == PeakSide::EmitterSide)
        .unwrap_or(false);

    let degenerate = gp_low == gp_high;
    let report = ShiftReport {
        delta,
        gamma_p_low: gp_low,
        gamma_p_high: gp_high,
        ratio_low,
        ratio_high,
        emitter_peak_dominant,
        degenerate,
    };
    if degenerate {
        return Ok(report);
    }
    if !(ratio_high > ratio_low) {
        return Err(Error::AssertionFailed(format!(
            "cavity-side ratio did not increase: {ratio_low} -> {ratio_high} at delta {delta}"
        )));
    }
    if !emitter_peak_dominant {
        return Err(Error::AssertionFailed(format!(
            "emitter spectrum lost its emitter-side dominance at gamma_p = {gp_high}"
        )));
    }
    Ok(report)
}
