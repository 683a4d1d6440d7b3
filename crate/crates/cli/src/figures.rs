//! Figure-reproduction runs: the data surfaces behind the reference plots,
//! emitted as CSV with embedded manifest hashes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cavity_spectra::analysis;
use cavity_spectra::mech;
use cavity_spectra::presets;
use cavity_spectra::spectra::{
    compute_spectrum, default_grid, spectrum_norms, Backend, SolverQuality,
};

use crate::manifest::RunManifest;

pub struct FigureOutput {
    pub files: Vec<String>,
    pub checks: Vec<(String, f64, bool)>,
}

fn write_file(dir: &Path, name: &str, content: &str, files: &mut Vec<String>) -> std::io::Result<()> {
    let path = dir.join(name);
    fs::write(&path, content)?;
    files.push(path.display().to_string());
    Ok(())
}

/// Anti-crossing spectra maps (zero dephasing or γ_p = 5), long format:
/// `delta_ghz,omega_ghz,s_e,s_c`.
fn spectra_map(
    dir: &Path,
    name: &str,
    gamma_p: f64,
    backend: Backend,
) -> std::io::Result<FigureOutput> {
    let q = SolverQuality::standard();
    let mut files = Vec::new();
    let mut checks = Vec::new();
    let mut csv = String::new();
    let mut manifest_lines = Vec::new();
    for delta in presets::fig2_detunings() {
        let p = presets::fig2_params(gamma_p, delta).unwrap();
        let grid = default_grid(&p, &q).unwrap();
        let spec = compute_spectrum(&p, backend, &q, None, Some(&grid)).unwrap();
        let (i_e, i_c, _) = spectrum_norms(&spec);
        let total = i_e + i_c;
        checks.push((
            format!("{name} conservation delta={delta}"),
            total,
            (total - 1.0).abs() < 1e-3,
        ));
        let m = RunManifest::new(name, backend.to_string(), p, grid, q, None)
            .with_check("total_emission", total);
        manifest_lines.push(m.hash());
        for i in 0..spec.omega.len() {
            writeln!(csv, "{},{},{},{}", delta, spec.omega[i], spec.s_e[i], spec.s_c[i]).unwrap();
        }
    }
    let mut out = String::new();
    for h in &manifest_lines {
        out.push_str(&format!("# manifest sha256 {h}\n"));
    }
    out.push_str("delta_ghz,omega_ghz,s_e,s_c\n");
    out.push_str(&csv);
    write_file(dir, &format!("{name}.csv"), &out, &mut files)?;
    Ok(FigureOutput { files, checks })
}

fn sweep_figure(
    dir: &Path,
    name: &str,
    deltas: Vec<f64>,
    gamma_ps: Vec<f64>,
) -> std::io::Result<FigureOutput> {
    let q = SolverQuality::standard();
    let base = presets::fig2_params(0.0, 0.0).unwrap();
    let res = analysis::sweep(&base, &deltas, &gamma_ps, Backend::Regression, &q, None).unwrap();
    let mut checks = Vec::new();
    for c in &res.cells {
        checks.push((
            format!("{name} conservation-adjacent fraction delta={} gp={}", c.delta, c.gamma_p),
            c.cavity_fraction,
            (0.0..=1.0).contains(&c.cavity_fraction),
        ));
    }
    let grid = default_grid(&base, &q).unwrap();
    let m = RunManifest::new(name, "regression".into(), base, grid, q, None);
    let csv = res.to_csv(&[m.comment()]);
    let mut files = Vec::new();
    write_file(dir, &format!("{name}.csv"), &csv, &mut files)?;
    Ok(FigureOutput { files, checks })
}

/// Micropillar spectra at γ_p ∈ {0, 20} and the three reference detunings.
fn fig4(dir: &Path) -> std::io::Result<FigureOutput> {
    let q = SolverQuality::standard();
    let mut files = Vec::new();
    let mut checks = Vec::new();
    for gp in presets::fig4_gamma_ps() {
        for delta in presets::fig4_detunings() {
            let p = presets::fig4_params(gp, delta).unwrap();
            let backend = if gp == 0.0 {
                Backend::ClosedForm
            } else {
                Backend::Regression
            };
            let grid = default_grid(&p, &q).unwrap();
            let spec = compute_spectrum(&p, backend, &q, None, Some(&grid)).unwrap();
            let (i_e, i_c, _) = spectrum_norms(&spec);
            checks.push((
                format!("fig4 conservation gp={gp} delta={delta}"),
                i_e + i_c,
                (i_e + i_c - 1.0).abs() < 1e-3,
            ));
            let m = RunManifest::new("fig4", backend.to_string(), p, grid, q, None)
                .with_check("total_emission", i_e + i_c);
            let csv = spec.to_csv(&[m.comment()]);
            write_file(dir, &format!("fig4_gp{gp:.0}_delta{delta:.0}.csv"), &csv, &mut files)?;
        }
    }
    Ok(FigureOutput { files, checks })
}

/// Mechanical-analogue demo: time series and post-transient power spectra
/// at the three jump rates.
fn fig5(dir: &Path) -> std::io::Result<FigureOutput> {
    let (dt, n) = presets::mech_grid();
    let ts: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
    let base = presets::mech_demo().unwrap();
    let mut files = Vec::new();
    let mut checks = Vec::new();
    let mut prev_ratio = -1.0f64;
    for rate in presets::mech_jump_rates() {
        let m = mech::MechParams {
            jump_rate: rate,
            ..base
        };
        let f = mech::piston_signal(&m, &ts, 1);
        let x = mech::simulate_mass(&m, &f, dt);
        let mut series = String::from("t_ns,f,x\n");
        for i in (0..n).step_by(4).take(5000) {
            writeln!(series, "{},{},{}", ts[i], f[i], x[i]).unwrap();
        }
        write_file(dir, &format!("fig5_rate{rate}_timeseries.csv"), &series, &mut files)?;

        let cut = ((20.0 / m.kappa_c) / dt).ceil() as usize;
        let (omega, power) = mech::power_spectrum(&x[cut..], dt);
        let mut psd = String::from("omega,power\n");
        for (w, p) in omega.iter().zip(&power) {
            if *w <= 3.0 * m.drive_freq {
                writeln!(psd, "{w},{p}").unwrap();
            }
        }
        write_file(dir, &format!("fig5_rate{rate}_power.csv"), &psd, &mut files)?;

        let (wd, we) = mech::spectral_weights(&x, &m, dt).unwrap();
        let ratio = we / wd;
        checks.push((
            format!("fig5 eigen/drive weight at rate {rate}"),
            ratio,
            ratio > prev_ratio,
        ));
        prev_ratio = ratio;
    }
    Ok(FigureOutput { files, checks })
}

pub fn run_figure(id: &str, dir: &Path) -> Result<FigureOutput, String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    let result = match id {
        "fig2a" => spectra_map(dir, "fig2a", 0.0, Backend::ClosedForm),
        "fig2b" => spectra_map(dir, "fig2b", 5.0, Backend::Regression),
        "fig3a" => sweep_figure(dir, "fig3a", presets::fig3a_detunings(), presets::fig3a_gamma_ps()),
        "fig3b" => sweep_figure(dir, "fig3b", presets::fig3b_detunings(), presets::fig3b_gamma_ps()),
        "fig4" => fig4(dir),
        "fig5" => fig5(dir),
        other => return Err(format!("unknown figure `{other}` (expected fig2a|fig2b|fig3a|fig3b|fig4|fig5)")),
    };
    result.map_err(|e| e.to_string())
}
