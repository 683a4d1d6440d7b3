//! End-to-end tests of the `cavspec` binary: config handling, exit codes,
//! and byte-level reproducibility of the emitted files.

use std::fs;
use std::process::Command;

fn cavspec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavspec"))
}

fn write(dir: &std::path::Path, name: &str, content: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p
}

const BASE_CONFIG: &str = "[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\n";

#[test]
fn spectrum_run_writes_csv_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", BASE_CONFIG);
    let out = tmp.path().join("out");
    let status = cavspec()
        .args(["--out-dir", out.to_str().unwrap(), "spectrum", "--config"])
        .arg(&cfg)
        .arg("--backend")
        .arg("closed_form")
        .arg("--svg")
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("# manifest sha256 "));
    assert!(csv.lines().nth(1).unwrap().starts_with("omega_ghz,s_e,s_c"));
    assert!(out.join("spectrum.manifest.json").exists());
    assert!(out.join("spectrum.svg").exists());

    // resonant strong coupling: the cavity spectrum is a symmetric doublet
    let mut max_sc = (0.0f64, 0.0f64);
    for line in csv.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if f[2] > max_sc.1 {
            max_sc = (f[0], f[2]);
        }
    }
    assert!(max_sc.0.abs() > 5.0, "doublet peak away from zero: {max_sc:?}");
}

#[test]
fn decoupled_emitter_yields_single_lorentzian() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "run.toml",
        "[params]\ng0 = 0.0\nkappa = 1.6\ngamma = 0.32\ndelta = 5.0\n",
    );
    let out = tmp.path().join("out");
    let status = cavspec()
        .args(["--out-dir", out.to_str().unwrap(), "spectrum", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut best = (0.0f64, 0.0f64);
    for line in csv.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[2].abs() < 1e-12, "S_C must vanish for g0 = 0");
        if f[1] > best.1 {
            best = (f[0], f[1]);
        }
    }
    assert!((best.0 - 5.0).abs() < 0.2, "S_E peak at {best:?}, expected 5");
}

#[test]
fn identical_configs_give_byte_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "run.toml",
        "backend = \"monte_carlo\"\n[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\ngamma_p = 4.0\n[ensemble]\nn_traj = 120\nbatch_count = 6\nmaster_seed = 11\n",
    );
    let run = |sub: &str| -> Vec<u8> {
        let out = tmp.path().join(sub);
        let status = cavspec()
            .args(["--out-dir", out.to_str().unwrap(), "spectrum", "--config"])
            .arg(&cfg)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out.join("spectrum.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b, "reruns with the same config must be byte-identical");
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    // unknown key
    let cfg = write(tmp.path(), "bad.toml", "[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\ntypo_key = 1\n");
    let st = cavspec().args(["spectrum", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(st.code(), Some(2));
    // constraint violation
    let cfg2 = write(
        tmp.path(),
        "bad2.toml",
        "backend = \"closed_form\"\n[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\ngamma_p = 5.0\n",
    );
    let st2 = cavspec().args(["spectrum", "--config"]).arg(&cfg2).status().unwrap();
    assert_eq!(st2.code(), Some(2));
    // unreadable file
    let st3 = cavspec()
        .args(["spectrum", "--config", "/nonexistent/x.toml"])
        .status()
        .unwrap();
    assert_eq!(st3.code(), Some(2));
}

#[test]
fn sweep_emits_schema_with_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", BASE_CONFIG);
    let out = tmp.path().join("out");
    let status = cavspec()
        .args(["--out-dir", out.to_str().unwrap(), "sweep", "--config"])
        .arg(&cfg)
        .args(["--delta", "0:0:1", "--gamma-p", "0,10"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines().skip(1);
    assert_eq!(
        lines.next().unwrap(),
        "delta_ghz,gamma_p_ghz,left_peak_ratio,cavity_fraction,n_peaks"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    // γ_p = 0 on resonance: symmetric doublet, ratio 0.5
    let f0: Vec<&str> = rows[0].split(',').collect();
    assert!((f0[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(f0[4], "2");
    // γ_p = 10: merged, ratio column empty
    let f1: Vec<&str> = rows[1].split(',').collect();
    assert!(f1[2].is_empty());
    assert_eq!(f1[4], "1");
}

#[test]
fn mech_command_runs_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "mech.toml",
        "[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\n\n[mech]\nk_c = 30.0\ng_c = 6.0\nkappa_c = 0.5\ndrive_freq = 11.0\njump_rate = 0.2\nt_max = 400.0\ndt = 0.02\nseed = 3\n",
    );
    let out = tmp.path().join("out");
    let output = cavspec()
        .args(["--out-dir", out.to_str().unwrap(), "mech", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("ratio"), "{stdout}");
    let ts = fs::read_to_string(out.join("mech_timeseries.csv")).unwrap();
    assert!(ts.starts_with("t_ns,f,x\n"));
    assert!(out.join("mech_power.csv").exists());
}

#[test]
fn figures_fig3a_has_gaps_at_strong_dephasing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = cavspec()
        .args(["--out-dir", out.to_str().unwrap(), "figures", "fig3a"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("fig3a.csv")).unwrap();
    let mut gp10_small_delta_empty = true;
    let mut gp0_small_delta_present = false;
    for line in csv.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        let delta: f64 = f[0].parse().unwrap();
        let gp: f64 = f[1].parse().unwrap();
        if gp == 10.0 && delta <= 8.0 && !f[2].is_empty() {
            gp10_small_delta_empty = false;
        }
        if gp == 0.0 && delta <= 8.0 && !f[2].is_empty() {
            gp0_small_delta_present = true;
        }
    }
    assert!(gp10_small_delta_empty, "expected merged peaks at γ_p = 10, small Δ");
    assert!(gp0_small_delta_present);
}

#[test]
fn unknown_figure_id_is_a_usage_error() {
    let st = cavspec().args(["figures", "fig9"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}
