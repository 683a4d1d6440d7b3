//! `cavspec` — emission spectra of a dephased emitter-cavity system.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration error.

mod config;
mod figures;
mod manifest;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_spectra::analysis;
use cavity_spectra::mech;
use cavity_spectra::spectra::{compute_spectrum, spectrum_norms, Backend};
use cavity_spectra::validation::{run_all, ValidationConfig};

use config::{parse_config, ConfigError, RunConfig};
use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "cavspec", version, about = "Emitter-cavity emission spectra under pure dephasing")]
struct Cli {
    /// Output directory (default: $CAVSPEC_OUT_DIR or ./out)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one spectrum from a config file
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        /// Override the backend (closed_form|regression|monte_carlo)
        #[arg(long)]
        backend: Option<String>,
        /// Override the Monte Carlo master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Also emit an SVG line plot
        #[arg(long)]
        svg: bool,
    },
    /// Sweep metrics over detuning and dephasing grids
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Detuning range `start:stop:count`
        #[arg(long)]
        delta: String,
        /// Comma-separated dephasing rates
        #[arg(long = "gamma-p")]
        gamma_p: String,
    },
    /// Reproduce a reference figure's data surface
    Figures { id: String },
    /// Run the mechanical piston-mass analogue
    Mech {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the cross-backend validation suite
    Validate {
        /// Shrink the Monte Carlo ensembles ~100x for a quick pass
        #[arg(long)]
        fast: bool,
        /// Master seed of the stochastic checks
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn out_dir(cli_dir: &Option<PathBuf>) -> PathBuf {
    cli_dir
        .clone()
        .or_else(|| std::env::var_os("CAVSPEC_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "closed_form" => Ok(Backend::ClosedForm),
        "regression" => Ok(Backend::Regression),
        "monte_carlo" => Ok(Backend::MonteCarlo),
        other => Err(format!("unknown backend `{other}`")),
    }
}

fn cmd_spectrum(
    dir: PathBuf,
    cfg_path: PathBuf,
    backend: Option<String>,
    seed: Option<u64>,
    svg_flag: bool,
) -> Result<(), (u8, String)> {
    let mut cfg = load_config(&cfg_path).map_err(|e| (2u8, e.to_string()))?;
    if let Some(b) = backend {
        cfg.backend = parse_backend(&b).map_err(|e| (2, e))?;
        if cfg.backend == Backend::ClosedForm && cfg.params.gamma_p != 0.0 {
            return Err((2, "backend=closed_form requires gamma_p = 0".into()));
        }
    }
    if let Some(s) = seed {
        cfg.ensemble.master_seed = s;
    }
    let dir = cfg.output_dir.clone().map(PathBuf::from).unwrap_or(dir);
    fs::create_dir_all(&dir).map_err(|e| (1u8, e.to_string()))?;

    let ens = (cfg.backend == Backend::MonteCarlo).then_some(&cfg.ensemble);
    let spec = compute_spectrum(&cfg.params, cfg.backend, &cfg.quality, ens, Some(&cfg.grid))
        .map_err(|e| (1u8, e.to_string()))?;
    let (i_e, i_c, fraction) = spectrum_norms(&spec);

    let m = RunManifest::new(
        "spectrum",
        cfg.backend.to_string(),
        cfg.params,
        cfg.grid.clone(),
        cfg.quality,
        ens.copied(),
    )
    .with_check("total_emission", i_e + i_c)
    .with_check("cavity_fraction", fraction);

    let csv_path = dir.join("spectrum.csv");
    fs::write(&csv_path, spec.to_csv(&[m.comment()])).map_err(|e| (1u8, e.to_string()))?;
    fs::write(dir.join("spectrum.manifest.json"), m.to_json()).map_err(|e| (1u8, e.to_string()))?;
    if svg_flag || cfg.emit_svg {
        let title = format!(
            "g0={} κ={} γ={} γ_p={} Δ={} ({})",
            cfg.params.g0, cfg.params.kappa, cfg.params.gamma, cfg.params.gamma_p,
            cfg.params.delta, cfg.backend
        );
        fs::write(dir.join("spectrum.svg"), svg::spectrum_svg(&spec, &title))
            .map_err(|e| (1u8, e.to_string()))?;
    }
    println!(
        "wrote {} (total emission {:.6}, cavity fraction {:.4})",
        csv_path.display(),
        i_e + i_c,
        fraction
    );
    Ok(())
}

fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range must be start:stop:count, got `{s}`"));
    }
    let a: f64 = parts[0].parse().map_err(|_| "bad range start".to_string())?;
    let b: f64 = parts[1].parse().map_err(|_| "bad range stop".to_string())?;
    let n: usize = parts[2].parse().map_err(|_| "bad range count".to_string())?;
    if n < 1 {
        return Err("range count must be >= 1".into());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad list entry `{x}`")))
        .collect()
}

fn cmd_sweep(dir: PathBuf, cfg_path: PathBuf, delta: String, gamma_p: String) -> Result<(), (u8, String)> {
    let cfg = load_config(&cfg_path).map_err(|e| (2u8, e.to_string()))?;
    let deltas = parse_range(&delta).map_err(|e| (2u8, e))?;
    let gamma_ps = parse_list(&gamma_p).map_err(|e| (2u8, e))?;
    let dir = cfg.output_dir.clone().map(PathBuf::from).unwrap_or(dir);
    fs::create_dir_all(&dir).map_err(|e| (1u8, e.to_string()))?;

    let ens = (cfg.backend == Backend::MonteCarlo).then_some(&cfg.ensemble);
    let res = analysis::sweep(&cfg.params, &deltas, &gamma_ps, cfg.backend, &cfg.quality, ens)
        .map_err(|e| (1u8, e.to_string()))?;
    let m = RunManifest::new(
        "sweep",
        cfg.backend.to_string(),
        cfg.params,
        cfg.grid.clone(),
        cfg.quality,
        ens.copied(),
    );
    let path = dir.join("sweep.csv");
    fs::write(&path, res.to_csv(&[m.comment()])).map_err(|e| (1u8, e.to_string()))?;
    fs::write(dir.join("sweep.manifest.json"), m.to_json()).map_err(|e| (1u8, e.to_string()))?;
    println!("wrote {} ({} cells)", path.display(), res.cells.len());
    Ok(())
}

fn cmd_mech(dir: PathBuf, cfg_path: PathBuf) -> Result<(), (u8, String)> {
    let cfg = load_config(&cfg_path).map_err(|e| (2u8, e.to_string()))?;
    let mc = cfg
        .mech
        .clone()
        .ok_or((2u8, "config has no [mech] section".to_string()))?;
    let dir = cfg.output_dir.clone().map(PathBuf::from).unwrap_or(dir);
    fs::create_dir_all(&dir).map_err(|e| (1u8, e.to_string()))?;

    let n = (mc.t_max / mc.dt).ceil() as usize;
    let ts: Vec<f64> = (0..n).map(|i| i as f64 * mc.dt).collect();
    let f = mech::piston_signal(&mc.params, &ts, mc.seed);
    let x = mech::simulate_mass(&mc.params, &f, mc.dt);

    let mut series = String::from("t_ns,f,x\n");
    for i in 0..n {
        series.push_str(&format!("{},{},{}\n", ts[i], f[i], x[i]));
    }
    fs::write(dir.join("mech_timeseries.csv"), series).map_err(|e| (1u8, e.to_string()))?;

    let cut = if mc.params.kappa_c > 0.0 {
        (((20.0 / mc.params.kappa_c).min(0.5 * mc.t_max)) / mc.dt).ceil() as usize
    } else {
        0
    };
    let (omega, power) = mech::power_spectrum(&x[cut..], mc.dt);
    let mut psd = String::from("omega,power\n");
    for (w, p) in omega.iter().zip(&power) {
        psd.push_str(&format!("{w},{p}\n"));
    }
    fs::write(dir.join("mech_power.csv"), psd).map_err(|e| (1u8, e.to_string()))?;

    match mech::spectral_weights(&x, &mc.params, mc.dt) {
        Ok((wd, we)) => println!(
            "weights: drive {wd:.4e}, eigen {we:.4e}, ratio {:.4e}",
            we / wd
        ),
        Err(e) => println!("spectral weights unavailable: {e}"),
    }
    println!("wrote {}", dir.join("mech_timeseries.csv").display());
    Ok(())
}

fn cmd_validate(fast: bool, seed: u64) -> Result<(), (u8, String)> {
    let cfg = ValidationConfig {
        fast,
        master_seed: seed,
    };
    let reports = run_all(&cfg);
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    println!(
        "{} checks, {} failed{}",
        reports.len(),
        failed,
        if fast { " (fast mode)" } else { "" }
    );
    if failed > 0 {
        return Err((1u8, format!("{failed} validation checks failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = out_dir(&cli.out_dir);
    let result = match cli.command {
        Command::Spectrum {
            config,
            backend,
            seed,
            svg,
        } => cmd_spectrum(dir, config, backend, seed, svg),
        Command::Sweep {
            config,
            delta,
            gamma_p,
        } => cmd_sweep(dir, config, delta, gamma_p),
        Command::Figures { id } => {
            let out = figures::run_figure(&id, &dir).map_err(|e| (2u8, e));
            out.map(|o| {
                for f in &o.files {
                    println!("wrote {f}");
                }
                let mut bad = 0;
                for (name, value, ok) in &o.checks {
                    if !ok {
                        bad += 1;
                        println!("[FAIL] {name}: {value:.6}");
                    }
                }
                println!("invariant checks: {} ok, {} failed", o.checks.len() - bad, bad);
            })
        }
        Command::Mech { config } => cmd_mech(dir, config),
        Command::Validate { fast, seed } => cmd_validate(fast, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
