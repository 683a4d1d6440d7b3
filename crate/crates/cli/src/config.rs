//! Run configuration: a small TOML document with documented defaults for
//! every omitted key.
//!
//! ```toml
//! backend = "regression"        # closed_form | regression | monte_carlo
//! emit_svg = false
//! output_dir = "out"            # or env CAVSPEC_OUT_DIR
//!
//! [params]
//! g0 = 8.0                      # required
//! kappa = 1.6                   # required
//! gamma = 0.32                  # required
//! gamma_p = 0.0
//! delta = 0.0
//!
//! [grid]                        # optional overrides of the adaptive grid
//! n_omega = 2048
//! omega_min = -50.0
//! omega_max = 50.0
//! t_max = 10.0
//! dt = 0.01
//!
//! [ensemble]                    # monte_carlo backend
//! n_traj = 20000
//! master_seed = 1
//! batch_count = 20
//!
//! [mech]                        # `mech` subcommand
//! k_c = 30.0
//! g_c = 6.0
//! kappa_c = 0.5
//! drive_freq = 11.0
//! jump_rate = 0.1
//! amplitude = 1.0
//! t_max = 800.0
//! dt = 0.02
//! seed = 1
//! ```

use serde::Deserialize;
use thiserror::Error;

use cavity_spectra::mech::MechParams;
use cavity_spectra::model::{NumericalGrid, SystemParams};
use cavity_spectra::spectra::{default_grid, Backend, SolverQuality};
use cavity_spectra::stochastic::EnsembleConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown key: {0}")]
    UnknownKey(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    mech: Option<RawMech>,
    backend: Option<String>,
    emit_svg: Option<bool>,
    output_dir: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    g0: f64,
    kappa: f64,
    gamma: f64,
    #[serde(default)]
    gamma_p: f64,
    #[serde(default)]
    delta: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_omega: Option<usize>,
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    t_max: Option<f64>,
    dt: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    n_traj: Option<usize>,
    master_seed: Option<u64>,
    batch_count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMech {
    pub k_c: f64,
    pub g_c: f64,
    pub kappa_c: f64,
    pub drive_freq: f64,
    #[serde(default)]
    pub jump_rate: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "mech_t_max")]
    pub t_max: f64,
    #[serde(default = "mech_dt")]
    pub dt: f64,
    #[serde(default = "one_u64")]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn mech_t_max() -> f64 {
    800.0
}
fn mech_dt() -> f64 {
    0.02
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: NumericalGrid,
    pub backend: Backend,
    pub ensemble: EnsembleConfig,
    pub mech: Option<MechConfig>,
    pub emit_svg: bool,
    pub output_dir: Option<String>,
    pub quality: SolverQuality,
}

#[derive(Debug, Clone)]
pub struct MechConfig {
    pub params: MechParams,
    pub t_max: f64,
    pub dt: f64,
    pub seed: u64,
}

fn map_toml_error(e: toml::de::Error) -> ConfigError {
    let msg = e.to_string();
    if msg.contains("unknown field") {
        ConfigError::UnknownKey(msg)
    } else if msg.contains("invalid type") {
        ConfigError::TypeMismatch(msg)
    } else {
        ConfigError::Parse(msg)
    }
}

/// Parse and validate a config document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(map_toml_error)?;

    let params = SystemParams::new(
        raw.params.g0,
        raw.params.kappa,
        raw.params.gamma,
        raw.params.gamma_p,
        raw.params.delta,
    )
    .map_err(|e| ConfigError::ConstraintViolation(format!("params: {e}")))?;

    let backend = match raw.backend.as_deref() {
        None => Backend::Regression,
        Some("closed_form") => Backend::ClosedForm,
        Some("regression") => Backend::Regression,
        Some("monte_carlo") => Backend::MonteCarlo,
        Some(other) => {
            return Err(ConfigError::ConstraintViolation(format!(
                "backend must be closed_form|regression|monte_carlo, got `{other}`"
            )))
        }
    };
    if backend == Backend::ClosedForm && params.gamma_p != 0.0 {
        return Err(ConfigError::ConstraintViolation(format!(
            "backend=closed_form requires gamma_p = 0, got {}",
            params.gamma_p
        )));
    }

    let quality = SolverQuality::standard();
    let mut grid = default_grid(&params, &quality)
        .map_err(|e| ConfigError::ConstraintViolation(format!("grid: {e}")))?;
    if let Some(n) = raw.grid.n_omega {
        grid.n_omega = n;
    }
    if let Some(w) = raw.grid.omega_min {
        grid.omega_min = w;
    }
    if let Some(w) = raw.grid.omega_max {
        grid.omega_max = w;
    }
    if let Some(dt) = raw.grid.dt {
        grid.dt = dt;
        grid.n_t = (grid.t_max / dt).ceil() as usize;
        grid.t_max = grid.n_t as f64 * dt;
    }
    if let Some(t_max) = raw.grid.t_max {
        grid.n_t = (t_max / grid.dt).ceil() as usize;
        grid.t_max = grid.n_t as f64 * grid.dt;
    }
    grid.validate(&params)
        .map_err(|e| ConfigError::ConstraintViolation(format!("grid: {e}")))?;

    let defaults = EnsembleConfig::default();
    let ensemble = EnsembleConfig {
        n_traj: raw.ensemble.n_traj.unwrap_or(defaults.n_traj),
        master_seed: raw.ensemble.master_seed.unwrap_or(defaults.master_seed),
        batch_count: raw.ensemble.batch_count.unwrap_or(defaults.batch_count),
    };
    ensemble
        .validate()
        .map_err(|e| ConfigError::ConstraintViolation(format!("ensemble: {e}")))?;

    let mech = match raw.mech {
        None => None,
        Some(m) => {
            let mp = MechParams::new(m.k_c, m.g_c, m.kappa_c, m.drive_freq, m.jump_rate, m.amplitude)
                .map_err(|e| ConfigError::ConstraintViolation(format!("mech: {e}")))?;
            if !(m.dt > 0.0) || !(m.t_max > m.dt) {
                return Err(ConfigError::ConstraintViolation(
                    "mech: need dt > 0 and t_max > dt".into(),
                ));
            }
            Some(MechConfig {
                params: mp,
                t_max: m.t_max,
                dt: m.dt,
                seed: m.seed,
            })
        }
    };

    Ok(RunConfig {
        params,
        grid,
        backend,
        ensemble,
        mech,
        emit_svg: raw.emit_svg.unwrap_or(false),
        output_dir: raw.output_dir,
        quality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_applies_defaults() {
        let cfg = parse_config("[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\n").unwrap();
        assert_eq!(cfg.params.gamma_p, 0.0);
        assert_eq!(cfg.params.delta, 0.0);
        assert_eq!(cfg.backend, Backend::Regression);
        assert!(!cfg.emit_svg);
        assert_eq!(cfg.ensemble.n_traj, 20_000);
    }

    #[test]
    fn closed_form_with_dephasing_is_rejected() {
        let err = parse_config(
            "backend = \"closed_form\"\n[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\ngamma_p = 5.0\n",
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::ConstraintViolation(_)), "{err}");
    }

    #[test]
    fn micropillar_dephasing_config_is_valid() {
        let cfg = parse_config(
            "[params]\ng0 = 38.0\nkappa = 43.0\ngamma = 0.1\ngamma_p = 20.0\ndelta = 40.0\n",
        )
        .unwrap();
        assert_eq!(cfg.params.g0, 38.0);
        assert_eq!(cfg.params.gamma_p, 20.0);
    }

    #[test]
    fn unknown_key_is_reported_by_name() {
        let err =
            parse_config("[params]\ng0 = 8.0\nkappa = 1.6\ngamma = 0.32\ngama_p = 5.0\n").unwrap_err();
        match err {
            ConfigError::UnknownKey(msg) => assert!(msg.contains("gama_p"), "{msg}"),
            other => panic!("wrong error kind: {other}"),
        }
    }

    #[test]
    fn type_mismatch_is_reported() {
        let err =
            parse_config("[params]\ng0 = \"eight\"\nkappa = 1.6\ngamma = 0.32\n").unwrap_err();
        assert!(matches!(err, ConfigError::TypeMismatch(_)), "{err}");
    }

    #[test]
    fn negative_rate_is_a_constraint_violation() {
        let err = parse_config("[params]\ng0 = 8.0\nkappa = -1.6\ngamma = 0.32\n").unwrap_err();
        assert!(matches!(err, ConfigError::ConstraintViolation(_)));
    }
}
