//! Run manifests: a canonical JSON record of everything that determines an
//! output file, hashed so the data files can embed their provenance.

use serde::Serialize;
use sha2::{Digest, Sha256};

use cavity_spectra::model::{NumericalGrid, SystemParams};
use cavity_spectra::spectra::SolverQuality;
use cavity_spectra::stochastic::EnsembleConfig;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub backend: String,
    pub params: SystemParams,
    pub grid: NumericalGrid,
    pub quality: SolverQuality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    /// measured invariant checks (name, value)
    pub checks: Vec<(String, f64)>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        backend: String,
        params: SystemParams,
        grid: NumericalGrid,
        quality: SolverQuality,
        ensemble: Option<EnsembleConfig>,
    ) -> Self {
        Self {
            tool: "cavspec",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            backend,
            params,
            grid,
            quality,
            ensemble,
            checks: Vec::new(),
        }
    }

    pub fn with_check(mut self, name: &str, value: f64) -> Self {
        self.checks.push((name.to_string(), value));
        self
    }

    /// Canonical JSON (struct field order; no timestamps, so identical runs
    /// serialize identically).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// SHA-256 of the canonical JSON, hex-encoded.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The comment line embedded at the top of every data file.
    pub fn comment(&self) -> String {
        format!("manifest sha256 {}", self.hash())
    }
}
