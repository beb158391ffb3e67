//! JSON configuration for the harness. Every field is optional; omitted
//! fields take the defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimator::{BootstrapConfig, SeedStrategy};
use crate::family::{NoiseConfig, DEFAULT_ALPHA};
use crate::stopping::{StopConfig, StopRule};

/// Tolerance as given in a config file. A relative tolerance is resolved
/// against each instance's reference QFI before the run starts, so the
/// decision layer only ever sees an absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonSpec {
    Absolute(f64),
    Relative(f64),
}

impl EpsilonSpec {
    pub fn resolve(self, f_ref: f64) -> f64 {
        match self {
            EpsilonSpec::Absolute(e) => e,
            EpsilonSpec::Relative(r) => r * f_ref,
        }
    }

    fn validate(self) -> Result<()> {
        let v = match self {
            EpsilonSpec::Absolute(e) | EpsilonSpec::Relative(e) => e,
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("tolerance must be positive, got {v}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_qubits: usize,
    pub p_phi_list: Vec<f64>,
    pub p_dep: f64,
    pub alpha: f64,
    pub replicates: usize,
    pub rules: Vec<StopRule>,
    /// Overrides `stop.epsilon` when present.
    pub epsilon: Option<EpsilonSpec>,
    pub base_seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_qubits: 4,
            p_phi_list: vec![0.0, 0.06, 0.12, 0.18, 0.24],
            p_dep: 0.03,
            alpha: DEFAULT_ALPHA,
            replicates: 50,
            rules: vec![StopRule::WidthOnly, StopRule::ComponentAware],
            epsilon: None,
            base_seed: 0,
        }
    }
}

impl GridSpec {
    pub fn noise(&self, p_phi: f64) -> NoiseConfig {
        NoiseConfig {
            alpha: self.alpha,
            ..NoiseConfig::new(self.n_qubits, p_phi, self.p_dep)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.p_phi_list.is_empty() {
            return Err(Error::Config("p_phi_list is empty".into()));
        }
        if self.rules.is_empty() {
            return Err(Error::Config("no stopping rules selected".into()));
        }
        for &p in &self.p_phi_list {
            self.noise(p).validate()?;
        }
        if let Some(e) = self.epsilon {
            e.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationSpec {
    pub p_phi: f64,
    pub k_min_set: Vec<usize>,
    pub m_min_set: Vec<usize>,
    pub patience_set: Vec<usize>,
    /// The highlighted cell, `(K_min, M_min, P)`.
    pub default_cell: (usize, usize, usize),
}

impl Default for AblationSpec {
    fn default() -> Self {
        Self {
            p_phi: 0.12,
            k_min_set: vec![2, 4, 6],
            m_min_set: vec![32, 128, 256],
            patience_set: vec![1, 2, 3],
            default_cell: (4, 128, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySpec {
    pub k_from: usize,
    pub k_to: usize,
}

impl Default for DecaySpec {
    fn default() -> Self {
        Self { k_from: 2, k_to: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub grid: GridSpec,
    pub stop: StopConfig,
    pub bootstrap: BootstrapConfig,
    pub seed_strategy: SeedStrategy,
    pub ablation: AblationSpec,
    pub decay: DecaySpec,
    /// Largest order in generated calibration tables.
    pub calibration_k_max: usize,
    /// Pre-registered calibration table for the held-out rules. When absent
    /// the table is computed from the grid instances before any sampling.
    pub calibration_table: Option<PathBuf>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            stop: StopConfig::default(),
            bootstrap: BootstrapConfig::default(),
            seed_strategy: SeedStrategy::default(),
            ablation: AblationSpec::default(),
            decay: DecaySpec::default(),
            calibration_k_max: 16,
            calibration_table: None,
        }
    }
}

impl HarnessConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.bootstrap.validate()?;
        for &rule in &self.grid.rules {
            StopConfig { rule, ..self.stop }.validate()?;
        }
        if self.calibration_k_max == 0 {
            return Err(Error::Config("calibration_k_max must be positive".into()));
        }
        if self.decay.k_from == 0 || self.decay.k_to < self.decay.k_from + 2 {
            return Err(Error::Config("decay fits need k_from >= 1 and at least 3 orders".into()));
        }
        Ok(())
    }

    /// Stop configuration for one rule at one instance, with the tolerance
    /// resolved.
    pub fn stop_for(&self, rule: StopRule, f_ref: f64) -> StopConfig {
        let mut cfg = StopConfig { rule, ..self.stop };
        if let Some(e) = self.grid.epsilon {
            cfg.epsilon = e.resolve(f_ref);
        }
        cfg
    }

    /// Hex SHA-256 of the canonical JSON form, written into CSV metadata.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
