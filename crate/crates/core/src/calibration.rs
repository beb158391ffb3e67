//! Krylov truncation calibration tables.
//!
//! One row per `(n, p_phi, p_dep, K)` with the population value `F_K` on the
//! exact state and the truncation bias `|F_K - F_ref|`. The held-out rules
//! read their truncation radius from here and refuse to guess when a row is
//! missing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csvio::{read_rows, write_rows, Metadata};
use crate::error::{Error, Result};
use crate::family::{BenchmarkInstance, NoiseConfig};
use crate::krylov::population_table;

/// Noise parameters match when they agree to this absolute tolerance.
const KEY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub n: usize,
    pub p_phi: f64,
    pub p_dep: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "F_K")]
    pub f_k: f64,
    #[serde(rename = "B_abs")]
    pub b_abs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationTable {
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationTable {
    pub fn from_instances<'a>(
        instances: impl IntoIterator<Item = &'a BenchmarkInstance>,
        k_max: usize,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        for inst in instances {
            let c = inst.config;
            for r in population_table(inst, k_max)? {
                rows.push(CalibrationRow {
                    n: c.n_qubits,
                    p_phi: c.p_phi,
                    p_dep: c.p_dep,
                    k: r.k,
                    f_k: r.f_k,
                    b_abs: r.b_abs,
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn lookup(&self, noise: &NoiseConfig, k: usize) -> Option<&CalibrationRow> {
        self.rows.iter().find(|r| {
            r.n == noise.n_qubits
                && r.k == k
                && (r.p_phi - noise.p_phi).abs() <= KEY_TOL
                && (r.p_dep - noise.p_dep).abs() <= KEY_TOL
        })
    }

    /// Truncation radius `|B_K|` for a noise point.
    pub fn radius(&self, noise: &NoiseConfig, k: usize) -> Result<f64> {
        self.lookup(noise, k).map(|r| r.b_abs).ok_or_else(|| {
            Error::Config(format!(
                "calibration table has no row for n={}, p_phi={}, p_dep={}, K={k}",
                noise.n_qubits, noise.p_phi, noise.p_dep
            ))
        })
    }

    pub fn write_csv(&self, path: &Path, meta: &Metadata) -> Result<()> {
        write_rows(path, meta, &self.rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Ok(Self { rows: read_rows(path)?.1 })
    }
}
