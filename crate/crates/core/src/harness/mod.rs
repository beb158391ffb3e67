//! Benchmark harness: replicate grids, reliability summaries, threshold
//! ablation, decay fits and calibration tables, all persisted as CSV.

pub mod ablation;
pub mod config;
pub mod decay;
pub mod grid;
pub mod summary;

use std::path::Path;

use crate::calibration::CalibrationTable;
use crate::csvio::Metadata;
use crate::error::{Error, Result};
use crate::family::build_instance;
use crate::seeding::{derive_seed, tag};

pub use ablation::{run_ablation, AblationCell};
pub use config::{AblationSpec, DecaySpec, EpsilonSpec, GridSpec, HarnessConfig};
pub use decay::{fit_decay, DecayFit};
pub use grid::{run_grid, GridOutput, RunRecord, TrajectoryRow};
pub use summary::{summarize, GridSummary, Rates};

/// Seed for replicate `rep` at noise level `p_phi`. It does not depend on the
/// rule, so all rules at one `(p_phi, rep)` see the same shadow batch.
pub fn replicate_seed(base_seed: u64, p_phi: f64, rep: usize) -> u64 {
    derive_seed(&[tag::REPLICATE, base_seed, p_phi.to_bits(), rep as u64])
}

/// Metadata preamble shared by every harness CSV.
pub fn metadata(cfg: &HarnessConfig, command: &str) -> Metadata {
    let mut m = Metadata::new();
    m.push("command", command)
        .push("config_sha256", cfg.digest())
        .push("seed", cfg.grid.base_seed)
        .push("qubit_order", "qubit 0 is the most significant bit");
    m
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool when `jobs`
/// is zero.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a pool of {jobs} threads: {e}")))?;
    Ok(pool.install(f))
}

/// Population calibration table over the grid's noise levels, orders
/// `1..=calibration_k_max`.
pub fn make_calibration_table(cfg: &HarnessConfig) -> Result<CalibrationTable> {
    cfg.validate()?;
    let instances = cfg
        .grid
        .p_phi_list
        .iter()
        .map(|&p| build_instance(&cfg.grid.noise(p)))
        .collect::<Result<Vec<_>>>()?;
    CalibrationTable::from_instances(instances.iter(), cfg.calibration_k_max)
}

pub fn write_calibration(path: &Path, cfg: &HarnessConfig, table: &CalibrationTable) -> Result<()> {
    table.write_csv(path, &metadata(cfg, "calibrate"))
}
