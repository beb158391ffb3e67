//! Replicate grids over the noise family.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::HarnessConfig;
use super::summary::{summarize, GridSummary};
use super::{metadata, replicate_seed, with_pool};
use crate::calibration::CalibrationTable;
use crate::controller::{run_on, Action, Evaluator, Outcome, PreparedInstance, RunResult};
use crate::csvio::{read_rows, write_rows, Metadata};
use crate::error::{Error, Result};
use crate::estimator::Stability;
use crate::family::build_instance;
use crate::stopping::{StopConfig, StopRule};

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub rule: StopRule,
    pub n: usize,
    pub p_phi: f64,
    pub p_dep: f64,
    pub epsilon: f64,
    pub k_final: usize,
    pub m_final: usize,
    pub f_hat: f64,
    pub f_ref: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub width: f64,
    pub d_k: Stability,
    pub outcome: Outcome,
    pub false_stop: bool,
    pub n_eval: usize,
    pub seed: u64,
    pub r_trunc: Option<f64>,
    pub r_stat: Option<f64>,
    pub delta_j: Option<f64>,
    pub attempt_index: Option<usize>,
    pub j_max: Option<usize>,
    pub conf_estimate: Option<f64>,
    pub conf_m: Option<usize>,
    pub degenerate_bootstrap_count: usize,
    /// Numerical failure message; such runs count as resource-limit stops.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn from_result(run_id: String, r: &RunResult, f_ref: f64, epsilon: f64, p_phi: f64, p_dep: f64, n: usize) -> Self {
        let d = &r.decision;
        let abs_err = (d.f_hat - f_ref).abs();
        let c = d.certificate;
        Self {
            run_id,
            rule: r.rule,
            n,
            p_phi,
            p_dep,
            epsilon,
            k_final: d.k_final,
            m_final: d.m_final,
            f_hat: d.f_hat,
            f_ref,
            abs_err,
            rel_err: abs_err / f_ref.abs(),
            width: d.width,
            d_k: d.d_k,
            outcome: d.outcome,
            false_stop: d.outcome == Outcome::Success && abs_err > epsilon,
            n_eval: r.n_eval,
            seed: r.seed,
            r_trunc: c.map(|c| c.r_trunc),
            r_stat: c.map(|c| c.r_stat),
            delta_j: c.map(|c| c.delta_j),
            attempt_index: c.map(|c| c.attempt_index),
            j_max: c.map(|c| c.j_max),
            conf_estimate: c.map(|c| c.conf_estimate),
            conf_m: c.map(|c| c.conf_m),
            degenerate_bootstrap_count: r.degenerate_bootstrap_count,
            error: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn failed(run_id: String, rule: StopRule, cfg: &StopConfig, f_ref: f64, p_phi: f64, p_dep: f64, n: usize, seed: u64, err: &Error) -> Self {
        Self {
            run_id,
            rule,
            n,
            p_phi,
            p_dep,
            epsilon: cfg.epsilon,
            k_final: cfg.k0,
            m_final: cfg.m0,
            f_hat: f64::NAN,
            f_ref,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            width: f64::NAN,
            d_k: Stability::Forced,
            outcome: Outcome::ResourceLimit,
            false_stop: false,
            n_eval: 0,
            seed,
            r_trunc: None,
            r_stat: None,
            delta_j: None,
            attempt_index: None,
            j_max: None,
            conf_estimate: None,
            conf_m: None,
            degenerate_bootstrap_count: 0,
            error: Some(err.to_string()),
        }
    }

    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }
}

/// One controller iteration, for trajectory plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub run_id: String,
    pub rule: StopRule,
    pub p_phi: f64,
    pub iteration: usize,
    pub k: usize,
    pub m: usize,
    pub f_hat: f64,
    pub boot_lower: f64,
    pub boot_upper: f64,
    pub width: f64,
    pub d_k: Stability,
    pub eligible_k: bool,
    pub eligible_m: bool,
    pub krylov_gate: bool,
    pub sampling_gate: bool,
    pub patience_count: usize,
    pub action: Action,
    pub certificate_passed: Option<bool>,
}

impl TrajectoryRow {
    pub fn rows_for(run_id: &str, p_phi: f64, r: &RunResult) -> Vec<Self> {
        r.steps
            .iter()
            .map(|s| Self {
                run_id: run_id.to_string(),
                rule: r.rule,
                p_phi,
                iteration: s.iteration,
                k: s.k,
                m: s.m,
                f_hat: s.bundle.f_hat,
                boot_lower: s.bundle.boot_lower,
                boot_upper: s.bundle.boot_upper,
                width: s.bundle.width,
                d_k: s.bundle.d_k,
                eligible_k: s.gate_trace.eligible_k,
                eligible_m: s.gate_trace.eligible_m,
                krylov_gate: s.gate_trace.krylov_gate,
                sampling_gate: s.gate_trace.sampling_gate,
                patience_count: s.gate_trace.patience_count,
                action: s.action,
                certificate_passed: s.certificate.map(|c| c.passed),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOutput {
    pub records: Vec<RunRecord>,
    pub trajectories: Vec<TrajectoryRow>,
    pub summary: Vec<GridSummary>,
}

pub fn run_id(rule: StopRule, p_phi: f64, replicate: usize) -> String {
    format!("{rule}/{p_phi}/{replicate}")
}

/// Builds one prepared instance per noise level.
pub fn prepare_instances(cfg: &HarnessConfig, p_phi_list: &[f64]) -> Result<Vec<PreparedInstance>> {
    p_phi_list
        .par_iter()
        .map(|&p| PreparedInstance::new(build_instance(&cfg.grid.noise(p))?, cfg.seed_strategy))
        .collect()
}

/// Loads the configured calibration table, or computes one from the
/// population values when the grid needs it and none is configured.
pub fn calibration_for(cfg: &HarnessConfig, prepared: &[PreparedInstance]) -> Result<Option<CalibrationTable>> {
    if !cfg.grid.rules.iter().any(|r| matches!(r, StopRule::FixedKHeldout | StopRule::HeldoutComponentAware)) {
        return Ok(None);
    }
    if let Some(path) = &cfg.calibration_table {
        return CalibrationTable::read_csv(path).map(Some);
    }
    let k_max = cfg.calibration_k_max.max(cfg.stop.k_max).max(cfg.stop.fixed_k.unwrap_or(0));
    CalibrationTable::from_instances(prepared.iter().map(|p| &p.instance), k_max).map(Some)
}

/// Runs every `(rule, p_phi, replicate)` cell. Rules share one exploration
/// batch per `(p_phi, replicate)`, so their trajectories are matched.
/// Output rows are ordered by rule, then noise level, then replicate.
pub fn run_grid(cfg: &HarnessConfig, jobs: usize) -> Result<GridOutput> {
    cfg.validate()?;
    let grid = &cfg.grid;
    let prepared = with_pool(jobs, || prepare_instances(cfg, &grid.p_phi_list))??;
    let calibration = calibration_for(cfg, &prepared)?;
    let batch_size = cfg.stop.m_max;

    let cells: Vec<(usize, usize)> = (0..grid.p_phi_list.len())
        .flat_map(|i| (0..grid.replicates).map(move |r| (i, r)))
        .collect();
    type Cell = Vec<(RunRecord, Vec<TrajectoryRow>)>;
    let results: Vec<Cell> = with_pool(jobs, || {
        cells
            .par_iter()
            .map(|&(i, rep)| -> Result<Cell> {
                let p_phi = grid.p_phi_list[i];
                let prep = &prepared[i];
                let f_ref = prep.instance.f_ref;
                let seed = replicate_seed(grid.base_seed, p_phi, rep);
                let mut ev = Evaluator::new(prep, batch_size, seed, cfg.bootstrap)?;
                let mut out = Vec::with_capacity(grid.rules.len());
                for &rule in &grid.rules {
                    let stop = cfg.stop_for(rule, f_ref);
                    let id = run_id(rule, p_phi, rep);
                    match run_on(&mut ev, &stop, calibration.as_ref()) {
                        Ok(r) => {
                            let traj = TrajectoryRow::rows_for(&id, p_phi, &r);
                            let rec = RunRecord::from_result(id, &r, f_ref, stop.epsilon, p_phi, grid.p_dep, grid.n_qubits);
                            out.push((rec, traj));
                        }
                        Err(e @ (Error::Config(_) | Error::Json(_))) => return Err(e),
                        Err(e) => out.push((
                            RunRecord::failed(id, rule, &stop, f_ref, p_phi, grid.p_dep, grid.n_qubits, seed, &e),
                            Vec::new(),
                        )),
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut records = Vec::with_capacity(cells.len() * grid.rules.len());
    let mut trajectories = Vec::new();
    for j in 0..grid.rules.len() {
        for cell in &results {
            let (rec, traj) = &cell[j];
            records.push(rec.clone());
            trajectories.extend(traj.iter().cloned());
        }
    }
    let summary = summarize(&records)?;
    Ok(GridOutput {
        records,
        trajectories,
        summary,
    })
}

impl GridOutput {
    /// Writes `runs.csv`, `summary.csv` and `trajectories.csv` under `dir`.
    pub fn write(&self, dir: &Path, cfg: &HarnessConfig) -> Result<()> {
        let meta = metadata(cfg, "grid");
        write_rows(&dir.join("runs.csv"), &meta, &self.records)?;
        write_rows(&dir.join("summary.csv"), &meta, &self.summary)?;
        write_rows(&dir.join("trajectories.csv"), &meta, &self.trajectories)?;
        Ok(())
    }
}

pub fn read_runs(path: &Path) -> Result<(Metadata, Vec<RunRecord>)> {
    read_rows(path)
}

pub fn read_trajectories(path: &Path) -> Result<(Metadata, Vec<TrajectoryRow>)> {
    read_rows(path)
}
