//! Command-line front end used by the `aksqfi` binary.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on
//! runtime failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::calibration::CalibrationTable;
use crate::controller::{run_prepared, PreparedInstance};
use crate::csvio::{read_rows, write_rows};
use crate::error::{Error, Result};
use crate::family::build_instance;
use crate::harness::ablation::{run_ablation, write_ablation, AblationCell};
use crate::harness::decay::{fit_series, stability_series, truncation_series, DecayFitRow};
use crate::harness::grid::{read_runs, read_trajectories, run_grid};
use crate::harness::{make_calibration_table, metadata, summarize, write_calibration, EpsilonSpec, GridSummary, HarnessConfig};
use crate::stopping::StopRule;

#[derive(Debug, Parser)]
#[command(name = "aksqfi", version, about = "Adaptive Krylov-shadow QFI estimation and reliability benchmarks")]
struct Cli {
    /// JSON configuration file; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Base seed (run seed for `estimate`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replicate fan-out; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Stopping rule, replacing the configured rule list.
    #[arg(long, global = true)]
    rule: Option<StopRule>,
    /// Absolute tolerance, replacing the configured one.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the controller once and print the stop decision.
    Estimate {
        /// Number of qubits (defaults to the configured grid).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.12)]
        p_phi: f64,
        /// Also print every controller step.
        #[arg(long)]
        trajectory: bool,
    },
    /// Reliability grid: writes runs.csv, summary.csv and trajectories.csv.
    Grid,
    /// Threshold ablation: writes ablation.csv.
    Ablation,
    /// Population calibration table: writes calibration.csv.
    Calibrate {
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Exponential decay fits: writes decay_series.csv and decay_fit.csv.
    DecayFit {
        /// Trajectory CSV from `grid`; adds the per-order d_K median series.
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
    /// Recompute the summary from a runs.csv file.
    Report {
        runs: PathBuf,
        /// Compare against an existing summary.csv and fail on mismatch.
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn load_config(cli: &Cli) -> Result<HarnessConfig> {
    let mut cfg = match &cli.config {
        Some(p) => HarnessConfig::load(p)?,
        None => HarnessConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.grid.base_seed = s;
    }
    if let Some(r) = cli.rule {
        cfg.grid.rules = vec![r];
        cfg.stop.rule = r;
    }
    if let Some(e) = cli.eps {
        cfg.grid.epsilon = Some(EpsilonSpec::Absolute(e));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Estimate { n, p_phi, trajectory } => estimate(&cfg, *n, *p_phi, *trajectory, out),
        Command::Grid => {
            let g = run_grid(&cfg, cli.jobs)?;
            g.write(&cli.out, &cfg)?;
            out.write_all(render_summary(&g.summary).as_bytes())?;
            Ok(())
        }
        Command::Ablation => {
            let cells = run_ablation(&cfg, cli.jobs)?;
            write_ablation(&cli.out.join("ablation.csv"), &cfg, &cells)?;
            out.write_all(render_ablation(&cells).as_bytes())?;
            Ok(())
        }
        Command::Calibrate { k_max } => {
            let mut cfg = cfg;
            if let Some(k) = k_max {
                cfg.calibration_k_max = *k;
            }
            let table = make_calibration_table(&cfg)?;
            let path = cli.out.join("calibration.csv");
            write_calibration(&path, &cfg, &table)?;
            writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display())?;
            Ok(())
        }
        Command::DecayFit { trajectories } => decay_fit(&cfg, trajectories.as_deref(), &cli.out, out),
        Command::Report { runs, check } => {
            let (_, records) = read_runs(runs)?;
            let summary = summarize(&records)?;
            if let Some(path) = check {
                let (_, expected): (_, Vec<GridSummary>) = read_rows(path)?;
                if expected != summary {
                    return Err(Error::DegenerateInput(format!(
                        "summary recomputed from {} differs from {}",
                        runs.display(),
                        path.display()
                    )));
                }
            }
            out.write_all(render_summary(&summary).as_bytes())?;
            Ok(())
        }
    }
}

fn estimate(cfg: &HarnessConfig, n: Option<usize>, p_phi: f64, trajectory: bool, out: &mut dyn Write) -> Result<()> {
    let mut noise = cfg.grid.noise(p_phi);
    if let Some(n) = n {
        noise.n_qubits = n;
    }
    noise.validate()?;
    let prepared = PreparedInstance::new(build_instance(&noise)?, cfg.seed_strategy)?;
    let stop = cfg.stop_for(cfg.stop.rule, prepared.instance.f_ref);
    let table = if stop.rule.is_heldout() && stop.rule != StopRule::SeqHeldoutWidth {
        Some(match &cfg.calibration_table {
            Some(p) => CalibrationTable::read_csv(p)?,
            None => CalibrationTable::from_instances(
                [&prepared.instance],
                cfg.calibration_k_max.max(stop.k_max).max(stop.fixed_k.unwrap_or(0)),
            )?,
        })
    } else {
        None
    };
    let r = run_prepared(&prepared, &stop, &cfg.bootstrap, cfg.grid.base_seed, table.as_ref())?;
    if trajectory {
        for s in &r.steps {
            writeln!(
                out,
                "step={} K={} M={} f_hat={:.6} width={:.6} d_K={} patience={} action={}",
                s.iteration,
                s.k,
                s.m,
                s.bundle.f_hat,
                s.bundle.width,
                s.bundle.d_k,
                s.gate_trace.patience_count,
                s.action
            )?;
        }
    }
    writeln!(out, "{} f_ref={:.6}", r.decision, prepared.instance.f_ref)?;
    Ok(())
}

fn decay_fit(cfg: &HarnessConfig, trajectories: Option<&Path>, dir: &Path, out: &mut dyn Write) -> Result<()> {
    let (k_from, k_to) = (cfg.decay.k_from, cfg.decay.k_to);
    let mut rows = Vec::new();
    for &p in &cfg.grid.p_phi_list {
        rows.extend(truncation_series(&build_instance(&cfg.grid.noise(p))?, k_from, k_to)?);
    }
    if let Some(path) = trajectories {
        let (_, traj) = read_trajectories(path)?;
        for &p in &cfg.grid.p_phi_list {
            rows.extend(stability_series(&traj, cfg.grid.n_qubits, p, k_from, k_to));
        }
    }
    let fits = fit_series(&rows, k_from, k_to)?;
    let meta = metadata(cfg, "decay-fit");
    write_rows(&dir.join("decay_series.csv"), &meta, &rows)?;
    write_rows(&dir.join("decay_fit.csv"), &meta, &fits)?;
    out.write_all(render_fits(&fits).as_bytes())?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

pub fn render_summary(rows: &[GridSummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:>6} {:>5} {:>5} {:>16} {:>16} {:>5} {:>10} {:>8} {:>8}",
        "rule", "p_phi", "runs", "stops", "FSR [95% CI]", "SR [95% CI]", "SP", "med|err|", "med M", "IQR M"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<24} {:>6.3} {:>5} {:>5} {:>4.2} [{:.2},{:.2}] {:>4.2} [{:.2},{:.2}] {:>5} {:>10.4} {:>8.0} {:>8.0}",
            r.rule.name(),
            r.p_phi,
            r.runs,
            r.successes,
            r.fsr,
            r.fsr_lower,
            r.fsr_upper,
            r.sr,
            r.sr_lower,
            r.sr_upper,
            opt(r.sp),
            r.median_abs_err,
            r.median_m_final,
            r.iqr_m_final
        );
    }
    s
}

pub fn render_ablation(cells: &[AblationCell]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>5} {:>5} {:>3} {:>5} {:>5} {:>16} {:>5}", "K_min", "M_min", "P", "stops", "false", "FSR [95% CI]", "SP");
    for c in cells {
        let _ = writeln!(
            s,
            "{:>5} {:>5} {:>3} {:>5} {:>5} {:>4.2} [{:.2},{:.2}] {:>5}{}",
            c.k_min,
            c.m_min,
            c.patience,
            c.successes,
            c.false_stops,
            c.fsr,
            c.fsr_lower,
            c.fsr_upper,
            opt(c.sp),
            if c.is_default { "  (default)" } else { "" }
        );
    }
    s
}

pub fn render_fits(fits: &[DecayFitRow]) -> String {
    let mut s = String::new();
    for f in fits {
        let _ = writeln!(
            s,
            "{:<11} n={} p_phi={:.3} K={}..{} mu_hat={:.4} 95% CI [{:.4}, {:.4}]{}",
            f.series,
            f.n,
            f.p_phi,
            f.k_from,
            f.k_to,
            f.mu_hat,
            f.ci_lower,
            f.ci_upper,
            if f.diverges { " (no decay)" } else { "" }
        );
    }
    s
}
