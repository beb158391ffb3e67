//! Component-aware gate thresholds swept at one noise level.

use aks_qfi::cli::render_ablation;
use aks_qfi::harness::{run_ablation, HarnessConfig};

fn main() -> aks_qfi::Result<()> {
    let mut cfg = HarnessConfig::default();
    cfg.grid.replicates = 20;
    print!("{}", render_ablation(&run_ablation(&cfg, 0)?));
    Ok(())
}
