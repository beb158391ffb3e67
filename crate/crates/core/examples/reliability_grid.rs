//! A reduced reliability grid written to CSV, then summarized again from the
//! written file.

use aks_qfi::cli::render_summary;
use aks_qfi::harness::grid::read_runs;
use aks_qfi::harness::{run_grid, summarize, HarnessConfig};

fn main() -> aks_qfi::Result<()> {
    let mut cfg = HarnessConfig::default();
    cfg.grid.p_phi_list = vec![0.0, 0.24];
    cfg.grid.replicates = 10;
    let out = run_grid(&cfg, 0)?;
    print!("{}", render_summary(&out.summary));

    let dir = std::env::temp_dir().join("aksqfi-example-grid");
    out.write(&dir, &cfg)?;
    let (meta, records) = read_runs(&dir.join("runs.csv"))?;
    assert_eq!(summarize(&records)?, out.summary);
    println!("wrote {} (config {})", dir.display(), meta.get("config_sha256").unwrap_or("?"));
    Ok(())
}
