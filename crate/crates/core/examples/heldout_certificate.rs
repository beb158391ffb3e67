//! Held-out certification: a candidate stop is confirmed on a fresh batch
//! and accepted only if truncation radius plus sampling radius fit in eps.

use aks_qfi::calibration::CalibrationTable;
use aks_qfi::controller::{run_prepared, PreparedInstance};
use aks_qfi::estimator::{BootstrapConfig, SeedStrategy};
use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::stopping::{StopConfig, StopRule};

fn main() -> aks_qfi::Result<()> {
    let prepared = PreparedInstance::new(build_instance(&NoiseConfig::new(2, 0.03, 0.03))?, SeedStrategy::ExactState)?;
    let table = CalibrationTable::from_instances([&prepared.instance], 4)?;
    for fixed_k in [4, 1] {
        let cfg = StopConfig {
            rule: StopRule::FixedKHeldout,
            fixed_k: Some(fixed_k),
            epsilon: 0.5,
            m_max: 4096,
            ..Default::default()
        };
        let r = run_prepared(&prepared, &cfg, &BootstrapConfig::default(), 3, Some(&table))?;
        println!("K={fixed_k}: {}", r.decision);
        for c in r.steps.iter().filter_map(|s| s.certificate) {
            println!(
                "  attempt {}/{}: r_trunc={:.4} r_stat={:.4} delta_j={:.4} -> {}",
                c.attempt_index,
                c.j_max,
                c.r_trunc,
                c.r_stat,
                c.delta_j,
                if c.passed { "accept" } else { "reject" }
            );
        }
    }
    Ok(())
}
