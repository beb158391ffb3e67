//! Fixed full-resolution order with a large-sample schedule: one replicate of
//! the recalibrated control at n = 4.

use aks_qfi::controller::{run_sample_schedule, PreparedInstance};
use aks_qfi::estimator::{BootstrapConfig, SeedStrategy};
use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::stopping::StopConfig;

fn main() -> aks_qfi::Result<()> {
    let prepared = PreparedInstance::new(build_instance(&NoiseConfig::new(4, 0.03, 0.03))?, SeedStrategy::ExactState)?;
    let cfg = StopConfig {
        epsilon: 0.1885,
        ..Default::default()
    };
    let schedule = [32_768, 65_536, 131_072, 262_144];
    let r = run_sample_schedule(&prepared, 16, &schedule, &cfg, &BootstrapConfig::default(), 1)?;
    for s in &r.steps {
        println!("M={:>6}  F_hat={:.4}  w={:.4}  -> {}", s.m, s.bundle.f_hat, s.bundle.width, s.action);
    }
    let f_ref = prepared.instance.f_ref;
    println!("{}  rel err {:.4}", r.decision, (r.decision.f_hat - f_ref).abs() / f_ref);
    Ok(())
}
