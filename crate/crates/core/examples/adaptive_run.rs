//! Matched width-only and component-aware runs on the same shadow batch.

use aks_qfi::controller::{run_on, Evaluator, PreparedInstance};
use aks_qfi::estimator::{BootstrapConfig, SeedStrategy};
use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::harness::replicate_seed;
use aks_qfi::stopping::{StopConfig, StopRule};

fn main() -> aks_qfi::Result<()> {
    let inst = build_instance(&NoiseConfig::new(4, 0.12, 0.03))?;
    let f_ref = inst.f_ref;
    let prepared = PreparedInstance::new(inst, SeedStrategy::ExactState)?;
    let seed = replicate_seed(0, 0.12, 43);
    let mut ev = Evaluator::new(&prepared, 512, seed, BootstrapConfig::default())?;
    for rule in [StopRule::WidthOnly, StopRule::ComponentAware] {
        let r = run_on(&mut ev, &StopConfig::with_rule(rule), None)?;
        println!("{rule}:");
        for s in &r.steps {
            println!(
                "  K={} M={:>3} F_hat={:.4} w={:.4} d_K={:<8.4} -> {}",
                s.k, s.m, s.bundle.f_hat, s.bundle.width, s.bundle.d_k.value(), s.action
            );
        }
        println!("  {}  |err|={:.4}", r.decision, (r.decision.f_hat - f_ref).abs());
    }
    Ok(())
}
