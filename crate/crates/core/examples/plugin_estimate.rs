//! Plug-in estimates with bootstrap intervals on nested prefixes of one batch.

use aks_qfi::estimator::{BootstrapConfig, PlugInEstimator, SeedStrategy};
use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::shadow::ShadowSampler;

fn main() -> aks_qfi::Result<()> {
    let inst = build_instance(&NoiseConfig::new(4, 0.12, 0.03))?;
    let est = PlugInEstimator::new(&inst, SeedStrategy::ExactState)?;
    let batch = ShadowSampler::new(&inst.rho)?.draw(512, 7)?;
    let cfg = BootstrapConfig::default();
    println!("F_ref = {:.4}", inst.f_ref);
    for m in [32, 128, 512] {
        let ens = est.prepare(&batch, m, &cfg)?;
        for k in [2, 4, 8] {
            let b = est.bundle_from(&ens, k, None)?;
            println!(
                "M={m:>3} K={k}  F_hat={:.4}  90% CI [{:.4}, {:.4}]  w={:.4}  d_K={}",
                b.f_hat, b.boot_lower, b.boot_upper, b.width, b.d_k
            );
        }
    }
    Ok(())
}
