//! Classical-shadow reconstruction error against the number of snapshots.

use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::linalg::frobenius_distance;
use aks_qfi::shadow::{mean_estimate, ShadowSampler};

fn main() -> aks_qfi::Result<()> {
    let inst = build_instance(&NoiseConfig::new(2, 0.12, 0.03))?;
    let sampler = ShadowSampler::new(&inst.rho)?;
    let batch = sampler.draw(100_000, 42)?;
    println!("{:>7} {:>12}", "M", "||rho_hat - rho||_F");
    // nested prefixes of one batch
    for m in [100, 1_000, 10_000, 100_000] {
        let est = mean_estimate(&batch, m)?;
        println!("{m:>7} {:>12.5}", frobenius_distance(&est, inst.rho.matrix()));
    }
    let s = batch.snapshot(0);
    println!("first snapshot: bases {:?}, outcomes {:?}", s.bases, s.outcomes);
    Ok(())
}
