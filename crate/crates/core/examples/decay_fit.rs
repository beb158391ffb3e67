//! Exponential fits to the population truncation bias |B_K|.

use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::harness::decay::{fit_series, truncation_series};

fn main() -> aks_qfi::Result<()> {
    for n in [4, 6] {
        let inst = build_instance(&NoiseConfig::new(n, 0.12, 0.03))?;
        let rows = truncation_series(&inst, 2, 8)?;
        for f in fit_series(&rows, 2, 8)? {
            println!(
                "n={n}: mu_hat={:.3} 95% CI [{:.3}, {:.3}] over K=2..8",
                f.mu_hat, f.ci_lower, f.ci_upper
            );
        }
    }
    Ok(())
}
