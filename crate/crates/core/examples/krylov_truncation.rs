//! Population Krylov values F_K and truncation bias |B_K| at n = 4.

use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::krylov::population_table;

fn main() -> aks_qfi::Result<()> {
    for p in [0.03, 0.24] {
        let inst = build_instance(&NoiseConfig::new(4, p, 0.03))?;
        println!("p_phi = {p}, F_ref = {:.4}", inst.f_ref);
        for row in population_table(&inst, 16)? {
            println!("  K={:>2}  F_K={:.4}  |B_K|/F={:.4}", row.k, row.f_k, row.b_abs / inst.f_ref);
        }
    }
    Ok(())
}
