//! Reference QFI across the dephasing grid for a few register sizes.

use aks_qfi::family::{build_instance, NoiseConfig};

fn main() -> aks_qfi::Result<()> {
    println!("{:>3} {:>6} {:>10}", "n", "p_phi", "F_ref");
    for n in [2, 3, 4] {
        for p in [0.0, 0.03, 0.06, 0.12, 0.18, 0.24] {
            let inst = build_instance(&NoiseConfig::new(n, p, 0.03))?;
            println!("{n:>3} {p:>6.2} {:>10.4}", inst.f_ref);
        }
    }
    Ok(())
}
