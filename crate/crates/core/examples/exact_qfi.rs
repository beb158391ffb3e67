//! Exact QFI of the benchmark states three ways: spectral formula, SLD and
//! (for the noiseless state) the pure-state variance.

use aks_qfi::family::{build_entangled_state, build_instance, NoiseConfig};
use aks_qfi::linalg::DensityMatrix;
use aks_qfi::qfi::{qfi_pure, qfi_spectral, sld, DEFAULT_CUTOFF};

fn main() -> aks_qfi::Result<()> {
    let pure_cfg = NoiseConfig::new(3, 0.0, 0.0);
    let psi = build_entangled_state(&pure_cfg)?;
    let inst = build_instance(&pure_cfg)?;
    let g = &inst.generator;
    println!("pure n=3: 4Var(G) = {:.6}", qfi_pure(&psi, g)?.value());
    println!("pure n=3: spectral = {:.6}", qfi_spectral(&DensityMatrix::pure(&psi)?, g, DEFAULT_CUTOFF)?.value());

    let inst = build_instance(&NoiseConfig::new(3, 0.12, 0.03))?;
    let f = qfi_spectral(&inst.rho, &inst.generator, DEFAULT_CUTOFF)?.value();
    let l = sld(&inst.rho, &inst.generator, DEFAULT_CUTOFF)?;
    let tr = (inst.rho.matrix() * l.matrix() * l.matrix()).trace().re;
    println!("noisy n=3: spectral = {f:.6}, Tr(rho L^2) = {tr:.6}");
    Ok(())
}
