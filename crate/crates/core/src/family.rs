//! The noisy mixed-state benchmark family.
//!
//! An entangled pure state `exp(-iαH_ent)|+⟩^⊗n` with
//! `H_ent = Σ Z_j Z_{j+1} + 0.35 Σ X_j` goes through independent
//! single-qubit dephasing and then a global depolarizing channel. The phase
//! is encoded by `G = ½ Σ Z_j + 0.08 Σ X_j X_{j+1}` at θ = 0.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational-basis index.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    expm_unitary, pauli_on, ComplexMatrix, DensityMatrix, HermitianOperator, Pauli, StateVector,
    C64, MAX_QUBITS,
};
use crate::qfi::{qfi_spectral, DEFAULT_CUTOFF};

pub const DEFAULT_ALPHA: f64 = 0.25;
/// Transverse-field strength in the entangling Hamiltonian.
pub const ENT_FIELD: f64 = 0.35;
/// Nearest-neighbour XX coupling in the encoding generator.
pub const GEN_COUPLING: f64 = 0.08;

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub n_qubits: usize,
    pub p_phi: f64,
    pub p_dep: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl NoiseConfig {
    pub fn new(n_qubits: usize, p_phi: f64, p_dep: f64) -> Self {
        Self {
            n_qubits,
            p_phi,
            p_dep,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {}",
                self.n_qubits
            )));
        }
        check_probability("p_phi", self.p_phi)?;
        check_probability("p_dep", self.p_dep)?;
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        Ok(())
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// A fully built benchmark point with its exact reference QFI.
#[derive(Debug, Clone)]
pub struct BenchmarkInstance {
    pub rho: DensityMatrix,
    pub generator: HermitianOperator,
    pub config: NoiseConfig,
    pub f_ref: f64,
}

impl BenchmarkInstance {
    pub fn n_qubits(&self) -> usize {
        self.config.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

fn entangling_hamiltonian(n: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for j in 0..n.saturating_sub(1) {
        h += pauli_on(Pauli::Z, j, n) * pauli_on(Pauli::Z, j + 1, n);
    }
    for j in 0..n {
        h += pauli_on(Pauli::X, j, n).scale(ENT_FIELD);
    }
    h
}

pub fn build_entangled_state(config: &NoiseConfig) -> Result<StateVector> {
    config.validate()?;
    let n = config.n_qubits;
    let dim = 1 << n;
    let plus = StateVector::from_element(dim, C64::new((dim as f64).sqrt().recip(), 0.0));
    let h = HermitianOperator::new(entangling_hamiltonian(n))?;
    let psi = expm_unitary(&h, config.alpha) * plus;
    // strip the O(1e-15) norm drift of the eigendecomposition
    let norm = psi.norm();
    Ok(psi.unscale(norm))
}

/// `ρ ↦ (1-p)ρ + p Z_j ρ Z_j` on every qubit in turn. Each channel scales
/// the entries whose row and column differ in bit `j` by `1 - 2p`.
pub fn apply_dephasing(rho: &DensityMatrix, p_phi: f64) -> Result<DensityMatrix> {
    check_probability("p_phi", p_phi)?;
    let n = rho
        .n_qubits()
        .ok_or_else(|| Error::DimensionMismatch("dephasing needs a qubit register".into()))?;
    let mut m = rho.matrix().clone();
    let factor = 1.0 - 2.0 * p_phi;
    for j in 0..n {
        let mask = 1usize << (n - 1 - j);
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if (r ^ c) & mask != 0 {
                    m[(r, c)] *= factor;
                }
            }
        }
    }
    Ok(DensityMatrix::from_trusted(m))
}

/// `ρ ↦ (1-p)ρ + p I/d`.
pub fn apply_depolarizing(rho: &DensityMatrix, p_dep: f64) -> Result<DensityMatrix> {
    check_probability("p_dep", p_dep)?;
    let d = rho.dim();
    let mixed = DensityMatrix::maximally_mixed(d);
    let m = rho.matrix().scale(1.0 - p_dep) + mixed.matrix().scale(p_dep);
    Ok(DensityMatrix::from_trusted(m))
}

pub fn build_generator(n: usize) -> Result<HermitianOperator> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Config(format!("n must be in 1..={MAX_QUBITS}, got {n}")));
    }
    let dim = 1 << n;
    let mut g = ComplexMatrix::zeros(dim, dim);
    for j in 0..n {
        g += pauli_on(Pauli::Z, j, n).scale(0.5);
    }
    for j in 0..n - 1 {
        g += (pauli_on(Pauli::X, j, n) * pauli_on(Pauli::X, j + 1, n)).scale(GEN_COUPLING);
    }
    HermitianOperator::new(g)
}

/// Noisy base state `E_dep ∘ E_deph (|ψ_α⟩⟨ψ_α|)` together with `G` and the
/// exact QFI at θ = 0.
pub fn build_instance(config: &NoiseConfig) -> Result<BenchmarkInstance> {
    config.validate()?;
    let psi = build_entangled_state(config)?;
    let pure = DensityMatrix::pure(&psi)?;
    let dephased = apply_dephasing(&pure, config.p_phi)?;
    let rho = apply_depolarizing(&dephased, config.p_dep)?;
    let generator = build_generator(config.n_qubits)?;
    let f_ref = qfi_spectral(&rho, &generator, DEFAULT_CUTOFF)?.value();
    Ok(BenchmarkInstance {
        rho,
        generator,
        config: *config,
        f_ref,
    })
}
