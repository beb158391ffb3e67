//! Exact quantum Fisher information at θ = 0 for the unitary encoding
//! `ρ_θ = e^{-iGθ} ρ e^{iGθ}`.

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, ComplexMatrix, DensityMatrix, HermitianOperator, SpectralDecomposition, StateVector,
    C64,
};

/// Eigenvalue pairs with `λ_j + λ_k` at or below this are skipped.
pub const DEFAULT_CUTOFF: f64 = 1e-10;

const NEGATIVE_CLAMP: f64 = -1e-9;

/// A non-negative QFI value. Round-off down to `-1e-9` is clamped to zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QfiValue(f64);

impl QfiValue {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite);
        }
        if value < NEGATIVE_CLAMP {
            return Err(Error::DegenerateInput(format!("negative QFI {value}")));
        }
        Ok(Self(value.max(0.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<QfiValue> for f64 {
    fn from(q: QfiValue) -> f64 {
        q.0
    }
}

fn check_dims(rho_dim: usize, g: &HermitianOperator) -> Result<()> {
    if rho_dim != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {rho_dim}, generator {}",
            g.dim()
        )));
    }
    Ok(())
}

/// `∂_θ ρ_θ |_{θ=0} = -i[G, ρ]`.
pub fn drho(rho: &DensityMatrix, g: &HermitianOperator) -> Result<ComplexMatrix> {
    check_dims(rho.dim(), g)?;
    Ok(commutator_derivative(rho.matrix(), g.matrix()))
}

pub(crate) fn commutator_derivative(rho: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let comm = g * rho - rho * g;
    comm * C64::new(0.0, -1.0)
}

/// `F = 2 Σ_{λ_j+λ_k > cutoff} |⟨j|∂ρ|k⟩|² / (λ_j+λ_k)`.
pub fn qfi_spectral(
    rho: &DensityMatrix,
    g: &HermitianOperator,
    cutoff: f64,
) -> Result<QfiValue> {
    check_dims(rho.dim(), g)?;
    let spec = eigh(rho.matrix());
    QfiValue::new(qfi_from_spectrum(&spec, g.matrix(), cutoff))
}

/// Spectral formula on a precomputed decomposition of ρ. In the eigenbasis
/// `⟨j|∂ρ|k⟩ = -i(λ_k - λ_j) G_jk`, so only `V†GV` is needed.
pub(crate) fn qfi_from_spectrum(spec: &SpectralDecomposition, g: &ComplexMatrix, cutoff: f64) -> f64 {
    let v = &spec.eigenvectors;
    let g_eig = v.adjoint() * g * v;
    let lam = &spec.eigenvalues;
    let mut total = 0.0;
    for k in 0..lam.len() {
        for j in 0..lam.len() {
            let s = lam[j] + lam[k];
            if s <= cutoff {
                continue;
            }
            let diff = lam[k] - lam[j];
            total += g_eig[(j, k)].norm_sqr() * diff * diff / s;
        }
    }
    2.0 * total
}

/// Pure-state QFI `4 Var_ψ(G)`.
pub fn qfi_pure(psi: &StateVector, g: &HermitianOperator) -> Result<QfiValue> {
    check_dims(psi.len(), g)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let g_psi = g.matrix() * psi;
    let mean = psi.dotc(&g_psi).re;
    let second = g_psi.norm_squared();
    QfiValue::new(4.0 * (second - mean * mean))
}

/// Symmetric logarithmic derivative `L_jk = 2(∂ρ)_jk / (λ_j+λ_k)` in the
/// eigenbasis of ρ, zero on pairs below the cutoff.
pub fn sld(rho: &DensityMatrix, g: &HermitianOperator, cutoff: f64) -> Result<HermitianOperator> {
    check_dims(rho.dim(), g)?;
    let spec = eigh(rho.matrix());
    let v = &spec.eigenvectors;
    let d = v.adjoint() * drho(rho, g)? * v;
    let lam = &spec.eigenvalues;
    let l_eig = ComplexMatrix::from_fn(lam.len(), lam.len(), |j, k| {
        let s = lam[j] + lam[k];
        if s <= cutoff {
            C64::new(0.0, 0.0)
        } else {
            d[(j, k)] * (2.0 / s)
        }
    });
    HermitianOperator::from_hermitized(&(v * l_eig * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_generator, build_instance, NoiseConfig};
    use crate::linalg::{expm_unitary, frobenius_distance, pauli_on, Pauli};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plus(n: usize) -> StateVector {
        let d = 1 << n;
        StateVector::from_element(d, C64::new((d as f64).sqrt().recip(), 0.0))
    }

    fn z_sum(n: usize) -> HermitianOperator {
        let d = 1 << n;
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..n {
            m += pauli_on(Pauli::Z, j, n).scale(0.5);
        }
        HermitianOperator::new(m).unwrap()
    }

    fn random_state(dim: usize, rng: &mut impl Rng) -> StateVector {
        let v = StateVector::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = v.norm();
        v.unscale(norm)
    }

    fn random_full_rank(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
        let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut m = &a * a.adjoint() + ComplexMatrix::identity(dim, dim).scale(0.05);
        let tr = m.trace();
        m /= tr;
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn drho_vanishes_on_commuting_states() {
        let g = z_sum(2);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(drho(&mixed, &g).unwrap().norm() < 1e-15);

        let mut zero = StateVector::zeros(2);
        zero[0] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&zero).unwrap();
        assert!(drho(&rho, &z_sum(1)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn drho_on_plus_state() {
        let rho = DensityMatrix::pure(&plus(1)).unwrap();
        let d = drho(&rho, &z_sum(1)).unwrap();
        let expected = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, -0.5),
                C64::new(0.0, 0.5),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(frobenius_distance(&d, &expected) < 1e-15);
    }

    #[test]
    fn maximally_mixed_has_zero_qfi() {
        let g = build_generator(3).unwrap();
        let f = qfi_spectral(&DensityMatrix::maximally_mixed(8), &g, DEFAULT_CUTOFF).unwrap();
        assert_eq!(f.value(), 0.0);
    }

    #[test]
    fn plus_product_state_gives_n() {
        for n in 1..=4 {
            let psi = plus(n);
            let g = z_sum(n);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let spectral = qfi_spectral(&rho, &g, DEFAULT_CUTOFF).unwrap().value();
            let pure = qfi_pure(&psi, &g).unwrap().value();
            assert!((pure - n as f64).abs() < 1e-12);
            assert!((spectral - pure).abs() < 1e-8);
        }
    }

    #[test]
    fn pure_state_values() {
        let mut zero = StateVector::zeros(2);
        zero[0] = C64::new(1.0, 0.0);
        assert!(qfi_pure(&zero, &z_sum(1)).unwrap().value().abs() < 1e-15);
        assert!((qfi_pure(&plus(1), &z_sum(1)).unwrap().value() - 1.0).abs() < 1e-14);

        for n in 2..=4 {
            let d = 1 << n;
            let mut ghz = StateVector::zeros(d);
            ghz[0] = C64::new(0.5f64.sqrt(), 0.0);
            ghz[d - 1] = C64::new(0.5f64.sqrt(), 0.0);
            let f = qfi_pure(&ghz, &z_sum(n)).unwrap().value();
            assert!((f - (n * n) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_matches_pure_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = build_generator(3).unwrap();
        for _ in 0..20 {
            let psi = random_state(8, &mut rng);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let a = qfi_spectral(&rho, &g, DEFAULT_CUTOFF).unwrap().value();
            let b = qfi_pure(&psi, &g).unwrap().value();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn sld_cases() {
        let g = z_sum(2);
        let l = sld(&DensityMatrix::maximally_mixed(4), &g, DEFAULT_CUTOFF).unwrap();
        assert!(l.matrix().norm() < 1e-15);

        let rho = DensityMatrix::pure(&plus(1)).unwrap();
        let l = sld(&rho, &z_sum(1), DEFAULT_CUTOFF).unwrap();
        let f = (rho.matrix() * l.matrix() * l.matrix()).trace().re;
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sld_solves_defining_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = build_generator(2).unwrap();
        for _ in 0..5 {
            let rho = random_full_rank(4, &mut rng);
            let l = sld(&rho, &g, DEFAULT_CUTOFF).unwrap();
            let lhs = (rho.matrix() * l.matrix() + l.matrix() * rho.matrix()).scale(0.5);
            assert!(frobenius_distance(&lhs, &drho(&rho, &g).unwrap()) < 1e-9);
            let via_sld = (rho.matrix() * l.matrix() * l.matrix()).trace().re;
            let f = qfi_spectral(&rho, &g, DEFAULT_CUTOFF).unwrap().value();
            assert!((via_sld - f).abs() < 1e-8);
        }
    }

    #[test]
    fn qfi_is_invariant_along_the_encoding() {
        let inst = build_instance(&NoiseConfig::new(3, 0.12, 0.03)).unwrap();
        let u = expm_unitary(&inst.generator, 0.3);
        let rotated = DensityMatrix::new(&u * inst.rho.matrix() * u.adjoint()).unwrap();
        let f0 = qfi_spectral(&inst.rho, &inst.generator, DEFAULT_CUTOFF).unwrap().value();
        let f1 = qfi_spectral(&rotated, &inst.generator, DEFAULT_CUTOFF).unwrap().value();
        assert!((f0 - f1).abs() < 1e-8);
    }

    #[test]
    fn clamps_tiny_negatives_only() {
        assert_eq!(QfiValue::new(-5e-10).unwrap().value(), 0.0);
        assert!(QfiValue::new(-1e-6).is_err());
        assert!(QfiValue::new(f64::NAN).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = z_sum(2);
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(drho(&rho, &g), Err(Error::DimensionMismatch(_))));
    }
}
