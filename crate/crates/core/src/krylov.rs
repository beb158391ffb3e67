//! Krylov subspace projection of the QFI problem.
//!
//! `K_K(G, v0) = span{v0, Gv0, …, G^{K-1}v0}` is built by modified
//! Gram–Schmidt with one reorthogonalization pass. Both ρ and G are
//! compressed onto that space and the spectral QFI is evaluated there,
//! weighted by the trace of ρ the subspace retains.
//!
//! A requested order at or above the Hilbert-space dimension means full
//! resolution: if the Krylov sequence broke down early (symmetric states do
//! this), the columns are completed to an orthonormal basis of the whole
//! space so that `F_{dim}` is the exact QFI.

use crate::error::{Error, Result};
use crate::family::BenchmarkInstance;
use crate::linalg::{
    eigh, project_with_spectrum, ComplexMatrix, DensityMatrix, HermitianOperator, StateVector,
    C64,
};
use crate::qfi::{qfi_from_spectrum, QfiValue, DEFAULT_CUTOFF};

/// Relative residual below which a new Krylov direction counts as dependent.
pub const BREAKDOWN_TOL: f64 = 1e-12;
const MIN_RETAINED_TRACE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct KrylovBasis {
    columns: ComplexMatrix,
    requested_order: usize,
    krylov_rank: usize,
    seed_vector: StateVector,
}

impl KrylovBasis {
    /// Orthonormal columns, `dim × effective_rank`.
    pub fn columns(&self) -> &ComplexMatrix {
        &self.columns
    }

    pub fn requested_order(&self) -> usize {
        self.requested_order
    }

    pub fn effective_rank(&self) -> usize {
        self.columns.ncols()
    }

    /// Rank reached by the Krylov sequence itself, before any completion.
    pub fn krylov_rank(&self) -> usize {
        self.krylov_rank
    }

    pub fn seed_vector(&self) -> &StateVector {
        &self.seed_vector
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// The basis of order `k ≤ requested_order` built from the same seed.
    /// Bases are nested, so this is a column prefix.
    pub fn truncate(&self, k: usize) -> KrylovBasis {
        assert!(k >= 1 && k <= self.requested_order, "order {k} out of range");
        let rank = if k >= self.dim() {
            self.columns.ncols()
        } else {
            k.min(self.krylov_rank)
        };
        KrylovBasis {
            columns: self.columns.columns(0, rank).into_owned(),
            requested_order: k,
            krylov_rank: self.krylov_rank.min(k),
            seed_vector: self.seed_vector.clone(),
        }
    }
}

/// Eigenvector of the largest eigenvalue, with its first non-negligible
/// entry made real and positive.
pub fn dominant_eigvec_seed(rho: &DensityMatrix) -> StateVector {
    dominant_eigvec(rho.matrix())
}

pub(crate) fn dominant_eigvec(m: &ComplexMatrix) -> StateVector {
    let spec = eigh(m);
    let last = spec.eigenvalues.len() - 1;
    let v: StateVector = spec.eigenvectors.column(last).into_owned();
    fix_phase(v)
}

fn fix_phase(v: StateVector) -> StateVector {
    let scale = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    match v.iter().find(|z| z.norm() > 1e-8 * scale) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v * phase
        }
        None => v,
    }
}

pub fn build_basis(g: &HermitianOperator, v0: &StateVector, k: usize) -> Result<KrylovBasis> {
    if k == 0 {
        return Err(Error::Config("Krylov order must be at least 1".into()));
    }
    if v0.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "seed has length {}, generator dimension {}",
            v0.len(),
            g.dim()
        )));
    }
    let norm = v0.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let dim = g.dim();
    let tol = BREAKDOWN_TOL * g.spectral_norm().max(f64::MIN_POSITIVE);
    let mut vecs: Vec<StateVector> = Vec::with_capacity(k.min(dim));
    for step in 0..k.min(dim) {
        let mut w = match vecs.last() {
            None => v0.clone(),
            Some(prev) => g.matrix() * prev,
        };
        orthogonalize(&mut w, &vecs);
        let r = w.norm();
        if r < tol {
            break;
        }
        vecs.push(w.unscale(r));
        debug_assert!(vecs.len() == step + 1);
    }
    let krylov_rank = vecs.len();
    if k >= dim {
        complete_basis(&mut vecs, dim);
    }
    Ok(KrylovBasis {
        columns: ComplexMatrix::from_columns(&vecs),
        requested_order: k,
        krylov_rank,
        seed_vector: v0.clone(),
    })
}

/// Modified Gram–Schmidt, applied twice.
fn orthogonalize(w: &mut StateVector, basis: &[StateVector]) {
    for _ in 0..2 {
        for u in basis {
            let c = u.dotc(w);
            w.axpy(-c, u, C64::new(1.0, 0.0));
        }
    }
}

fn complete_basis(vecs: &mut Vec<StateVector>, dim: usize) {
    for i in 0..dim {
        if vecs.len() == dim {
            break;
        }
        let mut e = StateVector::zeros(dim);
        e[i] = C64::new(1.0, 0.0);
        orthogonalize(&mut e, vecs);
        let r = e.norm();
        if r > 1e-8 {
            vecs.push(e.unscale(r));
        }
    }
}

/// ρ and G compressed onto a Krylov subspace.
#[derive(Debug, Clone)]
pub struct ProjectedPair {
    pub rho_k: DensityMatrix,
    pub g_k: HermitianOperator,
    /// `Tr(V†ρV)` before normalization.
    pub retained_trace: f64,
}

pub fn project_pair(
    basis: &KrylovBasis,
    rho_like: &ComplexMatrix,
    g: &HermitianOperator,
) -> Result<ProjectedPair> {
    Ok(project_and_score(basis, rho_like, g)?.0)
}

/// Projects and evaluates the weighted subspace QFI in one pass.
fn project_and_score(
    basis: &KrylovBasis,
    rho_like: &ComplexMatrix,
    g: &HermitianOperator,
) -> Result<(ProjectedPair, f64)> {
    if rho_like.nrows() != basis.dim() || g.dim() != basis.dim() {
        return Err(Error::DimensionMismatch("basis, state and generator differ".into()));
    }
    let v = basis.columns();
    let raw = v.adjoint() * rho_like * v;
    let retained_trace = raw.trace().re;
    if retained_trace <= MIN_RETAINED_TRACE {
        return Err(Error::DegenerateInput(format!(
            "subspace retains trace {retained_trace:e}"
        )));
    }
    let (rho_k, spec) = project_with_spectrum(&raw)?;
    let g_k = HermitianOperator::from_hermitized(&(v.adjoint() * g.matrix() * v))?;
    let f = qfi_from_spectrum(&spec, g_k.matrix(), DEFAULT_CUTOFF);
    Ok((
        ProjectedPair {
            rho_k,
            g_k,
            retained_trace,
        },
        retained_trace * f,
    ))
}

/// Retained-trace weighted QFI of `rho_input` on a given basis.
pub fn phi_on_basis(
    basis: &KrylovBasis,
    rho_input: &ComplexMatrix,
    g: &HermitianOperator,
) -> Result<QfiValue> {
    QfiValue::new(project_and_score(basis, rho_input, g)?.1)
}

/// `Φ_K`: builds the order-`k` basis seeded by the dominant eigenvector of
/// `seed_source` and evaluates the projected QFI of `rho_input`.
pub fn phi_k(
    rho_input: &ComplexMatrix,
    g: &HermitianOperator,
    k: usize,
    seed_source: &DensityMatrix,
) -> Result<QfiValue> {
    let v0 = dominant_eigvec_seed(seed_source);
    let basis = build_basis(g, &v0, k)?;
    phi_on_basis(&basis, rho_input, g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationRow {
    pub k: usize,
    pub f_k: f64,
    pub b_abs: f64,
}

/// Population values `F_K` on the exact state and the truncation bias
/// `|F_K - F_ref|` for `K = 1..=k_max`.
pub fn population_table(instance: &BenchmarkInstance, k_max: usize) -> Result<Vec<PopulationRow>> {
    let v0 = dominant_eigvec_seed(&instance.rho);
    let full = build_basis(&instance.generator, &v0, k_max)?;
    (1..=k_max)
        .map(|k| {
            let f_k = phi_on_basis(&full.truncate(k), instance.rho.matrix(), &instance.generator)?
                .value();
            Ok(PopulationRow {
                k,
                f_k,
                b_abs: (f_k - instance.f_ref).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_generator, build_instance, NoiseConfig};
    use crate::linalg::{frobenius_distance, pauli_on, Pauli};
    use crate::qfi::qfi_spectral;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(dim: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = StateVector::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let n = v.norm();
        v.unscale(n)
    }

    fn diag_density(p: &[f64]) -> DensityMatrix {
        let d = StateVector::from_iterator(p.len(), p.iter().map(|&x| C64::new(x, 0.0)));
        DensityMatrix::new(ComplexMatrix::from_diagonal(&d)).unwrap()
    }

    fn orthonormality_error(b: &KrylovBasis) -> f64 {
        let v = b.columns();
        frobenius_distance(&(v.adjoint() * v), &ComplexMatrix::identity(v.ncols(), v.ncols()))
    }

    #[test]
    fn seed_vectors_of_simple_states() {
        let v = dominant_eigvec_seed(&diag_density(&[1.0, 0.0]));
        assert!((v[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let v = dominant_eigvec_seed(&diag_density(&[0.2, 0.8]));
        assert!((v[1] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(v[0].norm() < 1e-12);
    }

    #[test]
    fn seed_vector_of_benchmark_state() {
        let inst = build_instance(&NoiseConfig::new(4, 0.0, 0.03)).unwrap();
        let v = dominant_eigvec_seed(&inst.rho);
        let top = *eigh(inst.rho.matrix()).eigenvalues.last().unwrap();
        let rayleigh = v.dotc(&(inst.rho.matrix() * &v)).re;
        assert!((rayleigh - top).abs() < 1e-12);
        let first = v.iter().find(|z| z.norm() > 1e-8).unwrap();
        assert!(first.im.abs() < 1e-14 && first.re > 0.0);
    }

    #[test]
    fn order_one_is_the_seed() {
        let g = build_generator(3).unwrap();
        let v0 = random_unit(8, 1);
        let b = build_basis(&g, &v0, 1).unwrap();
        assert_eq!(b.effective_rank(), 1);
        assert!((b.columns().column(0) - &v0).norm() < 1e-14);
    }

    #[test]
    fn eigenvector_seed_breaks_down_immediately() {
        let g = HermitianOperator::new(pauli_on(Pauli::Z, 0, 3)).unwrap();
        let mut v0 = StateVector::zeros(8);
        v0[0] = C64::new(1.0, 0.0);
        let b = build_basis(&g, &v0, 5).unwrap();
        assert_eq!(b.effective_rank(), 1);
        assert_eq!(b.krylov_rank(), 1);
    }

    #[test]
    fn generic_seed_spans_full_space() {
        let g = build_generator(2).unwrap();
        let b = build_basis(&g, &random_unit(4, 3), 4).unwrap();
        assert_eq!(b.krylov_rank(), 4);
        assert_eq!(b.effective_rank(), 4);
        assert!(orthonormality_error(&b) < 1e-10);
    }

    #[test]
    fn symmetric_seed_is_completed_at_full_order() {
        let inst = build_instance(&NoiseConfig::new(4, 0.12, 0.03)).unwrap();
        let v0 = dominant_eigvec_seed(&inst.rho);
        let b = build_basis(&inst.generator, &v0, 16).unwrap();
        assert!(b.krylov_rank() < 16);
        assert_eq!(b.effective_rank(), 16);
        assert!(orthonormality_error(&b) < 1e-10);
        for k in 1..16 {
            assert!(orthonormality_error(&b.truncate(k)) < 1e-10);
        }
    }

    #[test]
    fn truncation_matches_direct_construction() {
        let inst = build_instance(&NoiseConfig::new(3, 0.06, 0.03)).unwrap();
        let v0 = dominant_eigvec_seed(&inst.rho);
        let full = build_basis(&inst.generator, &v0, 8).unwrap();
        for k in 1..8 {
            let direct = build_basis(&inst.generator, &v0, k).unwrap();
            let cut = full.truncate(k);
            assert_eq!(direct.effective_rank(), cut.effective_rank());
            assert!(frobenius_distance(direct.columns(), cut.columns()) < 1e-12);
        }
    }

    #[test]
    fn full_space_projection_is_identity() {
        let inst = build_instance(&NoiseConfig::new(2, 0.18, 0.03)).unwrap();
        let b = build_basis(&inst.generator, &random_unit(4, 5), 4).unwrap();
        let pair = project_pair(&b, inst.rho.matrix(), &inst.generator).unwrap();
        assert!((pair.retained_trace - 1.0).abs() < 1e-12);
        let v = b.columns();
        let back = v * pair.rho_k.matrix() * v.adjoint();
        assert!(frobenius_distance(&back, inst.rho.matrix()) < 1e-10);
    }

    #[test]
    fn order_one_projection_keeps_top_eigenvalue() {
        let inst = build_instance(&NoiseConfig::new(3, 0.12, 0.03)).unwrap();
        let v0 = dominant_eigvec_seed(&inst.rho);
        let b = build_basis(&inst.generator, &v0, 1).unwrap();
        let pair = project_pair(&b, inst.rho.matrix(), &inst.generator).unwrap();
        let top = *eigh(inst.rho.matrix()).eigenvalues.last().unwrap();
        assert!((pair.retained_trace - top).abs() < 1e-12);
        assert!((pair.rho_k.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        let f = phi_k(inst.rho.matrix(), &inst.generator, 1, &inst.rho).unwrap();
        assert_eq!(f.value(), 0.0);
    }

    #[test]
    fn projected_state_has_unit_trace() {
        let inst = build_instance(&NoiseConfig::new(3, 0.24, 0.03)).unwrap();
        for (seed, k) in [(1, 2), (2, 4), (3, 6)] {
            let b = build_basis(&inst.generator, &random_unit(8, seed), k).unwrap();
            let pair = project_pair(&b, inst.rho.matrix(), &inst.generator).unwrap();
            assert!((pair.rho_k.matrix().trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn full_order_reproduces_exact_qfi() {
        for n in 2..=4 {
            for p in [0.0, 0.06, 0.12, 0.18, 0.24] {
                let inst = build_instance(&NoiseConfig::new(n, p, 0.03)).unwrap();
                let f = phi_k(inst.rho.matrix(), &inst.generator, 1 << n, &inst.rho).unwrap();
                let exact = qfi_spectral(&inst.rho, &inst.generator, DEFAULT_CUTOFF).unwrap();
                assert!((f.value() - exact.value()).abs() < 1e-8, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn retained_trace_is_monotone() {
        let inst = build_instance(&NoiseConfig::new(4, 0.12, 0.03)).unwrap();
        let v0 = dominant_eigvec_seed(&inst.rho);
        let full = build_basis(&inst.generator, &v0, 16).unwrap();
        let traces: Vec<f64> = (1..=16)
            .map(|k| {
                project_pair(&full.truncate(k), inst.rho.matrix(), &inst.generator)
                    .unwrap()
                    .retained_trace
            })
            .collect();
        assert!(traces.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{traces:?}");
    }

    #[test]
    fn population_table_endpoints() {
        let inst = build_instance(&NoiseConfig::new(3, 0.12, 0.03)).unwrap();
        let rows = population_table(&inst, 8).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].f_k, 0.0);
        assert!((rows[0].b_abs - inst.f_ref).abs() < 1e-15);
        assert!(rows[7].b_abs < 1e-8);
    }

    #[test]
    fn k12_truncation_errors_span_reported_range() {
        let rel = |p: f64| {
            let inst = build_instance(&NoiseConfig::new(4, p, 0.03)).unwrap();
            let row = population_table(&inst, 12).unwrap()[11];
            row.b_abs / inst.f_ref
        };
        let lo = rel(0.03);
        let hi = rel(0.24);
        assert!((lo - 0.0224).abs() < 5e-4, "{lo}");
        assert!((hi - 0.1680).abs() < 5e-4, "{hi}");
    }

    #[test]
    fn rejects_zero_order_and_bad_seed() {
        let g = build_generator(2).unwrap();
        assert!(build_basis(&g, &random_unit(4, 1), 0).is_err());
        assert!(build_basis(&g, &random_unit(8, 1), 2).is_err());
        let unnormalized = random_unit(4, 1).scale(2.0);
        assert!(build_basis(&g, &unnormalized, 2).is_err());
    }
}
