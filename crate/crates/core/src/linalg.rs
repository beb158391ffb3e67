//! Dense complex linear algebra on small Hilbert spaces.
//!
//! Everything here works on `nalgebra` dense matrices of `Complex<f64>`.
//! Dimensions are capped at `2^MAX_QUBITS`; the benchmark never goes beyond
//! a few hundred rows, and larger spaces are rejected up front.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Largest supported register.
pub const MAX_QUBITS: usize = 12;
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance on `|Tr ρ - 1|` for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A square matrix that equals its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] and stores the
    /// symmetrized matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        check_finite(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(hermitize(&matrix)))
    }

    /// Symmetrizes `(m + m†)/2` without a tolerance check. Use for matrices
    /// that are Hermitian up to accumulated round-off.
    pub fn from_hermitized(matrix: &ComplexMatrix) -> Result<Self> {
        check_square(matrix)?;
        check_finite(matrix)?;
        Ok(Self(hermitize(matrix)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        let spec = eig_hermitian(self);
        spec.eigenvalues
            .iter()
            .fold(0.0_f64, |acc, l| acc.max(l.abs()))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        check_finite(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let matrix = hermitize(&matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} differs from 1")));
        }
        let min_eig = eigh(&matrix).eigenvalues[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {min_eig} is negative"
            )));
        }
        Ok(Self(matrix))
    }

    /// Wraps a matrix already known to satisfy the invariants (channel
    /// outputs, cone projections).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    /// `|ψ⟩⟨ψ|` for a normalized state.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(psi * psi.adjoint()))
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator(self.0.clone())
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            for v in scaled.column_mut(j).iter_mut() {
                *v *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }

    /// Two eigenvalues closer than `1e-12·max|λ|` are treated as degenerate.
    pub fn is_degenerate(&self, i: usize, j: usize) -> bool {
        let scale = self
            .eigenvalues
            .iter()
            .fold(0.0_f64, |a, l| a.max(l.abs()))
            .max(f64::MIN_POSITIVE);
        (self.eigenvalues[i] - self.eigenvalues[j]).abs() < 1e-12 * scale
    }
}

pub fn eig_hermitian(op: &HermitianOperator) -> SpectralDecomposition {
    eigh(op.matrix())
}

/// Eigendecomposition of a matrix that is Hermitian up to round-off. The
/// input is symmetrized first.
pub(crate) fn eigh(m: &ComplexMatrix) -> SpectralDecomposition {
    let n = m.nrows();
    if n == 1 {
        return SpectralDecomposition {
            eigenvalues: vec![m[(0, 0)].re],
            eigenvectors: ComplexMatrix::identity(1, 1),
        };
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `e^{-iθG}` through the spectral decomposition of `G`.
pub fn expm_unitary(generator: &HermitianOperator, angle: f64) -> ComplexMatrix {
    let spec = eig_hermitian(generator);
    spec.reconstruct_with(|l| C64::from_polar(1.0, -l * angle))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Maps a Hermitian matrix onto the density-matrix cone: symmetrize, clip
/// negative eigenvalues to zero and renormalize the trace.
pub fn project_to_density_cone(m: &ComplexMatrix) -> Result<DensityMatrix> {
    project_with_spectrum(m).map(|(rho, _)| rho)
}

/// Cone projection that also hands back the spectrum of the result, so
/// callers evaluating spectral formulas don't diagonalize twice.
pub(crate) fn project_with_spectrum(
    m: &ComplexMatrix,
) -> Result<(DensityMatrix, SpectralDecomposition)> {
    check_square(m)?;
    check_finite(m)?;
    let mut spec = eigh(m);
    let mut total = 0.0;
    for l in spec.eigenvalues.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
        total += *l;
    }
    if total <= f64::EPSILON {
        return Err(Error::DegenerateInput(
            "no positive eigenvalue left after clipping".into(),
        ));
    }
    for l in spec.eigenvalues.iter_mut() {
        *l /= total;
    }
    let rho = hermitize(&spec.reconstruct());
    Ok((DensityMatrix(rho), spec))
}

pub(crate) fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() > MAX_DIM {
        return Err(Error::TooLarge { dim: m.nrows() });
    }
    Ok(())
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Single-qubit Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2, 2),
            Pauli::X => ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            Pauli::Z => ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }
}

/// `I^{⊗j} ⊗ P ⊗ I^{⊗(n-j-1)}`, qubit 0 being the leftmost (most significant)
/// tensor factor.
pub fn pauli_on(p: Pauli, qubit: usize, n_qubits: usize) -> ComplexMatrix {
    assert!(qubit < n_qubits, "qubit {qubit} out of range for {n_qubits} qubits");
    (0..n_qubits).fold(ComplexMatrix::identity(1, 1), |acc, j| {
        let factor = if j == qubit { p.matrix() } else { Pauli::I.matrix() };
        kron(&acc, &factor)
    })
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}
