//! Local-Pauli classical shadows.
//!
//! Each shot draws an independent uniform Pauli basis per qubit, samples a
//! bitstring from the exact outcome distribution of the rotated state and
//! records the inverted snapshot `⊗_j (3 U_j†|b_j⟩⟨b_j|U_j - I)`.
//!
//! Shots are stored compactly as one base-6 category code per shot (digit
//! `2·basis + bit` per qubit, qubit 0 most significant). The RNG for shot `i`
//! is ChaCha8 keyed by the batch seed on stream `i`, so a batch of size `M'`
//! is always the first `M'` shots of any larger batch with the same seed.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, C64, MAX_QUBITS, ONE, ZERO};

/// Above this prefix size the bootstrap draws multinomial category counts
/// instead of listing resampled indices.
pub const MULTINOMIAL_THRESHOLD: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    fn index(self) -> usize {
        match self {
            Basis::X => 0,
            Basis::Y => 1,
            Basis::Z => 2,
        }
    }

    /// Rotation `U` applied before a computational-basis readout.
    fn rotation(self) -> [[C64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Basis::X => [[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(h, 0.0), C64::new(-h, 0.0)]],
            // H·S†
            Basis::Y => [[C64::new(h, 0.0), C64::new(0.0, -h)], [C64::new(h, 0.0), C64::new(0.0, h)]],
            Basis::Z => [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Single-qubit inverted snapshot `3 U†|b⟩⟨b|U - I`, row-major.
    fn local_snapshot(self, bit: u8) -> [C64; 4] {
        let u = self.rotation();
        let b = bit as usize;
        // U†|b⟩ is the conjugated b-th row of U
        let v = [u[b][0].conj(), u[b][1].conj()];
        let mut out = [ZERO; 4];
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { 1.0 } else { 0.0 };
                out[2 * r + c] = v[r] * v[c].conj() * 3.0 - id;
            }
        }
        out
    }
}

/// One decoded shot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub bases: Vec<Basis>,
    pub outcomes: Vec<u8>,
}

impl Snapshot {
    fn from_code(code: u32, n: usize) -> Self {
        let mut bases = Vec::with_capacity(n);
        let mut outcomes = Vec::with_capacity(n);
        for j in 0..n {
            let digit = (code / 6u32.pow((n - 1 - j) as u32)) % 6;
            bases.push(Basis::ALL[(digit / 2) as usize]);
            outcomes.push((digit % 2) as u8);
        }
        Self { bases, outcomes }
    }

    fn code(&self) -> u32 {
        self.bases
            .iter()
            .zip(&self.outcomes)
            .fold(0, |acc, (b, &o)| acc * 6 + (2 * b.index() as u32 + o as u32))
    }

    /// The dense inverted snapshot matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.bases.len();
        weighted_mean(n, &[(self.code(), 1.0)])
    }
}

/// An ordered batch of shots drawn from one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowBatch {
    n_qubits: usize,
    seed: u64,
    codes: Vec<u32>,
}

impl ShadowBatch {
    /// Builds a batch from decoded snapshots, e.g. for synthetic tests.
    pub fn from_snapshots(n_qubits: usize, seed: u64, snapshots: &[Snapshot]) -> Result<Self> {
        check_qubits(n_qubits)?;
        if snapshots.iter().any(|s| s.bases.len() != n_qubits || s.outcomes.len() != n_qubits) {
            return Err(Error::DimensionMismatch("snapshot width differs from n_qubits".into()));
        }
        if snapshots.iter().any(|s| s.outcomes.iter().any(|&b| b > 1)) {
            return Err(Error::Config("snapshot outcomes must be bits".into()));
        }
        Ok(Self {
            n_qubits,
            seed,
            codes: snapshots.iter().map(Snapshot::code).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn snapshot(&self, index: usize) -> Snapshot {
        Snapshot::from_code(self.codes[index], self.n_qubits)
    }

    pub fn snapshots(&self) -> impl Iterator<Item = Snapshot> + '_ {
        (0..self.len()).map(|i| self.snapshot(i))
    }

    /// The first `m` shots as a batch of their own.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        self.check_prefix(m)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            seed: self.seed,
            codes: self.codes[..m].to_vec(),
        })
    }

    fn check_prefix(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::DegenerateInput("empty shadow prefix".into()));
        }
        if m > self.len() {
            return Err(Error::Config(format!(
                "prefix {m} exceeds batch size {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Distinct categories of a prefix with their multiplicities.
    pub fn prefix_categories(&self, m: usize) -> Result<CategoryCounts> {
        self.check_prefix(m)?;
        let mut sorted: Vec<u32> = self.codes[..m].to_vec();
        sorted.sort_unstable();
        let mut codes = Vec::new();
        let mut counts = Vec::new();
        for c in sorted {
            if codes.last() == Some(&c) {
                *counts.last_mut().unwrap() += 1;
            } else {
                codes.push(c);
                counts.push(1u64);
            }
        }
        Ok(CategoryCounts {
            n_qubits: self.n_qubits,
            codes,
            counts,
        })
    }

    fn slots(&self, m: usize, cats: &CategoryCounts) -> Vec<u32> {
        self.codes[..m]
            .iter()
            .map(|c| cats.codes.binary_search(c).expect("code present") as u32)
            .collect()
    }
}

/// Distinct shot categories (sorted codes) and how often each occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryCounts {
    n_qubits: usize,
    pub codes: Vec<u32>,
    pub counts: Vec<u64>,
}

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_c count_c S_c / Σ count` for an arbitrary count vector over the
    /// same categories (a bootstrap replicate, say).
    pub fn mean_with_counts(&self, counts: &[u64]) -> ComplexMatrix {
        let total: u64 = counts.iter().sum();
        let weights: Vec<(u32, f64)> = self
            .codes
            .iter()
            .zip(counts)
            .filter(|(_, &k)| k > 0)
            .map(|(&c, &k)| (c, k as f64 / total as f64))
            .collect();
        weighted_mean(self.n_qubits, &weights)
    }

    pub fn mean(&self) -> ComplexMatrix {
        self.mean_with_counts(&self.counts)
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooLarge { dim: 1 << n.min(63) });
    }
    Ok(())
}

/// Draws shots from a fixed state. Outcome distributions are computed per
/// basis setting on first use and shared by every batch drawn afterwards.
#[derive(Debug)]
pub struct ShadowSampler {
    rho: ComplexMatrix,
    n_qubits: usize,
    cumulative: Vec<OnceLock<Vec<f64>>>,
}

impl ShadowSampler {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let n = rho
            .n_qubits()
            .ok_or_else(|| Error::DimensionMismatch("shadows need a qubit register".into()))?;
        check_qubits(n)?;
        let settings = 3usize.pow(n as u32);
        Ok(Self {
            rho: rho.matrix().clone(),
            n_qubits: n,
            cumulative: (0..settings).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Outcome probabilities `⟨b|UρU†|b⟩` for one basis setting.
    pub fn outcome_distribution(&self, bases: &[Basis]) -> Vec<f64> {
        let mut m = self.rho.clone();
        let n = self.n_qubits;
        let d = m.nrows();
        for (j, basis) in bases.iter().enumerate() {
            if *basis == Basis::Z {
                continue;
            }
            let u = basis.rotation();
            let mask = 1usize << (n - 1 - j);
            // rows: m ← (U_j) m
            for c in 0..d {
                for r0 in (0..d).filter(|r| r & mask == 0) {
                    let r1 = r0 | mask;
                    let (a, b) = (m[(r0, c)], m[(r1, c)]);
                    m[(r0, c)] = u[0][0] * a + u[0][1] * b;
                    m[(r1, c)] = u[1][0] * a + u[1][1] * b;
                }
            }
            // columns: m ← m (U_j)†
            for c0 in (0..d).filter(|c| c & mask == 0) {
                let c1 = c0 | mask;
                for r in 0..d {
                    let (a, b) = (m[(r, c0)], m[(r, c1)]);
                    m[(r, c0)] = a * u[0][0].conj() + b * u[0][1].conj();
                    m[(r, c1)] = a * u[1][0].conj() + b * u[1][1].conj();
                }
            }
        }
        let mut p: Vec<f64> = (0..d).map(|i| m[(i, i)].re.max(0.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        p
    }

    fn cumulative_for(&self, setting: usize, bases: &[Basis]) -> &[f64] {
        self.cumulative[setting].get_or_init(|| {
            let mut acc = 0.0;
            self.outcome_distribution(bases)
                .into_iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect()
        })
    }

    fn draw_code(&self, seed: u64, shot: u64) -> u32 {
        let n = self.n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        let mut bases = Vec::with_capacity(n);
        let mut setting = 0usize;
        for _ in 0..n {
            let b = Basis::ALL[rng.random_range(0..3)];
            setting = setting * 3 + b.index();
            bases.push(b);
        }
        let cdf = self.cumulative_for(setting, &bases);
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        let outcome = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let mut code = 0u32;
        for (j, b) in bases.iter().enumerate() {
            let bit = (outcome >> (n - 1 - j)) & 1;
            code = code * 6 + 2 * b.index() as u32 + bit as u32;
        }
        code
    }

    /// Shots `0..m` for `seed`.
    pub fn draw(&self, m: usize, seed: u64) -> Result<ShadowBatch> {
        if m == 0 {
            return Err(Error::Config("shadow batch size must be at least 1".into()));
        }
        Ok(ShadowBatch {
            n_qubits: self.n_qubits,
            seed,
            codes: (0..m as u64).map(|i| self.draw_code(seed, i)).collect(),
        })
    }
}

pub fn draw_snapshots(rho: &DensityMatrix, m: usize, seed: u64) -> Result<ShadowBatch> {
    ShadowSampler::new(rho)?.draw(m, seed)
}

/// Arithmetic mean of the first `m_prefix` snapshot matrices.
pub fn mean_estimate(batch: &ShadowBatch, m_prefix: usize) -> Result<ComplexMatrix> {
    Ok(batch.prefix_categories(m_prefix)?.mean())
}

/// `b_replicates` index multisets of size `m_prefix`, drawn uniformly with
/// replacement from `0..m_prefix`. Replicate `r` uses stream `r` of `seed`.
pub fn resample_bootstrap(
    batch: &ShadowBatch,
    m_prefix: usize,
    b_replicates: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    batch.check_prefix(m_prefix)?;
    Ok((0..b_replicates)
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            (0..m_prefix).map(|_| rng.random_range(0..m_prefix)).collect()
        })
        .collect())
}

fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// A prefix of a batch prepared for bootstrap resampling.
///
/// Up to [`MULTINOMIAL_THRESHOLD`] shots a replicate resamples indices
/// exactly as [`resample_bootstrap`] does. Larger prefixes draw the category
/// counts from the equivalent multinomial (a chain of binomials), which
/// never lists the resampled indices.
#[derive(Debug, Clone)]
pub struct PrefixSample {
    m: usize,
    cats: CategoryCounts,
    slots: Option<Vec<u32>>,
}

impl PrefixSample {
    pub fn new(batch: &ShadowBatch, m: usize) -> Result<Self> {
        let cats = batch.prefix_categories(m)?;
        let slots = (m <= MULTINOMIAL_THRESHOLD).then(|| batch.slots(m, &cats));
        Ok(Self { m, cats, slots })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn categories(&self) -> &CategoryCounts {
        &self.cats
    }

    pub fn mean(&self) -> ComplexMatrix {
        self.cats.mean()
    }

    /// Category counts of bootstrap replicate `replicate`.
    pub fn replicate_counts(&self, seed: u64, replicate: usize) -> Vec<u64> {
        let mut rng = replicate_rng(seed, replicate);
        let mut out = vec![0u64; self.cats.codes.len()];
        match &self.slots {
            Some(slots) => {
                for _ in 0..self.m {
                    out[slots[rng.random_range(0..self.m)] as usize] += 1;
                }
            }
            None => {
                let mut remaining = self.m as u64;
                let mut mass_left = 1.0;
                let last = self.cats.counts.len() - 1;
                for (i, &k) in self.cats.counts.iter().enumerate() {
                    let p = k as f64 / self.m as f64;
                    if i == last || mass_left <= p {
                        out[i] = remaining;
                        break;
                    }
                    let q = (p / mass_left).clamp(0.0, 1.0);
                    let draw = Binomial::new(remaining, q).expect("valid binomial").sample(&mut rng);
                    out[i] = draw;
                    remaining -= draw;
                    mass_left -= p;
                    if remaining == 0 {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn replicate_mean(&self, seed: u64, replicate: usize) -> ComplexMatrix {
        self.cats.mean_with_counts(&self.replicate_counts(seed, replicate))
    }
}

/// `Σ_c w_c ⊗_j L_{c_j}` for sorted category codes.
///
/// The sum is evaluated over the prefix tree of the codes, so shared leading
/// qubits are combined before the Kronecker products grow.
pub fn weighted_mean(n_qubits: usize, weights: &[(u32, f64)]) -> ComplexMatrix {
    debug_assert!(weights.windows(2).all(|w| w[0].0 <= w[1].0));
    let locals: Vec<[C64; 4]> = (0..6)
        .map(|digit| Basis::ALL[digit / 2].local_snapshot((digit % 2) as u8))
        .collect();
    let powers: Vec<u32> = (0..n_qubits).map(|j| 6u32.pow((n_qubits - 1 - j) as u32)).collect();
    tree_sum(weights, 0, &powers, &locals)
}

fn tree_sum(entries: &[(u32, f64)], level: usize, powers: &[u32], locals: &[[C64; 4]]) -> ComplexMatrix {
    let n = powers.len();
    if level == n {
        let w: f64 = entries.iter().map(|e| e.1).sum();
        return ComplexMatrix::from_element(1, 1, C64::new(w, 0.0));
    }
    let half = 1usize << (n - level - 1);
    let mut out = ComplexMatrix::zeros(2 * half, 2 * half);
    let digit_of = |code: u32| ((code / powers[level]) % 6) as usize;
    let mut start = 0;
    while start < entries.len() {
        let digit = digit_of(entries[start].0);
        let mut end = start + 1;
        while end < entries.len() && digit_of(entries[end].0) == digit {
            end += 1;
        }
        let sub = tree_sum(&entries[start..end], level + 1, powers, locals);
        let l = &locals[digit];
        for a in 0..2 {
            for b in 0..2 {
                let coef = l[2 * a + b];
                let mut block = out.view_mut((a * half, b * half), (half, half));
                block.zip_apply(&sub, |x, s| *x += coef * s);
            }
        }
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, hermitian_deviation, kron, StateVector};
    use rand::SeedableRng;

    fn random_density(dim: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let mut m = &a * a.adjoint();
        let tr = m.trace();
        m /= tr;
        DensityMatrix::new(m).unwrap()
    }

    fn naive_matrix(s: &Snapshot) -> ComplexMatrix {
        s.bases.iter().zip(&s.outcomes).fold(ComplexMatrix::identity(1, 1), |acc, (b, &o)| {
            let l = b.local_snapshot(o);
            kron(&acc, &ComplexMatrix::from_row_slice(2, 2, &l))
        })
    }

    #[test]
    fn z_basis_on_zero_state_is_deterministic() {
        let mut zero = StateVector::zeros(2);
        zero[0] = ONE;
        let rho = DensityMatrix::pure(&zero).unwrap();
        let batch = draw_snapshots(&rho, 300, 9).unwrap();
        let mut z_seen = 0;
        for s in batch.snapshots() {
            if s.bases[0] == Basis::Z {
                z_seen += 1;
                assert_eq!(s.outcomes[0], 0);
                let expected = ComplexMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), ZERO, ZERO, -ONE]);
                assert!(frobenius_distance(&s.matrix(), &expected) < 1e-14);
            }
        }
        assert!(z_seen > 50);
    }

    #[test]
    fn local_snapshots_have_unit_trace_and_are_hermitian() {
        for b in Basis::ALL {
            for bit in 0..2 {
                let m = ComplexMatrix::from_row_slice(2, 2, &b.local_snapshot(bit));
                assert!((m.trace() - ONE).norm() < 1e-14);
                assert!(hermitian_deviation(&m) < 1e-15);
            }
        }
    }

    #[test]
    fn snapshot_invariants_on_drawn_batch() {
        let rho = random_density(8, 1);
        let batch = draw_snapshots(&rho, 64, 3).unwrap();
        for s in batch.snapshots() {
            let m = s.matrix();
            assert!((m.trace() - ONE).norm() < 1e-10);
            assert!(hermitian_deviation(&m) < 1e-12);
            assert!(frobenius_distance(&m, &naive_matrix(&s)) < 1e-12);
        }
    }

    #[test]
    fn nested_prefixes() {
        let rho = random_density(4, 2);
        let sampler = ShadowSampler::new(&rho).unwrap();
        let small = sampler.draw(32, 77).unwrap();
        let large = sampler.draw(64, 77).unwrap();
        assert_eq!(small, large.prefix(32).unwrap());
        let other = ShadowSampler::new(&rho).unwrap().draw(64, 77).unwrap();
        assert_eq!(large, other);
    }

    #[test]
    fn outcome_distributions_match_dense_rotation() {
        let rho = random_density(8, 12);
        let sampler = ShadowSampler::new(&rho).unwrap();
        let bases = [Basis::Y, Basis::Z, Basis::X];
        let u = bases.iter().fold(ComplexMatrix::identity(1, 1), |acc, b| {
            let r = b.rotation();
            kron(&acc, &ComplexMatrix::from_row_slice(2, 2, &[r[0][0], r[0][1], r[1][0], r[1][1]]))
        });
        let rotated = &u * rho.matrix() * u.adjoint();
        let p = sampler.outcome_distribution(&bases);
        for (i, pi) in p.iter().enumerate() {
            assert!((pi - rotated[(i, i)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_mean_matches_naive_average() {
        let rho = random_density(16, 5);
        let batch = draw_snapshots(&rho, 200, 1).unwrap();
        let mut naive = ComplexMatrix::zeros(16, 16);
        for s in batch.snapshots() {
            naive += naive_matrix(&s);
        }
        naive /= C64::new(200.0, 0.0);
        let fast = mean_estimate(&batch, 200).unwrap();
        assert!(frobenius_distance(&naive, &fast) < 1e-12);
    }

    #[test]
    fn single_snapshot_mean_is_the_snapshot() {
        let rho = random_density(4, 6);
        let batch = draw_snapshots(&rho, 10, 4).unwrap();
        let m = mean_estimate(&batch, 1).unwrap();
        assert!(frobenius_distance(&m, &batch.snapshot(0).matrix()) < 1e-14);
    }

    #[test]
    fn mean_has_unit_trace() {
        let rho = random_density(8, 7);
        let batch = draw_snapshots(&rho, 100, 8).unwrap();
        for m in [1, 7, 50, 100] {
            let mean = mean_estimate(&batch, m).unwrap();
            assert!((mean.trace() - ONE).norm() < 1e-9);
        }
        assert!(mean_estimate(&batch, 0).is_err());
        assert!(mean_estimate(&batch, 101).is_err());
    }

    #[test]
    fn mean_is_unbiased() {
        let rho = random_density(4, 10);
        let batch = draw_snapshots(&rho, 100_000, 42).unwrap();
        let err = frobenius_distance(&mean_estimate(&batch, 100_000).unwrap(), rho.matrix());
        assert!(err < 0.05, "error {err}");

        let mixed = DensityMatrix::maximally_mixed(2);
        let batch = draw_snapshots(&mixed, 50_000, 1).unwrap();
        let err = frobenius_distance(&mean_estimate(&batch, 50_000).unwrap(), mixed.matrix());
        assert!(err < 0.05, "error {err}");
    }

    #[test]
    fn bootstrap_multisets() {
        let rho = random_density(4, 11);
        let batch = draw_snapshots(&rho, 40, 0).unwrap();
        let single = resample_bootstrap(&batch, 1, 1, 5).unwrap();
        assert_eq!(single, vec![vec![0]]);
        let reps = resample_bootstrap(&batch, 40, 25, 5).unwrap();
        assert_eq!(reps.len(), 25);
        assert!(reps.iter().all(|r| r.len() == 40 && r.iter().all(|&i| i < 40)));
        assert_eq!(reps, resample_bootstrap(&batch, 40, 25, 5).unwrap());
    }

    #[test]
    fn bootstrap_means_center_on_prefix_mean() {
        let rho = random_density(4, 13);
        let m = 300;
        let batch = draw_snapshots(&rho, m, 2).unwrap();
        let sample = PrefixSample::new(&batch, m).unwrap();
        let target = sample.mean();
        let b = 2000;
        let entry = (0, 1);
        let samples: Vec<f64> = (0..b).map(|r| sample.replicate_mean(99, r)[entry].re).collect();
        let avg = samples.iter().sum::<f64>() / b as f64;
        let var = samples.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (b - 1) as f64;
        let se = (var / b as f64).sqrt();
        assert!((avg - target[entry].re).abs() < 3.0 * se + 1e-12);
    }

    #[test]
    fn index_counts_agree_with_resample_bootstrap() {
        let rho = random_density(4, 14);
        let batch = draw_snapshots(&rho, 64, 3).unwrap();
        let sample = PrefixSample::new(&batch, 64).unwrap();
        let cats = sample.categories();
        let reps = resample_bootstrap(&batch, 64, 3, 21).unwrap();
        for (r, idx) in reps.iter().enumerate() {
            let counts = sample.replicate_counts(21, r);
            let mut expected = vec![0u64; cats.codes.len()];
            for &i in idx {
                let code = batch.codes[i];
                expected[cats.codes.binary_search(&code).unwrap()] += 1;
            }
            assert_eq!(counts, expected);
        }
    }

    #[test]
    fn multinomial_counts_sum_to_prefix() {
        let rho = random_density(4, 15);
        let m = MULTINOMIAL_THRESHOLD + 5_000;
        let batch = draw_snapshots(&rho, m, 3).unwrap();
        let sample = PrefixSample::new(&batch, m).unwrap();
        assert!(sample.slots.is_none());
        let cats = sample.categories();
        let counts = sample.replicate_counts(1, 0);
        assert_eq!(counts.iter().sum::<u64>(), m as u64);
        // replicate frequencies stay close to the empirical ones
        for (k, c) in counts.iter().zip(&cats.counts) {
            let diff = (*k as f64 - *c as f64).abs();
            assert!(diff < 6.0 * (*c as f64).sqrt() + 6.0);
        }
    }

    #[test]
    fn synthetic_batches_roundtrip() {
        let snaps = vec![
            Snapshot { bases: vec![Basis::X, Basis::Z], outcomes: vec![1, 0] },
            Snapshot { bases: vec![Basis::Y, Basis::Y], outcomes: vec![0, 1] },
        ];
        let batch = ShadowBatch::from_snapshots(2, 0, &snaps).unwrap();
        assert_eq!(batch.snapshots().collect::<Vec<_>>(), snaps);
        assert!(ShadowBatch::from_snapshots(3, 0, &snaps).is_err());
    }
}
