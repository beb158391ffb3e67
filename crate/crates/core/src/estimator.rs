//! Plug-in QFI estimates from a shadow batch.
//!
//! For a prefix of `M` shots the shadow mean `ρ̂_M` is projected onto the
//! density cone in the full space, compressed onto the order-`K` Krylov
//! space, projected onto the cone again there and scored with the spectral
//! QFI weighted by the retained trace. The sampling side is summarized by an
//! equal-tailed percentile bootstrap, the truncation side by the change
//! between consecutive orders on the same prefix.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::BenchmarkInstance;
use crate::krylov::{build_basis, dominant_eigvec, phi_on_basis, KrylovBasis};
use crate::linalg::{project_to_density_cone, DensityMatrix, HermitianOperator, StateVector};
use crate::shadow::{PrefixSample, ShadowBatch};

/// Where the Krylov seed vector comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStrategy {
    /// Dominant eigenvector of the exact noisy state, fixed for the whole run.
    #[default]
    ExactState,
    /// Dominant eigenvector of each cone-projected shadow estimate.
    ShadowEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 200,
            level: 0.90,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 50 {
            return Err(Error::Config(format!(
                "bootstrap needs at least 50 replicates, got {}",
                self.replicates
            )));
        }
        if !(self.level > 0.5 && self.level < 1.0) {
            return Err(Error::Config(format!(
                "bootstrap level must lie in (0.5, 1), got {}",
                self.level
            )));
        }
        Ok(())
    }
}

/// Inter-order change `d_K`. At `K = 1` there is no previous order and the
/// value is the forced sentinel, which exceeds every tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stability {
    Forced,
    Finite(f64),
}

impl Stability {
    /// Numeric value, `+∞` for the sentinel.
    pub fn value(self) -> f64 {
        match self {
            Stability::Forced => f64::INFINITY,
            Stability::Finite(d) => d,
        }
    }

    pub fn is_forced(self) -> bool {
        matches!(self, Stability::Forced)
    }

    pub fn within(self, eps: f64) -> bool {
        match self {
            Stability::Forced => false,
            Stability::Finite(d) => d <= eps,
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stability::Forced => f.write_str("inf"),
            Stability::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl std::str::FromStr for Stability {
    type Err = std::num::ParseFloatError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "inf" {
            Ok(Stability::Forced)
        } else {
            s.parse().map(Stability::Finite)
        }
    }
}

impl Serialize for Stability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Stability::Forced => s.serialize_str("inf"),
            Stability::Finite(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for Stability {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Stability;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Stability, E> {
                Ok(if v == f64::INFINITY { Stability::Forced } else { Stability::Finite(v) })
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Stability, E> {
                Ok(Stability::Finite(v as f64))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Stability, E> {
                Ok(Stability::Finite(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Stability, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapInterval {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub degenerate: usize,
}

impl BootstrapInterval {
    /// Larger distance from `center` to either endpoint.
    pub fn half_width_about(&self, center: f64) -> f64 {
        (center - self.lower).abs().max((self.upper - center).abs())
    }
}

/// Everything the controller looks at for one `(K, M)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateBundle {
    pub f_hat: f64,
    pub k: usize,
    pub m: usize,
    pub boot_lower: f64,
    pub boot_upper: f64,
    pub width: f64,
    pub d_k: Stability,
    pub boot_level: f64,
    pub degenerate_replicates: usize,
}

impl EstimateBundle {
    /// `max{d_K, w_M}`.
    pub fn severity(&self) -> f64 {
        self.d_k.value().max(self.width)
    }
}

#[derive(Debug, Clone)]
struct ConeState {
    rho: DensityMatrix,
    seed: Option<StateVector>,
}

/// A prefix with its cone-projected point state and, optionally, the
/// cone-projected bootstrap replicates. None of this depends on `K`, so one
/// ensemble serves every order evaluated at the same `M`.
#[derive(Debug, Clone)]
pub struct PrefixEnsemble {
    m: usize,
    level: f64,
    point: ConeState,
    replicates: Vec<Option<ConeState>>,
}

impl PrefixEnsemble {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn replicates(&self) -> usize {
        self.replicates.len()
    }
}

/// Estimator for one generator and seed strategy. Cheap to share across
/// threads.
#[derive(Debug, Clone)]
pub struct PlugInEstimator {
    generator: HermitianOperator,
    strategy: SeedStrategy,
    exact_basis: Option<KrylovBasis>,
}

impl PlugInEstimator {
    pub fn new(instance: &BenchmarkInstance, strategy: SeedStrategy) -> Result<Self> {
        match strategy {
            SeedStrategy::ExactState => Self::seeded_by(&instance.generator, &instance.rho),
            SeedStrategy::ShadowEstimate => Ok(Self::shadow_seeded(&instance.generator)),
        }
    }

    /// Fixed seed from the dominant eigenvector of `seed_state`.
    pub fn seeded_by(generator: &HermitianOperator, seed_state: &DensityMatrix) -> Result<Self> {
        let v0 = dominant_eigvec(seed_state.matrix());
        let basis = build_basis(generator, &v0, generator.dim())?;
        Ok(Self {
            generator: generator.clone(),
            strategy: SeedStrategy::ExactState,
            exact_basis: Some(basis),
        })
    }

    pub fn shadow_seeded(generator: &HermitianOperator) -> Self {
        Self {
            generator: generator.clone(),
            strategy: SeedStrategy::ShadowEstimate,
            exact_basis: None,
        }
    }

    pub fn strategy(&self) -> SeedStrategy {
        self.strategy
    }

    pub fn generator(&self) -> &HermitianOperator {
        &self.generator
    }

    fn cone_state(&self, mean: &crate::linalg::ComplexMatrix) -> Result<ConeState> {
        let rho = project_to_density_cone(mean)?;
        let seed = match self.strategy {
            SeedStrategy::ExactState => None,
            SeedStrategy::ShadowEstimate => Some(dominant_eigvec(rho.matrix())),
        };
        Ok(ConeState { rho, seed })
    }

    fn score(&self, state: &ConeState, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Config("Krylov order must be at least 1".into()));
        }
        let dim = self.generator.dim();
        let basis = match (&self.exact_basis, &state.seed) {
            (Some(full), _) => full.truncate(k.min(dim)),
            (None, Some(v0)) => build_basis(&self.generator, v0, k)?,
            (None, None) => unreachable!("shadow-seeded states carry their seed"),
        };
        Ok(phi_on_basis(&basis, state.rho.matrix(), &self.generator)?.value())
    }

    fn check_batch(&self, batch: &ShadowBatch) -> Result<()> {
        if batch.dim() != self.generator.dim() {
            return Err(Error::DimensionMismatch(format!(
                "batch dimension {} differs from generator dimension {}",
                batch.dim(),
                self.generator.dim()
            )));
        }
        Ok(())
    }

    /// Point state only, no replicates.
    pub fn prepare_point(&self, batch: &ShadowBatch, m: usize) -> Result<PrefixEnsemble> {
        self.check_batch(batch)?;
        let sample = PrefixSample::new(batch, m)?;
        Ok(PrefixEnsemble {
            m,
            level: f64::NAN,
            point: self.cone_state(&sample.mean())?,
            replicates: Vec::new(),
        })
    }

    /// Point state plus `cfg.replicates` bootstrap replicates, drawn on
    /// streams of `cfg.seed`.
    pub fn prepare(&self, batch: &ShadowBatch, m: usize, cfg: &BootstrapConfig) -> Result<PrefixEnsemble> {
        cfg.validate()?;
        self.check_batch(batch)?;
        if m < 2 {
            return Err(Error::Config("bootstrap needs a prefix of at least 2 shots".into()));
        }
        let sample = PrefixSample::new(batch, m)?;
        let point = self.cone_state(&sample.mean())?;
        let replicates = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| self.cone_state(&sample.replicate_mean(cfg.seed, r)).ok())
            .collect();
        Ok(PrefixEnsemble {
            m,
            level: cfg.level,
            point,
            replicates,
        })
    }

    pub fn point(&self, ens: &PrefixEnsemble, k: usize) -> Result<f64> {
        self.score(&ens.point, k)
    }

    /// Percentile interval at the ensemble's level. Replicates whose
    /// projection fails are replaced by the point estimate and counted.
    pub fn interval(&self, ens: &PrefixEnsemble, k: usize) -> Result<BootstrapInterval> {
        if ens.replicates.is_empty() {
            return Err(Error::Config("ensemble was prepared without replicates".into()));
        }
        let point = self.point(ens, k)?;
        let scored: Vec<Option<f64>> = ens
            .replicates
            .par_iter()
            .map(|r| r.as_ref().and_then(|s| self.score(s, k).ok()))
            .collect();
        let degenerate = scored.iter().filter(|v| v.is_none()).count();
        let mut values: Vec<f64> = scored.into_iter().map(|v| v.unwrap_or(point)).collect();
        values.sort_by(f64::total_cmp);
        let alpha = 1.0 - ens.level;
        let lower = quantile_sorted(&values, alpha / 2.0);
        let upper = quantile_sorted(&values, 1.0 - alpha / 2.0);
        Ok(BootstrapInterval {
            lower,
            upper,
            width: (upper - lower).max(0.0),
            degenerate,
        })
    }

    /// Bundle at order `k` on a prepared ensemble. `previous` may carry the
    /// already computed point estimate at `k - 1` on the same prefix.
    pub fn bundle_from(&self, ens: &PrefixEnsemble, k: usize, previous: Option<f64>) -> Result<EstimateBundle> {
        let f_hat = self.point(ens, k)?;
        let d_k = if k == 1 {
            Stability::Forced
        } else {
            let prev = match previous {
                Some(v) => v,
                None => self.point(ens, k - 1)?,
            };
            Stability::Finite((f_hat - prev).abs())
        };
        let iv = self.interval(ens, k)?;
        Ok(EstimateBundle {
            f_hat,
            k,
            m: ens.m,
            boot_lower: iv.lower,
            boot_upper: iv.upper,
            width: iv.width,
            d_k,
            boot_level: ens.level,
            degenerate_replicates: iv.degenerate,
        })
    }

    /// `F̂_{K,M}` on the first `m_prefix` shots.
    pub fn estimate(&self, batch: &ShadowBatch, k: usize, m_prefix: usize) -> Result<f64> {
        self.point(&self.prepare_point(batch, m_prefix)?, k)
    }

    pub fn bootstrap_interval(
        &self,
        batch: &ShadowBatch,
        k: usize,
        m_prefix: usize,
        cfg: &BootstrapConfig,
    ) -> Result<BootstrapInterval> {
        self.interval(&self.prepare(batch, m_prefix, cfg)?, k)
    }

    /// `d_K = |F̂_{K,M} - F̂_{K-1,M}|` on one prefix, without resampling.
    pub fn stability(&self, batch: &ShadowBatch, k: usize, m_prefix: usize) -> Result<Stability> {
        if k == 1 {
            return Ok(Stability::Forced);
        }
        let ens = self.prepare_point(batch, m_prefix)?;
        Ok(Stability::Finite((self.point(&ens, k)? - self.point(&ens, k - 1)?).abs()))
    }

    pub fn bundle(
        &self,
        batch: &ShadowBatch,
        k: usize,
        m_prefix: usize,
        cfg: &BootstrapConfig,
    ) -> Result<EstimateBundle> {
        self.bundle_from(&self.prepare(batch, m_prefix, cfg)?, k, None)
    }
}

/// Empirical quantile with linear interpolation between order statistics
/// (position `p·(n-1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
