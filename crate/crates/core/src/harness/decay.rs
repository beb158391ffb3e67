//! Exponential decay fits `value ≈ C·μ^K`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::grid::TrajectoryRow;
use crate::error::{Error, Result};
use crate::estimator::{quantile_sorted, Stability};
use crate::family::BenchmarkInstance;
use crate::krylov::population_table;
use crate::stopping::StopRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub mu_hat: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub points: usize,
}

impl DecayFit {
    /// A non-decaying fit, which the `K_min` calibrator rejects.
    pub fn diverges(&self) -> bool {
        self.mu_hat >= 1.0
    }
}

/// Ordinary least squares of `ln value` on `K`; `μ̂ = exp(slope)` with a
/// 95% Student-t interval on the slope mapped through `exp`.
/// Non-positive values are dropped first.
pub fn fit_decay(series: &[(usize, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(k, v)| (k as f64, v.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!(
            "decay fit needs at least 3 positive values, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("decay fit needs distinct orders".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (ssr / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| Error::DegenerateInput(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(DecayFit {
        mu_hat: slope.exp(),
        ci_lower: (slope - t * se).exp(),
        ci_upper: (slope + t * se).exp(),
        points: n,
    })
}

/// One point of a decay series in `decay_series.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeriesRow {
    pub series: String,
    pub n: usize,
    pub p_phi: f64,
    pub k: usize,
    pub value: f64,
}

/// One fitted series in `decay_fit.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitRow {
    pub series: String,
    pub n: usize,
    pub p_phi: f64,
    pub k_from: usize,
    pub k_to: usize,
    pub points: usize,
    pub mu_hat: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub diverges: bool,
}

impl DecayFitRow {
    fn new(series: &str, n: usize, p_phi: f64, k_from: usize, k_to: usize, fit: DecayFit) -> Self {
        Self {
            series: series.to_string(),
            n,
            p_phi,
            k_from,
            k_to,
            points: fit.points,
            mu_hat: fit.mu_hat,
            ci_lower: fit.ci_lower,
            ci_upper: fit.ci_upper,
            diverges: fit.diverges(),
        }
    }
}

pub const SERIES_TRUNCATION: &str = "b_abs";
pub const SERIES_STABILITY: &str = "d_k_median";

/// Population truncation bias `|B_K|` for `K` in `k_from..=k_to`.
pub fn truncation_series(instance: &BenchmarkInstance, k_from: usize, k_to: usize) -> Result<Vec<DecaySeriesRow>> {
    Ok(population_table(instance, k_to)?
        .into_iter()
        .filter(|r| r.k >= k_from)
        .map(|r| DecaySeriesRow {
            series: SERIES_TRUNCATION.into(),
            n: instance.n_qubits(),
            p_phi: instance.config.p_phi,
            k: r.k,
            value: r.b_abs,
        })
        .collect())
}

/// Per-order medians of the estimated `d_K` over component-aware
/// trajectory steps at one noise level.
pub fn stability_series(rows: &[TrajectoryRow], n: usize, p_phi: f64, k_from: usize, k_to: usize) -> Vec<DecaySeriesRow> {
    (k_from..=k_to)
        .filter_map(|k| {
            let mut v: Vec<f64> = rows
                .iter()
                .filter(|r| r.rule == StopRule::ComponentAware && r.p_phi == p_phi && r.k == k)
                .filter_map(|r| match r.d_k {
                    Stability::Finite(d) => Some(d),
                    Stability::Forced => None,
                })
                .collect();
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            Some(DecaySeriesRow {
                series: SERIES_STABILITY.into(),
                n,
                p_phi,
                k,
                value: quantile_sorted(&v, 0.5),
            })
        })
        .collect()
}

/// Fits each `(series, n, p_phi)` group of rows.
pub fn fit_series(rows: &[DecaySeriesRow], k_from: usize, k_to: usize) -> Result<Vec<DecayFitRow>> {
    let mut keys: Vec<(&str, usize, f64)> = Vec::new();
    for r in rows {
        let key = (r.series.as_str(), r.n, r.p_phi);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(series, n, p_phi)| {
            let pts: Vec<(usize, f64)> = rows
                .iter()
                .filter(|r| r.series == series && r.n == n && r.p_phi == p_phi)
                .map(|r| (r.k, r.value))
                .collect();
            Ok(DecayFitRow::new(series, n, p_phi, k_from, k_to, fit_decay(&pts)?))
        })
        .collect()
}
