//! Aggregate reliability metrics.
//!
//! For `N` runs with `S` success declarations of which `E` are false stops:
//! `FSR = E/N`, `SR = S/N` and, when `S > 0`, `SP = (S − E)/S`, so that
//! `FSR = SR·(1 − SP)`.

use serde::{Deserialize, Serialize};

use super::grid::RunRecord;
use crate::error::Result;
use crate::estimator::quantile_sorted;
use crate::stopping::{wilson_interval, StopRule};

/// Confidence level of the reported Wilson intervals.
pub const WILSON_LEVEL: f64 = 0.95;

/// Counts and rates for one group of runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub runs: usize,
    pub successes: usize,
    pub false_stops: usize,
    pub fsr: f64,
    pub fsr_lower: f64,
    pub fsr_upper: f64,
    pub sr: f64,
    pub sr_lower: f64,
    pub sr_upper: f64,
    pub sp: Option<f64>,
}

impl Rates {
    pub fn from_counts(runs: usize, successes: usize, false_stops: usize) -> Result<Self> {
        let (fsr_lower, fsr_upper) = wilson_interval(false_stops as u64, runs as u64, WILSON_LEVEL)?;
        let (sr_lower, sr_upper) = wilson_interval(successes as u64, runs as u64, WILSON_LEVEL)?;
        Ok(Self {
            runs,
            successes,
            false_stops,
            fsr: false_stops as f64 / runs as f64,
            fsr_lower,
            fsr_upper,
            sr: successes as f64 / runs as f64,
            sr_lower,
            sr_upper,
            sp: (successes > 0).then(|| (successes - false_stops) as f64 / successes as f64),
        })
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Result<Self> {
        let (mut n, mut s, mut e) = (0, 0, 0);
        for r in records {
            n += 1;
            s += r.is_success() as usize;
            e += r.false_stop as usize;
        }
        Self::from_counts(n, s, e)
    }

    /// `|FSR − SR·(1 − SP)|`, zero up to rounding whenever SP is defined.
    pub fn identity_residual(&self) -> Option<f64> {
        self.sp.map(|sp| (self.fsr - self.sr * (1.0 - sp)).abs())
    }
}

/// One row of `summary.csv`: a `(rule, p_phi)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub rule: StopRule,
    pub n: usize,
    pub p_phi: f64,
    pub epsilon: f64,
    pub runs: usize,
    pub successes: usize,
    pub false_stops: usize,
    pub fsr: f64,
    pub fsr_lower: f64,
    pub fsr_upper: f64,
    pub sr: f64,
    pub sr_lower: f64,
    pub sr_upper: f64,
    pub sp: Option<f64>,
    pub errors: usize,
    pub median_abs_err: f64,
    pub median_rel_err: f64,
    pub median_m_final: f64,
    pub iqr_m_final: f64,
}

fn median_and_iqr(mut v: Vec<f64>) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    v.sort_by(f64::total_cmp);
    (
        quantile_sorted(&v, 0.5),
        quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25),
    )
}

impl GridSummary {
    pub fn rates(&self) -> Rates {
        Rates {
            runs: self.runs,
            successes: self.successes,
            false_stops: self.false_stops,
            fsr: self.fsr,
            fsr_lower: self.fsr_lower,
            fsr_upper: self.fsr_upper,
            sr: self.sr,
            sr_lower: self.sr_lower,
            sr_upper: self.sr_upper,
            sp: self.sp,
        }
    }
}

/// Groups records by `(rule, n, p_phi)` in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<GridSummary>> {
    let mut keys: Vec<(StopRule, usize, f64)> = Vec::new();
    for r in records {
        let key = (r.rule, r.n, r.p_phi);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(rule, n, p_phi)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.rule == rule && r.n == n && r.p_phi == p_phi)
                .collect();
            let ok: Vec<&RunRecord> = group.iter().copied().filter(|r| r.error.is_none()).collect();
            let (median_abs_err, _) = median_and_iqr(ok.iter().map(|r| r.abs_err).collect());
            let (median_rel_err, _) = median_and_iqr(ok.iter().map(|r| r.rel_err).collect());
            let (median_m_final, iqr_m_final) = median_and_iqr(group.iter().map(|r| r.m_final as f64).collect());
            let rates = Rates::from_records(group.iter().copied())?;
            Ok(GridSummary {
                rule,
                n,
                p_phi,
                epsilon: group[0].epsilon,
                runs: rates.runs,
                successes: rates.successes,
                false_stops: rates.false_stops,
                fsr: rates.fsr,
                fsr_lower: rates.fsr_lower,
                fsr_upper: rates.fsr_upper,
                sr: rates.sr,
                sr_lower: rates.sr_lower,
                sr_upper: rates.sr_upper,
                sp: rates.sp,
                errors: group.len() - ok.len(),
                median_abs_err,
                median_rel_err,
                median_m_final,
                iqr_m_final,
            })
        })
        .collect()
}
