//! Stopping policies, threshold calibrators and binomial summaries.
//!
//! The empirical rules only look at an [`EstimateBundle`]: the width-only
//! rule stops as soon as `max{d_K, w_M} ≤ ε`, the component-aware rule asks
//! for eligibility (`K ≥ K_min`, `M ≥ M_min`), a Krylov-side pass (`d_K ≤ ε`
//! or `K = K_max`), a sampling-side pass (`w_M ≤ ε`) and `P` consecutive
//! passing steps. Held-out rules additionally confirm a candidate stop on an
//! independent batch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimator::{BootstrapInterval, EstimateBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StopRule {
    #[serde(rename = "width_only")]
    WidthOnly,
    #[serde(rename = "component_aware")]
    ComponentAware,
    #[serde(rename = "sample_schedule")]
    SampleSchedule,
    #[serde(rename = "seq_heldout_width")]
    SeqHeldoutWidth,
    #[serde(rename = "fixedK_heldout")]
    FixedKHeldout,
    #[serde(rename = "heldout_component_aware")]
    HeldoutComponentAware,
}

impl StopRule {
    pub const ALL: [StopRule; 6] = [
        StopRule::WidthOnly,
        StopRule::ComponentAware,
        StopRule::SampleSchedule,
        StopRule::SeqHeldoutWidth,
        StopRule::FixedKHeldout,
        StopRule::HeldoutComponentAware,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StopRule::WidthOnly => "width_only",
            StopRule::ComponentAware => "component_aware",
            StopRule::SampleSchedule => "sample_schedule",
            StopRule::SeqHeldoutWidth => "seq_heldout_width",
            StopRule::FixedKHeldout => "fixedK_heldout",
            StopRule::HeldoutComponentAware => "heldout_component_aware",
        }
    }

    pub fn is_heldout(self) -> bool {
        matches!(
            self,
            StopRule::SeqHeldoutWidth | StopRule::FixedKHeldout | StopRule::HeldoutComponentAware
        )
    }

    /// Rules that keep `K` pinned and only grow `M`.
    pub fn is_fixed_k(self) -> bool {
        matches!(self, StopRule::SampleSchedule | StopRule::FixedKHeldout)
    }
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StopRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = StopRule::ALL.iter().map(|r| r.name()).collect();
                Error::Config(format!("unknown rule '{s}', expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSpending {
    /// `δ_j = δ / J`.
    #[default]
    Bonferroni,
    /// `δ_j = 6δ / (π² j²)`, summable without a preset attempt cap.
    Summable,
}

impl AlphaSpending {
    pub fn delta_j(self, delta: f64, attempt: usize, j_max: usize) -> f64 {
        match self {
            AlphaSpending::Bonferroni => delta / j_max as f64,
            AlphaSpending::Summable => {
                6.0 * delta / (std::f64::consts::PI.powi(2) * (attempt as f64).powi(2))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopConfig {
    /// Absolute tolerance seen by the decision layer.
    pub epsilon: f64,
    pub delta: f64,
    pub k_min_stop: usize,
    pub m_min_stop: usize,
    pub patience: usize,
    pub k_max: usize,
    pub m_max: usize,
    pub k0: usize,
    pub m0: usize,
    pub rule: StopRule,
    /// Krylov order for the fixed-`K` rules.
    pub fixed_k: Option<usize>,
    /// Maximum number of certificate attempts. Defaults to the number of
    /// sample-count levels left at the first candidate.
    pub j_max: Option<usize>,
    pub alpha_spending: AlphaSpending,
    /// Confirmation batch size. Defaults to the candidate `M`.
    pub m_conf: Option<usize>,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.2,
            delta: 0.1,
            k_min_stop: 4,
            m_min_stop: 128,
            patience: 2,
            k_max: 8,
            m_max: 512,
            k0: 1,
            m0: 16,
            rule: StopRule::ComponentAware,
            fixed_k: None,
            j_max: None,
            alpha_spending: AlphaSpending::Bonferroni,
            m_conf: None,
        }
    }
}

impl StopConfig {
    pub fn with_rule(rule: StopRule) -> Self {
        Self {
            rule,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.k0 == 0 || self.m0 < 2 || self.patience == 0 {
            return bad("k0 and patience must be at least 1, m0 at least 2".into());
        }
        if self.k0 > self.k_max || self.m0 > self.m_max {
            return bad(format!(
                "start ({}, {}) exceeds limits ({}, {})",
                self.k0, self.m0, self.k_max, self.m_max
            ));
        }
        if matches!(self.rule, StopRule::ComponentAware | StopRule::HeldoutComponentAware)
            && (self.k_min_stop > self.k_max || self.m_min_stop > self.m_max)
        {
            return bad("eligibility thresholds exceed the resource limits".into());
        }
        if self.rule == StopRule::FixedKHeldout && self.fixed_k.is_none() {
            return bad("fixedK_heldout needs fixed_k".into());
        }
        if self.fixed_k == Some(0) || self.j_max == Some(0) || self.m_conf.is_some_and(|m| m < 2) {
            return bad("fixed_k and j_max must be positive, m_conf at least 2".into());
        }
        Ok(())
    }

    /// Number of sample-count levels from `m` up to `m_max`, inclusive.
    pub fn levels_from(&self, m: usize) -> usize {
        let mut levels = 1;
        let mut cur = m;
        while cur < self.m_max {
            cur = (cur * 2).min(self.m_max);
            levels += 1;
        }
        levels
    }

    /// `(K_max - K_0) + ⌈log2(M_max / M_0)⌉ + 1`.
    pub fn eval_bound(&self) -> usize {
        (self.k_max - self.k0) + self.levels_from(self.m0)
    }
}

/// Gate status after one component-aware step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateTrace {
    pub eligible_k: bool,
    pub eligible_m: bool,
    pub krylov_gate: bool,
    pub sampling_gate: bool,
    pub patience_count: usize,
}

impl GateTrace {
    pub fn all_pass(&self) -> bool {
        self.eligible_k && self.eligible_m && self.krylov_gate && self.sampling_gate
    }
}

/// Stops when `max{d_K, w_M} ≤ ε`. The `K = 1` sentinel never passes.
pub fn width_only_test(bundle: &EstimateBundle, cfg: &StopConfig) -> bool {
    bundle.d_k.within(cfg.epsilon) && bundle.width <= cfg.epsilon
}

/// Advances the patience counter from `previous_patience`.
pub fn component_aware_test(bundle: &EstimateBundle, cfg: &StopConfig, previous_patience: usize) -> GateTrace {
    let mut trace = GateTrace {
        eligible_k: bundle.k >= cfg.k_min_stop,
        eligible_m: bundle.m >= cfg.m_min_stop,
        krylov_gate: bundle.d_k.within(cfg.epsilon) || bundle.k == cfg.k_max,
        sampling_gate: bundle.width <= cfg.epsilon,
        patience_count: 0,
    };
    if trace.all_pass() {
        trace.patience_count = previous_patience + 1;
    }
    trace
}

pub fn component_aware_success(trace: &GateTrace, cfg: &StopConfig) -> bool {
    trace.patience_count >= cfg.patience
}

/// Fixed-`K` schedule rule, evaluated at the latest level of `history`: the
/// width must pass at two consecutive levels, or once at the terminal level.
pub fn sample_schedule_test(history: &[EstimateBundle], cfg: &StopConfig, terminal: bool) -> bool {
    let Some(last) = history.last() else {
        return false;
    };
    let pass = |b: &EstimateBundle| b.width <= cfg.epsilon;
    if !pass(last) {
        return false;
    }
    terminal || history.len() >= 2 && pass(&history[history.len() - 2])
}

/// Outcome of one held-out confirmation attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateRecord {
    pub r_trunc: f64,
    pub r_stat: f64,
    pub delta_j: f64,
    pub attempt_index: usize,
    pub j_max: usize,
    pub conf_estimate: f64,
    pub conf_m: usize,
    pub passed: bool,
}

/// Combines a truncation radius with the larger half-width of the
/// confirmation interval about the confirmation estimate. Success iff
/// `r_trunc + r_stat ≤ ε`.
pub fn heldout_certificate(
    r_trunc: f64,
    conf_estimate: f64,
    conf_interval: &BootstrapInterval,
    conf_m: usize,
    cfg: &StopConfig,
    attempt: usize,
    j_max: usize,
) -> CertificateRecord {
    let r_stat = conf_interval.half_width_about(conf_estimate);
    CertificateRecord {
        r_trunc,
        r_stat,
        delta_j: cfg.alpha_spending.delta_j(cfg.delta, attempt, j_max),
        attempt_index: attempt,
        j_max,
        conf_estimate,
        conf_m,
        passed: r_trunc + r_stat <= cfg.epsilon,
    }
}

/// `K_min = max{1, ⌈log(2C/ε) / log(1/μ)⌉}`.
pub fn k_min_formula(c_trunc: f64, mu: f64, epsilon: f64) -> Result<usize> {
    if !(c_trunc > 0.0 && epsilon > 0.0 && mu > 0.0) {
        return Err(Error::Config("C, mu and epsilon must be positive".into()));
    }
    if mu >= 1.0 {
        return Err(Error::Diverges(format!(
            "K_min diverges for mu = {mu}; raise the Krylov limit"
        )));
    }
    let ratio = 2.0 * c_trunc / epsilon;
    if ratio <= 1.0 {
        return Ok(1);
    }
    Ok(((ratio.ln() / mu.recip().ln()).ceil() as usize).max(1))
}

/// `M_min = ⌈2σ² log(2/δ) / (ε/2 - β̄)²⌉`, which is `⌈8σ² log(2/δ) / ε²⌉`
/// without bias.
pub fn m_min_formula(sigma_k: f64, epsilon: f64, delta: f64, beta_bar: f64) -> Result<u64> {
    if !(sigma_k > 0.0 && epsilon > 0.0 && delta > 0.0 && delta < 1.0 && beta_bar >= 0.0) {
        return Err(Error::Config("invalid M_min parameters".into()));
    }
    let slack = epsilon / 2.0 - beta_bar;
    if slack <= 0.0 {
        return Err(Error::Diverges(format!(
            "bias bound {beta_bar} is at least epsilon/2; more samples cannot certify"
        )));
    }
    Ok((2.0 * sigma_k * sigma_k * (2.0 / delta).ln() / (slack * slack)).ceil() as u64)
}

/// Probability that `P` consecutive independent steps all read falsely.
pub fn patience_model(p_bad: f64, patience: u32) -> f64 {
    p_bad.powi(patience as i32)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::Config(format!("invalid counts {successes}/{trials}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0, 1), got {level}")));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lower = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((lower, upper))
}

/// Calibrated error radii at `(K, M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEnvelope {
    /// `C μ^K`.
    pub i_trunc: f64,
    /// `β + σ √(2 log(2/δ) / M)`.
    pub i_stat: f64,
}

impl ErrorEnvelope {
    /// Both radii controlled at half the tolerance.
    pub fn certified(&self, epsilon: f64) -> bool {
        self.i_trunc <= epsilon / 2.0 && self.i_stat <= epsilon / 2.0
    }
}

pub fn error_envelope(
    c_trunc: f64,
    mu: f64,
    sigma_k: f64,
    beta: f64,
    k: usize,
    m: usize,
    delta: f64,
) -> Result<ErrorEnvelope> {
    if !(c_trunc > 0.0 && sigma_k > 0.0 && beta >= 0.0 && m > 0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::Config("invalid envelope parameters".into()));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Diverges(format!("mu = {mu} is outside (0, 1)")));
    }
    Ok(ErrorEnvelope {
        i_trunc: c_trunc * mu.powi(k as i32),
        i_stat: beta + sigma_k * (2.0 * (2.0 / delta).ln() / m as f64).sqrt(),
    })
}
