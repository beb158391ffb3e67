//! The adaptive `(K, M)` controller.
//!
//! Every iteration evaluates the estimator at the current `(K, M)`, applies
//! the active stopping rule and otherwise moves exactly one resource:
//!
//! 1. raise `K` if `d_K > ε` and `K < K_max`,
//! 2. else double `M` if `w_M > ε` and `M < M_max`,
//! 3. else take a final Krylov pass (`K < K_max`),
//! 4. else a final sampling pass (`M < M_max`),
//! 5. else stop at the resource limit.
//!
//! One shadow batch of size `M_max` is drawn per run and every evaluation
//! reads a prefix of it. Because the allocation path does not depend on the
//! stopping rule, runs of different rules on the same seed walk the same
//! trajectory and can share an [`Evaluator`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationTable;
use crate::error::{Error, Result};
use crate::estimator::{BootstrapConfig, EstimateBundle, PlugInEstimator, PrefixEnsemble, SeedStrategy, Stability};
use crate::family::BenchmarkInstance;
use crate::seeding::{derive_seed, tag};
use crate::shadow::{ShadowBatch, ShadowSampler};
use crate::stopping::{
    component_aware_success, component_aware_test, heldout_certificate, sample_schedule_test,
    width_only_test, CertificateRecord, GateTrace, StopConfig, StopRule,
};

/// Confirmation batches use `run_seed ^ CONFIRM_XOR`, which keeps them off
/// every exploration stream.
pub const CONFIRM_XOR: u64 = 0x5eed_c0de_f00d_cafe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    IncK,
    DoubleM,
    FinalKPass,
    FinalMPass,
    StopSuccess,
    StopResourceLimit,
    /// A held-out certificate was rejected; the next resource follows the
    /// usual allocation order.
    CertificateReject,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::IncK => "inc_k",
            Action::DoubleM => "double_m",
            Action::FinalKPass => "final_k_pass",
            Action::FinalMPass => "final_m_pass",
            Action::StopSuccess => "stop_success",
            Action::StopResourceLimit => "stop_resource_limit",
            Action::CertificateReject => "certificate_reject",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    ResourceLimit,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::ResourceLimit => "resource_limit",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub iteration: usize,
    pub k: usize,
    pub m: usize,
    pub bundle: EstimateBundle,
    pub gate_trace: GateTrace,
    pub action: Action,
    pub certificate: Option<CertificateRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopDecision {
    pub outcome: Outcome,
    pub k_final: usize,
    pub m_final: usize,
    /// Reported estimate: the confirmation estimate after a held-out
    /// success, the exploration estimate otherwise.
    pub f_hat: f64,
    pub width: f64,
    pub d_k: Stability,
    pub gate_trace: GateTrace,
    pub certificate: Option<CertificateRecord>,
}

impl fmt::Display for StopDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "outcome={} K={} M={} f_hat={:.6} width={:.6} d_K={} patience={}",
            self.outcome,
            self.k_final,
            self.m_final,
            self.f_hat,
            self.width,
            match self.d_k {
                Stability::Forced => "inf".to_string(),
                Stability::Finite(d) => format!("{d:.6}"),
            },
            self.gate_trace.patience_count
        )?;
        if let Some(c) = &self.certificate {
            write!(
                f,
                " r_trunc={:.6} r_stat={:.6} attempt={}/{}",
                c.r_trunc, c.r_stat, c.attempt_index, c.j_max
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rule: StopRule,
    pub steps: Vec<TrajectoryStep>,
    pub decision: StopDecision,
    pub n_eval: usize,
    pub m_final: usize,
    pub seed: u64,
    pub degenerate_bootstrap_count: usize,
}

/// An instance with its sampler and estimator, built once and shared by
/// every run on it.
#[derive(Debug)]
pub struct PreparedInstance {
    pub instance: BenchmarkInstance,
    pub sampler: ShadowSampler,
    pub estimator: PlugInEstimator,
}

impl PreparedInstance {
    pub fn new(instance: BenchmarkInstance, strategy: SeedStrategy) -> Result<Self> {
        let sampler = ShadowSampler::new(&instance.rho)?;
        let estimator = PlugInEstimator::new(&instance, strategy)?;
        Ok(Self {
            instance,
            sampler,
            estimator,
        })
    }
}

/// Memoized `(K, M)` evaluations over one exploration batch.
#[derive(Debug)]
pub struct Evaluator<'a> {
    prepared: &'a PreparedInstance,
    batch: ShadowBatch,
    seed: u64,
    boot: BootstrapConfig,
    ensemble: Option<PrefixEnsemble>,
    points: HashMap<(usize, usize), f64>,
    bundles: HashMap<(usize, usize), EstimateBundle>,
}

impl<'a> Evaluator<'a> {
    pub fn new(prepared: &'a PreparedInstance, batch_size: usize, seed: u64, boot: BootstrapConfig) -> Result<Self> {
        boot.validate()?;
        Ok(Self {
            prepared,
            batch: prepared.sampler.draw(batch_size, seed)?,
            seed,
            boot,
            ensemble: None,
            points: HashMap::new(),
            bundles: HashMap::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn batch(&self) -> &ShadowBatch {
        &self.batch
    }

    pub fn instance(&self) -> &BenchmarkInstance {
        &self.prepared.instance
    }

    /// Bootstrap seed for prefix `m`; shared by every order at that `m`.
    fn boot_config(&self, m: usize) -> BootstrapConfig {
        BootstrapConfig {
            seed: derive_seed(&[tag::BOOTSTRAP, self.boot.seed, self.seed, m as u64]),
            ..self.boot
        }
    }

    fn ensemble_for(&mut self, m: usize) -> Result<&PrefixEnsemble> {
        if self.ensemble.as_ref().is_none_or(|e| e.m() != m) {
            let cfg = self.boot_config(m);
            self.ensemble = Some(self.prepared.estimator.prepare(&self.batch, m, &cfg)?);
        }
        Ok(self.ensemble.as_ref().expect("just filled"))
    }

    fn point(&mut self, k: usize, m: usize) -> Result<f64> {
        if let Some(&v) = self.points.get(&(k, m)) {
            return Ok(v);
        }
        let est = &self.prepared.estimator;
        let v = est.point(self.ensemble_for(m)?, k)?;
        self.points.insert((k, m), v);
        Ok(v)
    }

    pub fn bundle(&mut self, k: usize, m: usize) -> Result<EstimateBundle> {
        if let Some(b) = self.bundles.get(&(k, m)) {
            return Ok(*b);
        }
        let previous = if k > 1 { Some(self.point(k - 1, m)?) } else { None };
        let est = &self.prepared.estimator;
        let b = est.bundle_from(self.ensemble_for(m)?, k, previous)?;
        self.points.insert((k, m), b.f_hat);
        self.bundles.insert((k, m), b);
        Ok(b)
    }

    /// Held-out confirmation at order `k` on a fresh batch of `conf_m`
    /// shots, with the interval taken at level `1 - δ_j`.
    pub fn certificate(
        &self,
        k: usize,
        conf_m: usize,
        r_trunc: f64,
        cfg: &StopConfig,
        attempt: usize,
        j_max: usize,
    ) -> Result<CertificateRecord> {
        let conf_seed = derive_seed(&[tag::CONFIRM, self.seed ^ CONFIRM_XOR, attempt as u64]);
        let batch = self.prepared.sampler.draw(conf_m, conf_seed)?;
        let delta_j = cfg.alpha_spending.delta_j(cfg.delta, attempt, j_max);
        let boot = BootstrapConfig {
            level: 1.0 - delta_j,
            seed: derive_seed(&[tag::BOOTSTRAP, self.boot.seed, conf_seed, conf_m as u64]),
            ..self.boot
        };
        let est = &self.prepared.estimator;
        let ens = est.prepare(&batch, conf_m, &boot)?;
        let conf = est.point(&ens, k)?;
        let iv = est.interval(&ens, k)?;
        Ok(heldout_certificate(r_trunc, conf, &iv, conf_m, cfg, attempt, j_max))
    }
}

/// Runs the configured rule on a fresh instance with the exact-state seed.
pub fn run(instance: &BenchmarkInstance, stop: &StopConfig, boot: &BootstrapConfig, seed: u64) -> Result<RunResult> {
    let prepared = PreparedInstance::new(instance.clone(), SeedStrategy::ExactState)?;
    run_prepared(&prepared, stop, boot, seed, None)
}

pub fn run_prepared(
    prepared: &PreparedInstance,
    stop: &StopConfig,
    boot: &BootstrapConfig,
    seed: u64,
    calibration: Option<&CalibrationTable>,
) -> Result<RunResult> {
    stop.validate()?;
    let mut ev = Evaluator::new(prepared, stop.m_max, seed, *boot)?;
    run_on(&mut ev, stop, calibration)
}

/// Runs one rule against a (possibly shared) evaluator.
pub fn run_on(ev: &mut Evaluator<'_>, cfg: &StopConfig, calibration: Option<&CalibrationTable>) -> Result<RunResult> {
    cfg.validate()?;
    if cfg.m_max > ev.batch().len() {
        return Err(Error::Config(format!(
            "m_max {} exceeds the exploration batch of {}",
            cfg.m_max,
            ev.batch().len()
        )));
    }
    let dim = ev.instance().dim();
    if cfg.rule == StopRule::SampleSchedule {
        let k = cfg.fixed_k.unwrap_or(cfg.k_max);
        let mut schedule = vec![cfg.m0];
        while *schedule.last().unwrap() < cfg.m_max {
            schedule.push((schedule.last().unwrap() * 2).min(cfg.m_max));
        }
        return run_schedule_on(ev, k, &schedule, cfg);
    }

    let fixed = cfg.rule == StopRule::FixedKHeldout;
    let k_limit = if fixed { cfg.fixed_k.expect("validated") } else { cfg.k_max };
    if fixed && k_limit > dim.max(cfg.k_max) {
        return Err(Error::Config(format!("fixed_k {k_limit} exceeds the Hilbert dimension {dim}")));
    }
    let mut k = if fixed { k_limit } else { cfg.k0 };
    let mut m = cfg.m0;
    let mut patience = 0;
    let mut attempts = 0;
    let mut j_max: Option<usize> = None;
    let mut steps: Vec<TrajectoryStep> = Vec::new();

    loop {
        let bundle = ev.bundle(k, m)?;
        let trace = component_aware_test(&bundle, cfg, patience);
        patience = trace.patience_count;
        let candidate = match cfg.rule {
            StopRule::WidthOnly | StopRule::SeqHeldoutWidth => width_only_test(&bundle, cfg),
            StopRule::ComponentAware | StopRule::HeldoutComponentAware => component_aware_success(&trace, cfg),
            StopRule::FixedKHeldout => bundle.width <= cfg.epsilon,
            StopRule::SampleSchedule => unreachable!(),
        };
        let mut step = TrajectoryStep {
            iteration: steps.len() + 1,
            k,
            m,
            bundle,
            gate_trace: trace,
            action: Action::StopResourceLimit,
            certificate: None,
        };

        let mut rejected = false;
        if candidate && !cfg.rule.is_heldout() {
            step.action = Action::StopSuccess;
            steps.push(step);
            return Ok(finish(ev.seed(), cfg.rule, steps, Outcome::Success, None));
        }
        let budget = *j_max.get_or_insert_with(|| cfg.j_max.unwrap_or_else(|| cfg.levels_from(m)));
        if candidate && attempts < budget {
            attempts += 1;
            let r_trunc = match cfg.rule {
                StopRule::SeqHeldoutWidth => 0.0,
                _ => calibration
                    .ok_or_else(|| Error::Config(format!("rule {} needs a calibration table", cfg.rule)))?
                    .radius(&ev.instance().config, k)?,
            };
            let cert = ev.certificate(k, cfg.m_conf.unwrap_or(m), r_trunc, cfg, attempts, budget)?;
            step.certificate = Some(cert);
            if cert.passed {
                step.action = Action::StopSuccess;
                steps.push(step);
                return Ok(finish(ev.seed(), cfg.rule, steps, Outcome::Success, Some(cert)));
            }
            patience = 0;
            step.gate_trace.patience_count = 0;
            rejected = true;
        }

        let d_open = !bundle.d_k.within(cfg.epsilon);
        let w_open = bundle.width > cfg.epsilon;
        let next = if k >= k_limit && m >= cfg.m_max {
            None
        } else if fixed {
            (m < cfg.m_max).then_some(if w_open { Action::DoubleM } else { Action::FinalMPass })
        } else if d_open && k < k_limit {
            Some(Action::IncK)
        } else if w_open && m < cfg.m_max {
            Some(Action::DoubleM)
        } else if k < k_limit {
            Some(Action::FinalKPass)
        } else if m < cfg.m_max {
            Some(Action::FinalMPass)
        } else {
            None
        };
        match next {
            None => {
                step.action = Action::StopResourceLimit;
                steps.push(step);
                return Ok(finish(ev.seed(), cfg.rule, steps, Outcome::ResourceLimit, None));
            }
            Some(a) => {
                step.action = if rejected { Action::CertificateReject } else { a };
                match a {
                    Action::IncK | Action::FinalKPass => k += 1,
                    _ => m = (m * 2).min(cfg.m_max),
                }
                steps.push(step);
            }
        }
    }
}

/// Fixed-`K` run over an increasing sample-count schedule.
pub fn run_sample_schedule(
    prepared: &PreparedInstance,
    fixed_k: usize,
    schedule: &[usize],
    stop: &StopConfig,
    boot: &BootstrapConfig,
    seed: u64,
) -> Result<RunResult> {
    let last = *schedule
        .last()
        .ok_or_else(|| Error::Config("empty sample schedule".into()))?;
    let mut ev = Evaluator::new(prepared, last, seed, *boot)?;
    run_schedule_on(&mut ev, fixed_k, schedule, stop)
}

pub fn run_schedule_on(ev: &mut Evaluator<'_>, fixed_k: usize, schedule: &[usize], cfg: &StopConfig) -> Result<RunResult> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("sample schedule must be non-empty and strictly increasing".into()));
    }
    if fixed_k == 0 || fixed_k > ev.instance().dim() {
        return Err(Error::Config(format!(
            "fixed K {fixed_k} must lie in 1..={}",
            ev.instance().dim()
        )));
    }
    let mut history = Vec::new();
    let mut steps = Vec::new();
    let mut patience = 0;
    for (i, &m) in schedule.iter().enumerate() {
        let bundle = ev.bundle(fixed_k, m)?;
        let trace = component_aware_test(&bundle, cfg, patience);
        patience = trace.patience_count;
        history.push(bundle);
        let terminal = i + 1 == schedule.len();
        let success = sample_schedule_test(&history, cfg, terminal);
        let action = match (success, terminal) {
            (true, _) => Action::StopSuccess,
            (false, true) => Action::StopResourceLimit,
            (false, false) => Action::DoubleM,
        };
        steps.push(TrajectoryStep {
            iteration: i + 1,
            k: fixed_k,
            m,
            bundle,
            gate_trace: trace,
            action,
            certificate: None,
        });
        if success || terminal {
            let outcome = if success { Outcome::Success } else { Outcome::ResourceLimit };
            return Ok(finish(ev.seed(), StopRule::SampleSchedule, steps, outcome, None));
        }
    }
    unreachable!("the terminal level always returns")
}

fn finish(
    seed: u64,
    rule: StopRule,
    steps: Vec<TrajectoryStep>,
    outcome: Outcome,
    certificate: Option<CertificateRecord>,
) -> RunResult {
    let last = steps.last().expect("at least one evaluation");
    let f_hat = match (&certificate, outcome) {
        (Some(c), Outcome::Success) => c.conf_estimate,
        _ => last.bundle.f_hat,
    };
    let decision = StopDecision {
        outcome,
        k_final: last.k,
        m_final: last.m,
        f_hat,
        width: last.bundle.width,
        d_k: last.bundle.d_k,
        gate_trace: last.gate_trace,
        certificate: certificate.or(last.certificate),
    };
    RunResult {
        rule,
        n_eval: steps.len(),
        m_final: last.m,
        seed,
        degenerate_bootstrap_count: steps.iter().map(|s| s.bundle.degenerate_replicates).sum(),
        steps,
        decision,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_instance, NoiseConfig};

    fn prepared(n: usize, p: f64) -> PreparedInstance {
        PreparedInstance::new(build_instance(&NoiseConfig::new(n, p, 0.03)).unwrap(), SeedStrategy::ExactState).unwrap()
    }

    fn boot() -> BootstrapConfig {
        BootstrapConfig { replicates: 60, ..Default::default() }
    }

    fn check_invariants(r: &RunResult, cfg: &StopConfig) {
        assert!(r.n_eval <= cfg.eval_bound());
        assert_eq!(r.m_final, r.steps.last().unwrap().m);
        for w in r.steps.windows(2) {
            assert!(w[1].k >= w[0].k && w[1].m >= w[0].m);
            let changed = (w[1].k != w[0].k) as u8 + (w[1].m != w[0].m) as u8;
            assert_eq!(changed, 1, "{:?} -> {:?}", (w[0].k, w[0].m), (w[1].k, w[1].m));
            let ratio = w[1].m / w[0].m;
            assert!(ratio == 1 || ratio == 2);
        }
        for s in &r.steps[..r.steps.len() - 1] {
            assert!(!matches!(s.action, Action::StopSuccess | Action::StopResourceLimit));
        }
    }

    #[test]
    fn first_step_forces_a_krylov_increase() {
        let p = prepared(3, 0.12);
        let cfg = StopConfig::with_rule(StopRule::WidthOnly);
        let r = run_prepared(&p, &cfg, &boot(), 1, None).unwrap();
        assert_eq!(r.steps[0].k, 1);
        assert!(r.steps[0].bundle.d_k.is_forced());
        assert_eq!(r.steps[0].action, Action::IncK);
        check_invariants(&r, &cfg);
    }

    #[test]
    fn runs_respect_resource_invariants() {
        let p = prepared(3, 0.06);
        for rule in [StopRule::WidthOnly, StopRule::ComponentAware] {
            for seed in 0..4 {
                let cfg = StopConfig::with_rule(rule);
                let r = run_prepared(&p, &cfg, &boot(), seed, None).unwrap();
                check_invariants(&r, &cfg);
                if r.decision.outcome == Outcome::ResourceLimit {
                    assert_eq!((r.decision.k_final, r.decision.m_final), (8, 512));
                }
            }
        }
    }

    #[test]
    fn shared_evaluator_matches_fresh_runs() {
        let p = prepared(3, 0.12);
        let mut ev = Evaluator::new(&p, 512, 5, boot()).unwrap();
        for rule in [StopRule::ComponentAware, StopRule::WidthOnly] {
            let cfg = StopConfig::with_rule(rule);
            let shared = run_on(&mut ev, &cfg, None).unwrap();
            let fresh = run_prepared(&p, &cfg, &boot(), 5, None).unwrap();
            assert_eq!(shared, fresh);
        }
    }

    #[test]
    fn width_only_trajectory_is_a_prefix_of_component_aware() {
        let p = prepared(3, 0.18);
        for seed in 0..3 {
            let wo = run_prepared(&p, &StopConfig::with_rule(StopRule::WidthOnly), &boot(), seed, None).unwrap();
            let ca = run_prepared(&p, &StopConfig::default(), &boot(), seed, None).unwrap();
            let (short, long) = if wo.steps.len() <= ca.steps.len() { (&wo, &ca) } else { (&ca, &wo) };
            for (a, b) in short.steps.iter().zip(&long.steps) {
                assert_eq!((a.k, a.m), (b.k, b.m));
                assert_eq!(a.bundle, b.bundle);
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let p = prepared(3, 0.24);
        let cfg = StopConfig::default();
        let a = run_prepared(&p, &cfg, &boot(), 11, None).unwrap();
        let b = run_prepared(&p, &cfg, &boot(), 11, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schedule_runs() {
        let p = prepared(2, 0.03);
        let cfg = StopConfig { epsilon: 10.0, ..Default::default() };
        let r = run_sample_schedule(&p, 4, &[64, 128, 256], &cfg, &boot(), 3).unwrap();
        // every width passes, so the second level is the first success
        assert_eq!(r.n_eval, 2);
        assert_eq!(r.decision.outcome, Outcome::Success);

        let strict = StopConfig { epsilon: 1e-9, ..Default::default() };
        let r = run_sample_schedule(&p, 4, &[64, 128, 256], &strict, &boot(), 3).unwrap();
        assert_eq!(r.n_eval, 3);
        assert_eq!(r.decision.outcome, Outcome::ResourceLimit);
        assert!(run_sample_schedule(&p, 4, &[128, 64], &strict, &boot(), 3).is_err());
        assert!(run_sample_schedule(&p, 5, &[64, 128], &strict, &boot(), 3).is_err());
    }

    #[test]
    fn heldout_rules_need_calibration() {
        let p = prepared(2, 0.03);
        let cfg = StopConfig {
            rule: StopRule::HeldoutComponentAware,
            epsilon: 10.0,
            k_max: 4,
            k_min_stop: 2,
            m_min_stop: 16,
            ..Default::default()
        };
        let err = run_prepared(&p, &cfg, &boot(), 1, None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn heldout_success_reports_confirmation_estimate() {
        let p = prepared(2, 0.03);
        let table = CalibrationTable::from_instances([&p.instance], 4).unwrap();
        let cfg = StopConfig {
            rule: StopRule::HeldoutComponentAware,
            epsilon: 1.0,
            k0: 4,
            k_max: 4,
            k_min_stop: 4,
            m_min_stop: 256,
            m_max: 4096,
            patience: 1,
            ..Default::default()
        };
        let r = run_prepared(&p, &cfg, &boot(), 2, Some(&table)).unwrap();
        assert_eq!(r.decision.outcome, Outcome::Success);
        let cert = r.decision.certificate.unwrap();
        assert!(cert.r_trunc <= 1e-8);
        assert_eq!(r.decision.f_hat, cert.conf_estimate);
        assert!(cert.r_trunc + cert.r_stat <= cfg.epsilon);
    }

    #[test]
    fn large_truncation_radius_blocks_success() {
        let p = prepared(2, 0.03);
        let table = CalibrationTable::from_instances([&p.instance], 4).unwrap();
        let cfg = StopConfig {
            rule: StopRule::FixedKHeldout,
            fixed_k: Some(1),
            epsilon: 0.9 * p.instance.f_ref,
            m_max: 1024,
            j_max: Some(10),
            ..Default::default()
        };
        let r = run_prepared(&p, &cfg, &boot(), 4, Some(&table)).unwrap();
        assert_eq!(r.decision.outcome, Outcome::ResourceLimit);
        let attempts: Vec<_> = r.steps.iter().filter_map(|s| s.certificate).collect();
        assert!(!attempts.is_empty());
        assert!(attempts.iter().all(|c| !c.passed && c.r_trunc > cfg.epsilon));
    }

    #[test]
    fn decision_line_is_single_line() {
        let p = prepared(2, 0.12);
        let r = run_prepared(&p, &StopConfig::with_rule(StopRule::WidthOnly), &boot(), 0, None).unwrap();
        let line = r.decision.to_string();
        assert!(!line.contains('\n'));
        assert!(line.starts_with("outcome="));
    }
}
