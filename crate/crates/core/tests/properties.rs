use aks_qfi::estimator::{EstimateBundle, Stability};
use aks_qfi::family::{build_instance, NoiseConfig};
use aks_qfi::harness::Rates;
use aks_qfi::linalg::{eig_hermitian, project_to_density_cone, ComplexMatrix, C64};
use aks_qfi::shadow::ShadowSampler;
use aks_qfi::stopping::{component_aware_test, m_min_formula, wilson_interval, StopConfig};
use proptest::prelude::*;

fn bundle(k: usize, m: usize, width: f64, d_k: f64) -> EstimateBundle {
    EstimateBundle {
        f_hat: 1.0,
        k,
        m,
        boot_lower: 1.0 - width / 2.0,
        boot_upper: 1.0 + width / 2.0,
        width,
        d_k: Stability::Finite(d_k),
        boot_level: 0.9,
        degenerate_replicates: 0,
    }
}

proptest! {
    #[test]
    fn wilson_contains_the_point_estimate(n in 1u64..500, frac in 0.0f64..=1.0, level in 0.5f64..0.999) {
        let s = ((n as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(s, n, level).unwrap();
        let p = s as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12);
        prop_assert!(p - 1e-12 <= hi && hi <= 1.0);
    }

    #[test]
    fn m_min_grows_as_epsilon_shrinks(sigma in 0.05f64..3.0, eps in 0.01f64..1.0, delta in 0.01f64..0.5, shrink in 0.1f64..0.99) {
        let loose = m_min_formula(sigma, eps, delta, 0.0).unwrap();
        let tight = m_min_formula(sigma, eps * shrink, delta, 0.0).unwrap();
        prop_assert!(tight >= loose);
        let larger_sigma = m_min_formula(sigma * 1.5, eps, delta, 0.0).unwrap();
        prop_assert!(larger_sigma >= loose);
    }

    #[test]
    fn gates_are_monotone_in_epsilon(width in 0.0f64..1.0, d_k in 0.0f64..1.0, eps in 0.01f64..1.0, grow in 1.0f64..3.0) {
        let b = bundle(4, 128, width, d_k);
        let tight = StopConfig { epsilon: eps, ..Default::default() };
        let loose = StopConfig { epsilon: eps * grow, ..Default::default() };
        let t = component_aware_test(&b, &tight, 0);
        let l = component_aware_test(&b, &loose, 0);
        prop_assert!(!t.krylov_gate || l.krylov_gate);
        prop_assert!(!t.sampling_gate || l.sampling_gate);
        prop_assert!(t.patience_count <= l.patience_count);
    }

    #[test]
    fn patience_resets_on_any_failed_gate(prev in 0usize..5, width in 0.0f64..0.5, d_k in 0.0f64..0.5, k in 1usize..8, m in 16usize..512) {
        let cfg = StopConfig::default();
        let t = component_aware_test(&bundle(k, m, width, d_k), &cfg, prev);
        if t.all_pass() {
            prop_assert_eq!(t.patience_count, prev + 1);
        } else {
            prop_assert_eq!(t.patience_count, 0);
        }
    }

    #[test]
    fn cone_projection_is_a_density_matrix(entries in prop::collection::vec(-1.0f64..1.0, 32)) {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| C64::new(entries[4 * i + j], entries[16 + 4 * i + j]));
        let h = (&a + a.adjoint()) * C64::from(0.5) + ComplexMatrix::identity(4, 4) * C64::from(0.3);
        if let Ok(rho) = project_to_density_cone(&h) {
            let m = rho.matrix();
            prop_assert!((m.trace().re - 1.0).abs() <= 1e-10);
            prop_assert!((m - m.adjoint()).norm() <= 1e-10);
            let spec = eig_hermitian(&rho.as_hermitian());
            prop_assert!(spec.eigenvalues.iter().all(|&l| l >= -1e-12));
        }
    }

    #[test]
    fn shadow_prefixes_are_nested(seed in any::<u64>(), short in 1usize..40, extra in 0usize..40) {
        let inst = build_instance(&NoiseConfig::new(2, 0.12, 0.03)).unwrap();
        let sampler = ShadowSampler::new(&inst.rho).unwrap();
        let small = sampler.draw(short, seed).unwrap();
        let large = sampler.draw(short + extra, seed).unwrap();
        for i in 0..short {
            prop_assert_eq!(small.snapshot(i), large.snapshot(i));
        }
        prop_assert_eq!(large.prefix(short).unwrap(), small);
    }

    #[test]
    fn fsr_equals_sr_times_one_minus_sp(runs in 1usize..200, s_frac in 0.0f64..=1.0, e_frac in 0.0f64..=1.0) {
        let successes = ((runs as f64) * s_frac).floor() as usize;
        let false_stops = ((successes as f64) * e_frac).floor() as usize;
        let r = Rates::from_counts(runs, successes, false_stops).unwrap();
        match r.identity_residual() {
            Some(res) => prop_assert!(res <= 1e-12),
            None => prop_assert_eq!(r.fsr, 0.0),
        }
    }
}
