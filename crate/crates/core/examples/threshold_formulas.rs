//! Closed-form thresholds, the patience model and Wilson intervals.

use aks_qfi::stopping::{error_envelope, k_min_formula, m_min_formula, patience_model, wilson_interval};

fn main() -> aks_qfi::Result<()> {
    println!("K_min(C=2, mu=0.5, eps=0.2)          = {}", k_min_formula(2.0, 0.5, 0.2)?);
    println!("M_min(sigma=0.56, eps=0.2, delta=0.1) = {}", m_min_formula(0.56, 0.2, 0.1, 0.0)?);
    println!("P(2 false reads | p=0.5)              = {}", patience_model(0.5, 2));
    let env = error_envelope(1.0, 0.5, 1.0, 0.0, 3, 599, 0.1)?;
    println!(
        "envelope K=3, M=599: trunc {:.4}, stat {:.4}, certified at eps=0.2: {}",
        env.i_trunc,
        env.i_stat,
        env.certified(0.2)
    );
    for (s, n) in [(0, 50), (12, 20), (34, 50)] {
        let (lo, hi) = wilson_interval(s, n, 0.95)?;
        println!("Wilson 95% for {s}/{n}: [{lo:.3}, {hi:.3}]");
    }
    Ok(())
}
