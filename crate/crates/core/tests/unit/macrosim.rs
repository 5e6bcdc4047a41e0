use macronc_core::hypergraph::single_edge;
use macronc_core::hypergraph::*;
use macronc_core::kernel::*;
use macronc_core::macrosim::*;

#[test]
fn fair_coin_fluctuations_cancel() {
    let s = single_edge(2);
    let p = ProbabilisticModel::new(vec![0.5, 0.5]);
    let r = simulate_edge(&s, &p, 0, &MacroRunConfig::new(101, 500, 3)).unwrap();
    assert!(r.counts.iter().all(|c| c.iter().sum::<u64>() == 101));
    for run in 0..r.counts.len() {
        let f = r.fluctuations(run, &p);
        assert_eq!(f[0], -f[1]);
    }
}

#[test]
fn deterministic_model_has_no_fluctuations() {
    let s = single_edge(2);
    let p = ProbabilisticModel::new(vec![1.0, 0.0]);
    let r = simulate_edge(&s, &p, 0, &MacroRunConfig::new(1000, 200, 9)).unwrap();
    assert!(r.counts.iter().all(|c| c == &vec![1000, 0]));
    assert_eq!(r.covariance, Matrix::zeros(2, 2));
    let g = gaussianity_check(
        &simulate_edge(&s, &p, 0, &MacroRunConfig::new(10, 1000, 1)).unwrap(),
        &p,
    )
    .unwrap();
    assert!(g.outcomes.iter().all(|o| o.skipped));
}

#[test]
fn theory_matches_hand_values() {
    let s = single_edge(3);
    let p = ProbabilisticModel::new(vec![0.2, 0.3, 0.5]);
    let g = theoretical_covariance(&s, &p, 0).unwrap();
    let want = Matrix::from_rows(&[
        [0.16, -0.06, -0.10],
        [-0.06, 0.21, -0.15],
        [-0.10, -0.15, 0.25],
    ]);
    assert!(g.max_abs_diff(&want) < 1e-15);
}

#[test]
fn guards() {
    let s = single_edge(2);
    let p = ProbabilisticModel::new(vec![0.5, 0.5]);
    assert!(simulate_edge(&s, &p, 1, &MacroRunConfig::new(1, 2, 0)).is_err());
    assert!(simulate_edge(&s, &p, 0, &MacroRunConfig::new(0, 2, 0)).is_err());
    let r = simulate_edge(&s, &p, 0, &MacroRunConfig::new(10, 50, 0)).unwrap();
    let g = theoretical_covariance(&s, &p, 0).unwrap();
    assert!(matches!(
        covariance_compare(&r, &g, 5.0),
        Err(MacroError::TooFewRuns { required: 100, .. })
    ));
    assert!(gaussianity_check(&r, &p).is_err());
}

#[test]
fn same_seed_same_report() {
    let s = single_edge(3);
    let p = ProbabilisticModel::new(vec![0.2, 0.3, 0.5]);
    let cfg = MacroRunConfig::new(50, 3000, 42);
    let a = simulate_edge(&s, &p, 0, &cfg).unwrap();
    let b = simulate_edge(&s, &p, 0, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.counts, b.counts);
}
