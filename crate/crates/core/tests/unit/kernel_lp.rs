use macronc_core::kernel::*;

fn nonneg(n: usize) -> Vec<Bounds> {
    vec![Bounds::NONNEGATIVE; n]
}

#[test]
fn consistent_mixture_is_feasible() {
    let a = vec![vec![1.0, 1.0], vec![0.5, 0.5]];
    let b = vec![1.0, 0.5];
    match lp_phase1(&a, &b, &nonneg(2), &LpConfig::default()).unwrap() {
        LpOutcome::Feasible { x, .. } => {
            assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
            assert!(x.iter().all(|&v| v >= 0.0));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn empty_system_is_feasible_at_origin() {
    match lp_phase1(&[], &[], &nonneg(3), &LpConfig::default()).unwrap() {
        LpOutcome::Feasible { x, .. } => assert_eq!(x, vec![0.0; 3]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn shape_errors() {
    let a = vec![vec![1.0, 1.0]];
    assert!(lp_phase1(&a, &[1.0, 2.0], &nonneg(2), &LpConfig::default()).is_err());
    assert!(lp_phase1(&a, &[1.0], &nonneg(3), &LpConfig::default()).is_err());
}

#[test]
fn upper_bounds_are_enforced() {
    // x0 + x1 = 3 with x0 ≤ 1, x1 ≤ 1 is infeasible; best residual is 1.
    let a = vec![vec![1.0, 1.0]];
    let bounds = vec![
        Bounds {
            lower: 0.0,
            upper: Some(1.0),
        };
        2
    ];
    match lp_phase1(&a, &[3.0], &bounds, &LpConfig::default()).unwrap() {
        LpOutcome::Infeasible { margin, .. } => assert!((margin - 1.0).abs() < 1e-12),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn shifted_lower_bounds() {
    let a = vec![vec![1.0, 1.0]];
    let bounds = vec![
        Bounds {
            lower: 0.25,
            upper: None,
        };
        2
    ];
    match lp_phase1(&a, &[1.0], &bounds, &LpConfig::default()).unwrap() {
        LpOutcome::Feasible { x, .. } => {
            assert!(x.iter().all(|&v| v >= 0.25 - 1e-15));
            assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
}
