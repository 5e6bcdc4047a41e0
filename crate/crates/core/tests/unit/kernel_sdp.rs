use macronc_core::kernel::LinearConstraint;
use macronc_core::kernel::*;

fn fix_all(target: &Matrix) -> AffineConstraintSet {
    let n = target.rows();
    let mut cons = Vec::new();
    for i in 0..n {
        for j in i..n {
            cons.push(LinearConstraint::entry(i, j, target[(i, j)]));
        }
    }
    AffineConstraintSet::new(n, cons).unwrap()
}

#[test]
fn psd_target_is_feasible_immediately() {
    let target = Matrix::from_rows(&[[0.16, -0.16], [-0.16, 0.16]]);
    let out = sdp_feasibility(&fix_all(&target), &SdpConfig::default()).unwrap();
    assert_eq!(out.status, SdpStatus::Feasible);
    assert_eq!(out.iterations, 0);
    assert!(out.point.unwrap().max_abs_diff(&target) < 1e-15);
}

#[test]
fn indefinite_target_gap_is_clipped_spectrum() {
    let target = Matrix::from_rows(&[
        [0.25, -0.25, -0.25],
        [-0.25, 0.25, -0.25],
        [-0.25, -0.25, 0.25],
    ]);
    let out = sdp_feasibility(&fix_all(&target), &SdpConfig::default()).unwrap();
    assert_eq!(out.status, SdpStatus::Infeasible);
    assert!((out.gap - 0.25).abs() < 1e-12);
    assert!((out.min_eigenvalue + 0.25).abs() < 1e-12);
}

#[test]
fn empty_constraint_set_is_feasible_at_zero() {
    let set = AffineConstraintSet::new(3, Vec::new()).unwrap();
    let out = sdp_feasibility(&set, &SdpConfig::default()).unwrap();
    assert_eq!(out.status, SdpStatus::Feasible);
    assert_eq!(out.point.unwrap(), Matrix::zeros(3, 3));
}

#[test]
fn iterative_path_on_partially_fixed_matrix() {
    // X00 = X11 = 1 with X01 free: PSD completion exists.
    let cons = vec![
        LinearConstraint::entry(0, 0, 1.0),
        LinearConstraint::entry(1, 1, 1.0),
        LinearConstraint::entry(0, 2, 0.9),
        LinearConstraint::entry(1, 2, -0.9),
        LinearConstraint::entry(2, 2, 1.0),
    ];
    let set = AffineConstraintSet::new(3, cons).unwrap();
    let out = sdp_feasibility(&set, &SdpConfig::default()).unwrap();
    assert_eq!(out.status, SdpStatus::Feasible);
    let x = out.point.unwrap();
    assert!(set.max_residual(&x) < 1e-12);
    assert!(eigh(&x).unwrap().min_value() > -1e-8);
}

#[test]
fn iterative_path_detects_infeasible_completion() {
    // The fixed 3x3 block with correlations 0.9, 0.9, -0.9 is indefinite.
    // The free fourth row keeps the set from being a single point.
    let cons = vec![
        LinearConstraint::entry(0, 0, 1.0),
        LinearConstraint::entry(1, 1, 1.0),
        LinearConstraint::entry(2, 2, 1.0),
        LinearConstraint::entry(0, 1, 0.9),
        LinearConstraint::entry(0, 2, 0.9),
        LinearConstraint::entry(1, 2, -0.9),
    ];
    let set = AffineConstraintSet::new(4, cons).unwrap();
    let out = sdp_feasibility(&set, &SdpConfig::default()).unwrap();
    assert_eq!(out.status, SdpStatus::Infeasible);
    assert!(out.gap > 1e-3);
}
