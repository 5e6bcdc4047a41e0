use macronc_core::kernel::*;

#[test]
fn index_matches_vectorization_order() {
    for n in 0..6 {
        let s = SymmetricSpace::new(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                assert_eq!(s.index(i, j), k);
                assert_eq!(s.index(j, i), k);
                k += 1;
            }
        }
        assert_eq!(k, s.dim());
    }
}

#[test]
fn project_onto_single_entry() {
    let c = AffineConstraintSet::new(2, vec![LinearConstraint::entry(0, 0, 1.0)]).unwrap();
    let p = c.project(&Matrix::zeros(2, 2));
    assert_eq!(p, Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]));
}

#[test]
fn duplicate_constraints_are_dependent() {
    let cons = vec![
        LinearConstraint::entry(0, 1, 0.5),
        LinearConstraint::entry(1, 0, 0.5),
    ];
    let c = AffineConstraintSet::new(2, cons).unwrap();
    assert_eq!(c.rank(), 1);
}

#[test]
fn incompatible_constraints_are_reported() {
    let cons = vec![
        LinearConstraint::entry(0, 1, 0.5),
        LinearConstraint::entry(1, 0, 0.7),
    ];
    let err = AffineConstraintSet::new(2, cons).unwrap_err();
    assert!(matches!(
        err,
        KernelError::Inconsistent { constraint: 1, .. }
    ));
}

#[test]
fn fully_determined_detection() {
    let cons = vec![
        LinearConstraint::entry(0, 0, 1.0),
        LinearConstraint::entry(0, 1, 2.0),
        LinearConstraint::entry(1, 1, 3.0),
    ];
    let c = AffineConstraintSet::new(2, cons).unwrap();
    assert!(c.is_fully_determined());
    let p = c.project(&Matrix::zeros(2, 2));
    assert!(p.max_abs_diff(&Matrix::from_rows(&[[1.0, 2.0], [2.0, 3.0]])) < 1e-14);
}
