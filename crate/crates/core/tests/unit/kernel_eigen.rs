use macronc_core::kernel::*;

#[test]
fn identity_eigenvalues() {
    let e = eigh(&Matrix::identity(3)).unwrap();
    for l in e.values {
        assert!((l - 1.0).abs() < 1e-12);
    }
}

#[test]
fn swap_matrix_eigenvalues() {
    let e = eigh(&Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
    assert!((e.values[0] + 1.0).abs() < 1e-10);
    assert!((e.values[1] - 1.0).abs() < 1e-10);
}

#[test]
fn rejects_asymmetric_input() {
    let a = Matrix::from_rows(&[[0.0, 1.0], [0.5, 0.0]]);
    assert!(matches!(eigh(&a), Err(KernelError::NotSymmetric { .. })));
}

#[test]
fn project_psd_clips_negative_diagonal() {
    let p = project_psd(&Matrix::from_diagonal(&[2.0, -3.0])).unwrap();
    assert!(p.max_abs_diff(&Matrix::from_diagonal(&[2.0, 0.0])) < 1e-14);
}

#[test]
fn project_psd_keeps_psd_input_exactly() {
    let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]);
    assert_eq!(project_psd(&a).unwrap(), a);
}

#[test]
fn empty_matrix() {
    let e = eigh(&Matrix::zeros(0, 0)).unwrap();
    assert!(e.values.is_empty());
}
