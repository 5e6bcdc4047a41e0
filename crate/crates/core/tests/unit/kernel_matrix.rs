use macronc_core::kernel::*;

#[test]
fn matmul_identity() {
    let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
    assert_eq!(a.matmul(&Matrix::identity(2)), a);
    let b = a.matmul(&a.transpose());
    assert_eq!(b, Matrix::from_rows(&[[5.0, 11.0], [11.0, 25.0]]));
}

#[test]
fn principal_submatrix_picks_entries() {
    let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 5.0, 6.0], [3.0, 6.0, 9.0]]);
    let s = a.principal_submatrix(&[0, 2]);
    assert_eq!(s, Matrix::from_rows(&[[1.0, 3.0], [3.0, 9.0]]));
}
