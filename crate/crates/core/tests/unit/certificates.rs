use macronc_core::certificates::*;
use macronc_core::hypergraph::*;
use macronc_core::hypergraph::{single_edge, triangle};
use macronc_core::kernel::*;

fn single_edge_q1() -> Q1Certificate {
    Q1Certificate::new(Matrix::from_rows(&[
        [1.0, 0.2, 0.8],
        [0.2, 0.2, 0.0],
        [0.8, 0.0, 0.8],
    ]))
}

#[test]
fn hand_built_certificate_verifies_exactly() {
    let s = single_edge(2);
    let p = ProbabilisticModel::new(vec![0.2, 0.8]);
    let r = verify_q1_certificate(&single_edge_q1(), &s, &p, EXACT_VERIFY_TOL);
    assert!(r.valid, "{}", r.summary());
}

#[test]
fn exclusive_entry_violation_is_reported() {
    let s = single_edge(2);
    let p = ProbabilisticModel::new(vec![0.2, 0.8]);
    let mut m = single_edge_q1().into_matrix();
    m[(1, 2)] = 0.1;
    m[(2, 1)] = 0.1;
    let r = verify_q1_certificate(&Q1Certificate::new(m), &s, &p, EXACT_VERIFY_TOL);
    assert!(!r.valid);
    assert!(r.has(ViolationKind::Exclusive));
}

#[test]
fn bridge_on_single_edge() {
    let s = single_edge(2);
    let g = q1_to_mnc(&single_edge_q1(), &s, EXACT_VERIFY_TOL).unwrap();
    let want = Matrix::from_rows(&[[0.16, -0.16], [-0.16, 0.16]]);
    assert!(g.matrix().max_abs_diff(&want) < 1e-15);
    let back = mnc_to_q1(&g, &s, EXACT_VERIFY_TOL).unwrap();
    assert!(back.matrix().max_abs_diff(single_edge_q1().matrix()) < 1e-15);
}

#[test]
fn bridge_refuses_unverified_input() {
    let s = single_edge(2);
    let mut m = single_edge_q1().into_matrix();
    m[(1, 1)] = 0.5;
    assert!(matches!(
        q1_to_mnc(&Q1Certificate::new(m), &s, EXACT_VERIFY_TOL),
        Err(CertificateError::Verification { .. })
    ));
}

#[test]
fn triangle_is_determined_and_infeasible() {
    let v = mnc_check(&triangle(), &ProbabilisticModel::new(vec![0.5; 3])).unwrap();
    assert_eq!(v.status, SdpStatus::Infeasible);
    assert_eq!(v.iterations, 0);
    let spectrum = v.spectrum.unwrap();
    for (got, want) in spectrum.iter().zip([-0.25, 0.5, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!((v.min_eigenvalue.unwrap() + 0.25).abs() < 1e-12);
    assert!(v.certificate.is_none());
}

#[test]
fn single_edge_mnc_is_multinomial_covariance() {
    let p = ProbabilisticModel::new(vec![0.2, 0.3, 0.5]);
    let v = mnc_check(&single_edge(3), &p).unwrap();
    assert!(v.is_feasible());
    let g = v.certificate.unwrap();
    assert!(g.matrix().max_abs_diff(&multinomial_covariance(&p.p)) < 1e-9);
}

#[test]
fn deterministic_model_gives_zero_covariance() {
    let p = ProbabilisticModel::new(vec![0.0, 1.0, 0.0]);
    let v = mnc_check(&single_edge(3), &p).unwrap();
    assert!(v.is_feasible());
    assert_eq!(v.certificate.unwrap().matrix(), &Matrix::zeros(3, 3));
    let q = q1_check(&single_edge(3), &p).unwrap();
    assert!(q.is_feasible());
}

#[test]
fn certificate_file_round_trip_is_bit_exact() {
    let c = Q1Certificate::new(Matrix::from_rows(&[
        [1.0, 0.1 + 0.2, 0.7],
        [0.1 + 0.2, 0.1 + 0.2, 0.0],
        [0.7, 0.0, 0.7],
    ]));
    let text = serde_json::to_string(&c).unwrap();
    let back: CertificateFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_q1().unwrap(), c);
    assert!(back.to_mnc().is_err());
}
