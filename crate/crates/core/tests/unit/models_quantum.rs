use macronc_core::hypergraph::single_edge;
use macronc_core::kernel::*;
use macronc_core::models::*;

fn qubit_basis() -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::real(Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]])),
        ComplexMatrix::real(Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]])),
    ]
}

#[test]
fn pure_state_single_edge() {
    let q = QuantumRealization {
        dim: 2,
        rho: qubit_basis()[0].clone(),
        projectors: qubit_basis(),
    };
    let p = quantum_evaluate(&q, &single_edge(2)).unwrap();
    assert_eq!(p.p, vec![1.0, 0.0]);
}

#[test]
fn maximally_mixed_single_edge() {
    let q = QuantumRealization {
        dim: 2,
        rho: ComplexMatrix::identity(2).scaled(0.5),
        projectors: qubit_basis(),
    };
    let p = quantum_evaluate(&q, &single_edge(2)).unwrap();
    assert_eq!(p.p, vec![0.5, 0.5]);
}

#[test]
fn incomplete_measurement_is_reported_with_edge() {
    let mut proj = qubit_basis();
    proj[1] = ComplexMatrix::zeros(2);
    let q = QuantumRealization {
        dim: 2,
        rho: ComplexMatrix::identity(2).scaled(0.5),
        projectors: proj,
    };
    assert!(matches!(
        quantum_evaluate(&q, &single_edge(2)),
        Err(ModelError::IncompleteMeasurement { edge: 0, .. })
    ));
}

#[test]
fn non_idempotent_projector_rejected() {
    let mut proj = qubit_basis();
    proj[0] = ComplexMatrix::identity(2).scaled(0.5);
    proj[1] = ComplexMatrix::identity(2).scaled(0.5);
    let q = QuantumRealization {
        dim: 2,
        rho: ComplexMatrix::identity(2).scaled(0.5),
        projectors: proj,
    };
    assert!(matches!(
        q.check(&single_edge(2)),
        Err(ModelError::NotIdempotent { vertex: 0, .. })
    ));
}

#[test]
fn complex_state_handled() {
    // |+i⟩⟨+i| measured in the Y eigenbasis gives (1, 0).
    let mut rho = ComplexMatrix::identity(2).scaled(0.5);
    rho.im[(0, 1)] = -0.5;
    rho.im[(1, 0)] = 0.5;
    let mut py = ComplexMatrix::identity(2).scaled(0.5);
    py.im[(0, 1)] = -0.5;
    py.im[(1, 0)] = 0.5;
    let mut my = ComplexMatrix::identity(2).scaled(0.5);
    my.im[(0, 1)] = 0.5;
    my.im[(1, 0)] = -0.5;
    let q = QuantumRealization {
        dim: 2,
        rho,
        projectors: vec![py, my],
    };
    let p = quantum_evaluate(&q, &single_edge(2)).unwrap();
    assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
}

#[test]
fn realization_file_round_trip() {
    let q = tsirelson_realization();
    let text = serde_json::to_string(&q).unwrap();
    let back: QuantumRealization = serde_json::from_str(&text).unwrap();
    assert_eq!(back, q);
}
