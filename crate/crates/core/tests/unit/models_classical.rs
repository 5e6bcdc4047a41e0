use macronc_core::hypergraph::*;
use macronc_core::hypergraph::{single_edge, triangle};
use macronc_core::kernel::*;
use macronc_core::models::*;

#[test]
fn triangle_is_vacuously_not_classical() {
    let v = classical_check(&triangle(), &ProbabilisticModel::new(vec![0.5; 3])).unwrap();
    assert_eq!(
        v,
        ClassicalVerdict::NotClassical {
            margin: None,
            vacuous: true
        }
    );
}

#[test]
fn single_edge_certificate_by_hand() {
    let s = single_edge(2);
    let dec = ClassicalDecomposition {
        weights: vec![0.2, 0.8],
        models: vec![
            DeterministicModel { selected: vec![0] },
            DeterministicModel { selected: vec![1] },
        ],
    };
    let cert = classical_to_q1_certificate(&dec, &s);
    let expected = Matrix::from_rows(&[[1.0, 0.2, 0.8], [0.2, 0.2, 0.0], [0.8, 0.0, 0.8]]);
    assert!(cert.matrix().max_abs_diff(&expected) < 1e-15);
}

#[test]
fn deterministic_alone_gives_rank_one_certificate() {
    let s = single_edge(3);
    let dec = ClassicalDecomposition {
        weights: vec![1.0],
        models: vec![DeterministicModel { selected: vec![2] }],
    };
    let m = classical_to_q1_certificate(&dec, &s);
    let m = m.matrix();
    for v in 0..3 {
        assert_eq!(m[(v + 1, v + 1)], if v == 2 { 1.0 } else { 0.0 });
    }
    // w wᵀ is idempotent up to the scale wᵀw = 2.
    let sq = m.matmul(m);
    assert!(sq.max_abs_diff(&m.scaled(2.0)) < 1e-15);
}

#[test]
fn single_edge_mixture_is_classical() {
    let s = single_edge(3);
    let p = ProbabilisticModel::new(vec![0.2, 0.3, 0.5]);
    match classical_check(&s, &p).unwrap() {
        ClassicalVerdict::Classical(dec) => assert!(dec.max_deviation(&p) < 1e-12),
        other => panic!("unexpected {other:?}"),
    }
}
