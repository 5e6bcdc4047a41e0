use macronc_core::hypergraph::*;

#[test]
fn triangle_shape() {
    let t = triangle();
    assert_eq!(t.num_vertices(), 3);
    assert_eq!(t.num_edges(), 3);
    assert_eq!(t.edges(), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
}

#[test]
fn duplicate_edges_collapse() {
    let s = ContextualityScenario::new(["a", "b"], [vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!(s.num_edges(), 1);
}

#[test]
fn construction_errors_name_the_offender() {
    assert_eq!(
        ContextualityScenario::new(["a", "b"], [vec![0, 3]]).unwrap_err(),
        HypergraphError::OutOfRange {
            edge: 0,
            vertex: 3,
            len: 2
        }
    );
    assert_eq!(
        ContextualityScenario::new(["a", "b"], [vec![0, 1], vec![]]).unwrap_err(),
        HypergraphError::EmptyEdge { edge: 1 }
    );
    assert_eq!(
        ContextualityScenario::new(["a", "b"], [vec![1, 1, 0]]).unwrap_err(),
        HypergraphError::DuplicateVertex { edge: 0, vertex: 1 }
    );
    assert_eq!(
        ContextualityScenario::new(["a", "b", "c"], [vec![0, 1]]).unwrap_err(),
        HypergraphError::IsolatedVertex { vertex: 2 }
    );
}

#[test]
fn validate_triangle_models() {
    let t = triangle();
    let half = ProbabilisticModel::new(vec![0.5; 3]);
    let r = t.validate_model(&half, NORMALIZATION_TOL).unwrap();
    assert!(r.accepted);
    assert!(r.residuals.iter().all(|&x| x == 0.0));

    let corner = ProbabilisticModel::new(vec![1.0, 0.0, 0.0]);
    let r = t.validate_model(&corner, NORMALIZATION_TOL).unwrap();
    assert!(!r.accepted);
    // Canonical edge order puts {1,2} last.
    assert_eq!(r.worst_edge(), Some((2, 1.0)));
}

#[test]
fn validate_dimension_mismatch() {
    let err = triangle()
        .validate_model(&ProbabilisticModel::new(vec![0.5; 2]), NORMALIZATION_TOL)
        .unwrap_err();
    assert_eq!(
        err,
        HypergraphError::DimensionMismatch {
            expected: 3,
            found: 2
        }
    );
}

#[test]
fn out_of_range_probabilities_are_rejected() {
    let s = single_edge(2);
    let r = s
        .validate_model(&ProbabilisticModel::new(vec![1.5, -0.5]), NORMALIZATION_TOL)
        .unwrap();
    assert!(!r.accepted);
    assert_eq!(r.out_of_range, vec![0, 1]);
}

#[test]
fn exclusive_pairs_examples() {
    let pairs: Vec<_> = triangle().exclusive_pairs().into_iter().collect();
    assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);

    let e = single_edge(3);
    assert_eq!(e.exclusive_pairs().len(), 3);

    let disjoint =
        ContextualityScenario::new(["a", "b", "c", "d"], [vec![0, 1], vec![2, 3]]).unwrap();
    let pairs: Vec<_> = disjoint.exclusive_pairs().into_iter().collect();
    assert_eq!(pairs, vec![(0, 1), (2, 3)]);
}

#[test]
fn file_round_trip_is_byte_equal() {
    let s = ContextualityScenario::new(["x", "y", "z"], [vec![2, 1], vec![0, 1]]).unwrap();
    let a = serde_json::to_string(&s).unwrap();
    let back: ContextualityScenario = serde_json::from_str(&a).unwrap();
    assert_eq!(back, s);
    assert_eq!(serde_json::to_string(&back).unwrap(), a);
    assert_eq!(a, r#"{"vertices":["x","y","z"],"edges":[[0,1],[1,2]]}"#);
}

#[test]
fn invalid_file_is_rejected_on_load() {
    let bad = r#"{"vertices":["x"],"edges":[[0,1]]}"#;
    assert!(serde_json::from_str::<ContextualityScenario>(bad).is_err());
}
