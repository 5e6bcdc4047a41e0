use macronc_core::hypergraph::*;
use macronc_core::hypergraph::{single_edge, triangle, validate_model};
use macronc_core::models::*;

#[test]
fn triangle_has_no_deterministic_model() {
    assert!(enumerate_deterministic(&triangle(), DEFAULT_SEARCH_BUDGET)
        .unwrap()
        .is_empty());
}

#[test]
fn single_edge_has_one_per_outcome() {
    let found = enumerate_deterministic(&single_edge(4), DEFAULT_SEARCH_BUDGET).unwrap();
    assert_eq!(found.len(), 4);
    for (i, d) in found.iter().enumerate() {
        assert_eq!(d.selected, vec![i]);
    }
}

#[test]
fn every_found_model_validates_exactly() {
    let s = ContextualityScenario::new(
        ["a", "b", "c", "d", "e"],
        [vec![0, 1], vec![1, 2, 3], vec![3, 4], vec![0, 2, 4]],
    )
    .unwrap();
    let found = enumerate_deterministic(&s, DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(!found.is_empty());
    for d in found {
        let r = validate_model(&s, &d.to_model(5), 0.0).unwrap();
        assert!(r.accepted);
    }
}

#[test]
fn budget_is_enforced() {
    let err = enumerate_deterministic(&single_edge(3), 2).unwrap_err();
    assert!(matches!(err, ModelError::SearchBudget { limit: 2 }));
}
