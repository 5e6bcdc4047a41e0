use macronc_core::builders::*;

fn chsh_marginal() -> MarginalScenario {
    // A0=0, A1=1, B0=2, B1=3
    MarginalScenario::new(4, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]], 2).unwrap()
}

#[test]
fn induced_scenarios_of_chsh() {
    let x = chsh_marginal();
    let a0 = x.induced(0).unwrap();
    assert_eq!(a0.observables(), &[2, 3]);
    assert_eq!(a0.contexts(), &[vec![2], vec![3]]);
    let b1 = x.induced(3).unwrap();
    assert_eq!(b1.observables(), &[0, 1]);
    assert_eq!(b1.contexts(), &[vec![0], vec![1]]);
    assert_eq!(x.induced(7), Err(BuildError::UnknownObservable(7)));
}

#[test]
fn induced_single_context() {
    let x = MarginalScenario::new(2, vec![vec![0, 1]], 2).unwrap();
    let i = x.induced(0).unwrap();
    assert_eq!(i.observables(), &[1]);
    assert_eq!(i.contexts(), &[vec![1]]);
}

#[test]
fn marginal_validation() {
    assert_eq!(
        MarginalScenario::new(3, vec![vec![0, 1], vec![0]], 2).unwrap_err(),
        BuildError::NonMaximalContext {
            smaller: 1,
            larger: 0
        }
    );
    assert_eq!(
        MarginalScenario::new(3, vec![vec![0, 1]], 2).unwrap_err(),
        BuildError::UncoveredObservable(2)
    );
    assert_eq!(
        MarginalScenario::new(2, vec![vec![0, 1]], 0).unwrap_err(),
        BuildError::NoOutcomes
    );
    assert_eq!(
        MarginalScenario::new(2, vec![vec![0, 0, 1]], 2).unwrap_err(),
        BuildError::DuplicateObservable {
            context: 0,
            observable: 0
        }
    );
}

#[test]
fn protocol_counts() {
    let x = chsh_marginal();
    let all = enumerate_protocols(&x, DEFAULT_PROTOCOL_BUDGET).unwrap();
    assert_eq!(all.len(), 16);
    assert_eq!(x.protocol_count(), 16);

    let pair = MarginalScenario::new(2, vec![vec![0, 1]], 2).unwrap();
    assert_eq!(enumerate_protocols(&pair, 100).unwrap().len(), 2);

    let single = MarginalScenario::new(1, vec![vec![0]], 3).unwrap();
    assert_eq!(enumerate_protocols(&single, 100).unwrap().len(), 1);
}

#[test]
fn protocol_outcomes_cover_contexts() {
    let x = chsh_marginal();
    for t in enumerate_protocols(&x, 1000).unwrap() {
        let outs = t.outcomes();
        assert_eq!(outs.len(), 4);
        for o in outs {
            assert!(x.contexts().contains(&o.context()));
        }
    }
}

#[test]
fn protocol_budget_is_enforced() {
    let x = chsh_marginal();
    assert_eq!(
        enumerate_protocols(&x, 10).unwrap_err(),
        BuildError::ProtocolBudget { limit: 10 }
    );
}

#[test]
fn pair_context_hypergraph() {
    let pair = MarginalScenario::new(2, vec![vec![0, 1]], 2).unwrap();
    let h = marginal_to_hypergraph(&pair).unwrap();
    assert_eq!(h.num_vertices(), 4);
    assert_eq!(h.num_edges(), 1);
    assert_eq!(h.edge(0).len(), 4);
    assert_eq!(h.label(1), "m0=0,m1=1");
}

#[test]
fn single_observable_hypergraph() {
    let x = MarginalScenario::new(1, vec![vec![0]], 3).unwrap();
    let h = marginal_to_hypergraph(&x).unwrap();
    assert_eq!((h.num_vertices(), h.num_edges()), (3, 1));
}

#[test]
fn small_bell_scenarios() {
    let b = bell_scenario(1, 2, 2).unwrap();
    assert_eq!((b.num_vertices(), b.num_edges()), (4, 2));
    assert!(b.exclusive_pairs().iter().all(|&(u, v)| (u < 2) == (v < 2)));
    let b = bell_scenario(1, 1, 3).unwrap();
    assert_eq!((b.num_vertices(), b.num_edges()), (3, 1));
    assert_eq!(b.labels(), &["0|0", "1|0", "2|0"]);
}

#[test]
fn bell_guards() {
    assert!(matches!(
        bell_scenario(2, 1, 1),
        Err(BuildError::InvalidBellParameters { .. })
    ));
    assert!(matches!(
        bell_scenario(4, 3, 3),
        Err(BuildError::SizeGuard { vertices: 6561, .. }) | Err(BuildError::ProtocolBudget { .. })
    ));
    assert!(matches!(
        bell_scenario(3, 5, 5),
        Err(BuildError::SizeGuard {
            vertices: 15625,
            ..
        })
    ));
}

#[test]
fn bell_labels() {
    assert_eq!(bell_label(&[0, 1], &[1, 0]), "01|10");
    assert_eq!(bell_label(&[0, 11], &[1, 0]), "0,11|1,0");
}

#[test]
fn digits_round_trip() {
    assert_eq!(digits(5, 2, 3), vec![1, 0, 1]);
    assert_eq!(digits(0, 3, 2), vec![0, 0]);
}
