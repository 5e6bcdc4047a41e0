use macronc_core::builders::model_from_correlations;
use macronc_core::builders::*;
use macronc_core::hypergraph::*;
use macronc_core::models::*;

#[test]
fn reference_chsh_values() {
    let s = bell_scenario(2, 2, 2).unwrap();
    let pr = model_from_correlations(&pr_box(), &s).unwrap();
    assert!((chsh_value(&s, &pr).unwrap() - 4.0).abs() < 1e-15);
    let half = model_from_correlations(&isotropic(0.5), &s).unwrap();
    assert!((chsh_value(&s, &half).unwrap() - 2.0).abs() < 1e-15);
    let noise = model_from_correlations(&uniform_noise(2, 2, 2), &s).unwrap();
    assert_eq!(chsh_value(&s, &noise).unwrap(), 0.0);
}

#[test]
fn chsh_requires_b222() {
    let s = bell_scenario(1, 2, 2).unwrap();
    let p = ProbabilisticModel::new(vec![0.5; 4]);
    assert!(matches!(
        chsh_value(&s, &p),
        Err(ModelError::NotChshScenario)
    ));
}
