use proptest::prelude::*;

use ecm::simulate::{preset_names, simulate, ScenarioConfig};

fn preset(name: &str, seed: u64) -> ScenarioConfig {
    let mut c = ScenarioConfig::preset(name).unwrap();
    c.seed = seed;
    c
}

#[test]
fn outlier_count_is_binomial_on_average() {
    for name in ["benchmark-sim2", "benchmark-sim3"] {
        let total: usize = (0..200).map(|seed| simulate(&preset(name, seed)).unwrap().outlier_count()).sum();
        let mean = total as f64 / 200.0;
        assert!((mean - 4.5).abs() <= 0.5, "{name}: mean outlier count {mean}");
    }
}

#[test]
fn roughness_always_has_two_outliers() {
    for seed in 0..20 {
        let s = simulate(&preset("benchmark-sim1", seed)).unwrap();
        assert_eq!(s.outlier_count(), 2);
        assert_eq!(s.contours.len(), 150);
    }
}

#[test]
fn draws_do_not_depend_on_sample_size() {
    for name in ["benchmark-sim2", "benchmark-sim3", "gear-sim2"] {
        let mut small = preset(name, 4);
        small.n_samples = 10;
        let mut large = small.clone();
        large.n_samples = 25;
        let (a, b) = (simulate(&small).unwrap(), simulate(&large).unwrap());
        assert_eq!(a.contours[..], b.contours[..10], "{name}");
        assert_eq!(a.ground_truth[..], b.ground_truth[..10], "{name}");
    }
}

#[test]
fn every_preset_produces_valid_closed_contours() {
    for name in preset_names() {
        let mut c = preset(&name, 1);
        c.n_samples = 8;
        let s = simulate(&c).unwrap();
        assert_eq!(s.contours.len(), 8);
        for k in &s.contours {
            assert!(k.closed, "{name}");
            assert_eq!(k.grid_size(), c.grid_size);
            assert!(k.x.values().iter().chain(k.y.values()).all(|v| v.is_finite()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_sample(seed in any::<u64>(), which in 0usize..3) {
        let name = ["benchmark-sim1", "benchmark-sim2", "benchmark-sim3"][which];
        let mut c = preset(name, seed);
        c.n_samples = 12;
        let a = simulate(&c).unwrap();
        let b = simulate(&c).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.seed, seed);
    }

    #[test]
    fn emitted_warps_are_warps(seed in any::<u64>(), p in 0.3f64..1.0) {
        let mut c = preset("benchmark-sim3", seed);
        c.n_samples = 20;
        c.bernoulli_p = p;
        let s = simulate(&c).unwrap();
        for w in &s.warps {
            let v = w.values();
            prop_assert_eq!((v[0], v[v.len() - 1]), (0.0, 1.0));
            prop_assert!(v.windows(2).all(|x| x[0] < x[1]));
        }
    }
}
