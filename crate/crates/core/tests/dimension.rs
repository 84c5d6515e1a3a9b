mod common;

use proptest::prelude::*;
use rand::Rng;
use voting_bounds::data::{gen_intervals, gen_twonorm};
use voting_bounds::dimension::{
    delta_bound, delta_dimension, delta_hat, eps_n, normalized_eps, weighted_eps, DeltaBoundParams,
    WeightSpectrum, Weighting,
};
use voting_bounds::ensemble::{adaboost, ScoreAccumulator};
use voting_bounds::margins::{gamma_bound, gamma_from_alpha, MarginProfile};
use voting_bounds::rng::RngState;
use voting_bounds::stumps::StumpClassMeta;

fn spectrum(seed: u64, k: usize) -> Vec<f64> {
    let mut g = common::rng(seed);
    common::dyadic_weights(k, &mut g)
        .into_iter()
        .map(|w| if g.random_bool(0.25) { -w } else { w })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dimension_matches_scan(seed in any::<u64>(), k in 1usize..=100, big in 0.0f64..=1.0) {
        let w = spectrum(seed, k);
        let spec = WeightSpectrum::from_weights(&w);
        prop_assert_eq!(delta_dimension(&spec, big), common::dimension_by_scan(&w, big));
        for &t in spec.tails() {
            prop_assert_eq!(delta_dimension(&spec, t), common::dimension_by_scan(&w, t));
        }
    }

    #[test]
    fn eps_n_matches_dense_grid(seed in any::<u64>(), k in 1usize..=20, n in 1usize..2000, alpha in 0.1f64..1.9, delta in 0.001f64..0.999) {
        let w = spectrum(seed, k);
        let params = DeltaBoundParams::new(alpha, n).unwrap();
        let lib = eps_n(&WeightSpectrum::from_weights(&w), delta, &params).unwrap();
        prop_assert!((lib - common::eps_n_by_grid(&w, delta, alpha, n)).abs() <= 1e-9);
    }

    #[test]
    fn eps_n_nonincreasing_in_delta(seed in any::<u64>(), k in 1usize..=40, a in 0.001f64..0.998, b in 0.001f64..0.998) {
        let spec = WeightSpectrum::from_weights(&spectrum(seed, k));
        let params = DeltaBoundParams::new(1.0, 500).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(eps_n(&spec, lo, &params).unwrap() >= eps_n(&spec, hi, &params).unwrap());
    }

    #[test]
    fn dominated_by_gamma_functional(seed in any::<u64>(), k in 1usize..=40, n in 2usize..5000, alpha in 0.1f64..1.9, delta in 0.001f64..0.999) {
        let spec = WeightSpectrum::from_weights(&spectrum(seed, k));
        let params = DeltaBoundParams::new(alpha, n).unwrap();
        let nf = n as f64;
        let g = (1.0 / delta).powf(2.0 * alpha / (alpha + 2.0)) * nf.powf(-2.0 / (alpha + 2.0));
        prop_assert!(eps_n(&spec, delta, &params).unwrap() <= g.max(2.0 * nf.ln() / nf));
    }

    #[test]
    fn normalized_at_most_weighted(seed in any::<u64>(), k in 1usize..=40, t in 1usize..500, zeta in 0.0f64..=1.0, delta in 0.001f64..0.999) {
        let spec = WeightSpectrum::from_weights(&spectrum(seed, k));
        let params = DeltaBoundParams::new(1.2, 300).unwrap();
        let w = Weighting::new(zeta, 1.14).unwrap();
        prop_assert!(normalized_eps(&spec, delta, &params, &w, t).unwrap() <= weighted_eps(&spec, delta, &params, &w).unwrap());
    }
}

#[test]
fn delta_equals_one_reduces_to_gamma_functional() {
    let spec = WeightSpectrum::from_weights(&[1.0]);
    let params = DeltaBoundParams::new(1.0, 100).unwrap();
    let delta = 0.3f64;
    let g = (1.0 / delta).powf(2.0 / 3.0) * 100f64.powf(-2.0 / 3.0);
    assert_eq!(params.margin_term(1.0, delta), g);
    let d1 = (1.0 / 100.0) * ((1.0 / delta).ln() + (100.0 * std::f64::consts::E.powi(2)).ln());
    let expected = g.min(d1).max(2.0 * 100f64.ln() / 100.0);
    assert!((eps_n(&spec, delta, &params).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn delta_hat_matches_grid_on_intervals_trace() {
    let (ds, _) = gen_intervals(20, 1000, &RngState::new(21)).unwrap();
    let meta = StumpClassMeta::for_dim(1);
    let params = DeltaBoundParams::new(meta.alpha, ds.len()).unwrap();
    let trace = adaboost(&ds, 300).unwrap();
    let mut acc = ScoreAccumulator::new(&ds);
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        if (t + 1) % 25 != 0 {
            continue;
        }
        let margins = acc.margins();
        let profile = MarginProfile::new(margins.clone()).unwrap();
        let spec = WeightSpectrum::from_combination(&trace.combination_at(t + 1).unwrap());
        let lib = delta_hat(&profile, &spec, &params).unwrap();
        // last feasible point of a 10^5 grid over (0, 1/2)
        let mut grid = 0.0;
        for j in 1..100_000 {
            let d = j as f64 * 0.5 / 100_000.0;
            if common::empirical_cdf(&margins, d) <= eps_n(&spec, d, &params).unwrap() {
                grid = d;
            } else {
                break;
            }
        }
        assert!(lib.feasible);
        assert!(
            (lib.value - grid).abs() <= 1e-4,
            "round {}: {} vs {grid}",
            t + 1,
            lib.value
        );
    }
}

#[test]
fn first_hundred_rounds_not_above_gamma_bound() {
    let (ds, _) = gen_intervals(20, 1000, &RngState::new(0)).unwrap();
    let meta = StumpClassMeta::for_dim(1);
    let params = DeltaBoundParams::new(meta.alpha, ds.len()).unwrap();
    let gamma = gamma_from_alpha(meta.alpha);
    let trace = adaboost(&ds, 100).unwrap();
    let mut acc = ScoreAccumulator::new(&ds);
    let mut strictly = 0;
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        let profile = MarginProfile::new(acc.margins()).unwrap();
        let spec = WeightSpectrum::from_combination(&trace.combination_at(t + 1).unwrap());
        let d = delta_bound(&profile, &spec, &params).unwrap().value;
        let g = gamma_bound(&profile, gamma).unwrap();
        assert!(d <= g * (1.0 + 1e-9), "round {}: {d} > {g}", t + 1);
        if d < 0.99 * g {
            strictly += 1;
        }
    }
    assert!(strictly > 0);
}

#[test]
fn normalized_below_weighted_on_twonorm_run() {
    let ds = gen_twonorm(300, 20, &RngState::new(22)).unwrap();
    let params = DeltaBoundParams::new(StumpClassMeta::for_dim(20).alpha, ds.len()).unwrap();
    let w = Weighting::new(0.4, 1.14).unwrap();
    let trace = adaboost(&ds, 100).unwrap();
    let mut acc = ScoreAccumulator::new(&ds);
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        let profile = MarginProfile::new(acc.margins()).unwrap();
        let spec = WeightSpectrum::from_combination(&trace.combination_at(t + 1).unwrap());
        let dh = delta_hat(&profile, &spec, &params).unwrap();
        if !dh.feasible {
            continue;
        }
        let we = weighted_eps(&spec, dh.value, &params, &w).unwrap();
        let ne = normalized_eps(&spec, dh.value, &params, &w, t + 1).unwrap();
        assert!(ne <= we);
    }
}
