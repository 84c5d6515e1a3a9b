mod common;

use rand::Rng;
use voting_bounds::data::{gen_intervals, gen_twonorm, IntervalsConcept, LabeledDataset};
use voting_bounds::ensemble::{
    adaboost, bagging, evaluate, exact_oracle_1d, ConvexCombination, ExactMarginDistribution,
    ScoreAccumulator, TrainingTrace,
};
use voting_bounds::rng::RngState;
use voting_bounds::stumps::{train_stump, Orientation, Stump};

fn first_zero_training_error(seed: u64, rounds: usize) -> Option<usize> {
    let (ds, _) = gen_intervals(20, 1000, &RngState::new(seed)).unwrap();
    let trace = adaboost(&ds, rounds).unwrap();
    let mut acc = ScoreAccumulator::new(&ds);
    trace.rounds.iter().enumerate().find_map(|(t, rec)| {
        acc.push(rec.vote, &rec.stump);
        acc.margins().iter().all(|&m| m > 0.0).then_some(t + 1)
    })
}

#[test]
fn intervals_training_error_reaches_zero() {
    let firsts: Vec<_> = (0..10)
        .map(|s| first_zero_training_error(s, 1000))
        .collect();
    assert!(firsts.iter().all(Option::is_some), "{firsts:?}");
    let early = firsts.iter().filter(|r| r.is_some_and(|r| r < 500)).count();
    assert!(early >= 7, "{firsts:?}");
}

#[test]
fn bagging_beats_a_single_stump_on_twonorm() {
    let rng = RngState::new(17);
    let train = gen_twonorm(300, 20, &rng.fork("train")).unwrap();
    let test = gen_twonorm(5000, 20, &rng.fork("test")).unwrap();
    let uniform = vec![1.0 / 300.0; 300];
    let single = evaluate(
        &ConvexCombination::single(train_stump(&train, &uniform).unwrap().0),
        &test,
    )
    .unwrap()
    .1;
    let bagged = bagging(&train, 50, &rng)
        .unwrap()
        .final_combination()
        .unwrap();
    let err = evaluate(&bagged, &test).unwrap().1;
    assert!(err < single, "{err} vs {single}");
}

#[test]
fn three_stump_margins_by_hand() {
    let ds = LabeledDataset::from_rows(
        &[vec![0.1], vec![0.3], vec![0.5], vec![0.7], vec![0.9]],
        vec![1, -1, 1, -1, 1],
    )
    .unwrap();
    let terms = vec![
        (0.5, Stump::new(0, 0.2, Orientation::Le)),
        (0.3, Stump::new(0, 0.6, Orientation::Ge)),
        (0.2, Stump::new(0, 0.4, Orientation::Le)),
    ];
    let f = ConvexCombination::new(terms.clone()).unwrap();
    let (m, _) = evaluate(&f, &ds).unwrap();
    for i in 0..5 {
        let x = ds.row(i)[0];
        let mut s = 0.0;
        for (w, st) in &terms {
            let hit = match st.orientation {
                Orientation::Le => x <= st.threshold,
                Orientation::Ge => x >= st.threshold,
            };
            s += w * if hit { 1.0 } else { -1.0 };
        }
        assert!((m[i] - f64::from(ds.label(i)) * s).abs() < 1e-15);
    }
}

#[test]
fn oracle_matches_monte_carlo_for_five_stumps() {
    let mut g = common::rng(31);
    for _ in 0..5 {
        let raw: Vec<f64> = (0..5).map(|_| g.random_range(0.1..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let f = ConvexCombination::new(
            raw.iter()
                .map(|w| {
                    (
                        w / s,
                        Stump::new(
                            0,
                            g.random::<f64>(),
                            if g.random_bool(0.5) {
                                Orientation::Le
                            } else {
                                Orientation::Ge
                            },
                        ),
                    )
                })
                .collect(),
        )
        .unwrap();
        let c = IntervalsConcept::equally_spaced(g.random_range(1..10)).unwrap();
        let n = 1_000_000;
        for delta in [0.0, 0.2] {
            let hits = (0..n)
                .filter(|_| {
                    let x: f64 = g.random();
                    f64::from(c.label(x)) * f.eval_value(x) <= delta
                })
                .count();
            let exact = exact_oracle_1d(&f, &c, delta).unwrap();
            let se = (exact * (1.0 - exact) / n as f64).sqrt().max(1e-9);
            assert!((hits as f64 / n as f64 - exact).abs() <= 4.0 * se);
        }
        let dist = ExactMarginDistribution::new(&f, &c).unwrap();
        assert!(
            (dist.generalization_error() - exact_oracle_1d(&f, &c, 0.0).unwrap()).abs() < 1e-15
        );
    }
}

#[test]
fn trace_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gen_twonorm(100, 3, &RngState::new(2)).unwrap();
    let trace = adaboost(&ds, 20).unwrap();
    trace.save(dir.path(), "t").unwrap();
    let back = TrainingTrace::load(dir.path(), "t").unwrap();
    assert_eq!(back.len(), trace.len());
    assert_eq!(
        back.final_combination().unwrap(),
        trace.final_combination().unwrap()
    );
    let path = dir.path().join("model.csv");
    let f = trace.final_combination().unwrap();
    f.save(&path).unwrap();
    assert_eq!(ConvexCombination::load(&path).unwrap(), f);
}
