//! Bagging stumps on twonorm against a single stump.

use voting_bounds::data::gen_twonorm;
use voting_bounds::ensemble::{bagging, evaluate, ConvexCombination};
use voting_bounds::rng::RngState;
use voting_bounds::stumps::train_stump;

fn main() -> voting_bounds::Result<()> {
    let rng = RngState::new(4);
    let train = gen_twonorm(300, 20, &rng.fork("train"))?;
    let test = gen_twonorm(5000, 20, &rng.fork("test"))?;

    let uniform = vec![1.0 / train.len() as f64; train.len()];
    let (stump, _) = train_stump(&train, &uniform)?;
    let single = evaluate(&ConvexCombination::single(stump), &test)?.1;
    println!("single stump {stump}: test error {single:.4}");

    let trace = bagging(&train, 50, &rng.fork("bagging"))?;
    for t in [1, 5, 10, 25, 50] {
        let f = trace.combination_at(t)?;
        println!(
            "bagging, {t:2} stumps: test error {:.4}",
            evaluate(&f, &test)?.1
        );
    }
    Ok(())
}
