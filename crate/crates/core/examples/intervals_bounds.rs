//! AdaBoost on the intervals problem: exact generalization error against
//! gamma-bounds for several gamma.

use voting_bounds::data::gen_intervals;
use voting_bounds::ensemble::{adaboost, ExactMarginDistribution, ScoreAccumulator};
use voting_bounds::margins::{gamma_bound, MarginProfile};
use voting_bounds::rng::RngState;

fn main() -> voting_bounds::Result<()> {
    let (train, concept) = gen_intervals(20, 1000, &RngState::new(7))?;
    let trace = adaboost(&train, 500)?;
    let gammas = [1.0, 0.8, 2.0 / 3.0];

    println!("round  exact_error  gamma=1  gamma=0.8  gamma=2/3");
    let mut acc = ScoreAccumulator::new(&train);
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        let round = t + 1;
        if round % 50 != 0 && round != 1 {
            continue;
        }
        let f = trace.combination_at(round)?;
        let exact = ExactMarginDistribution::new(&f, &concept)?.generalization_error();
        let profile = MarginProfile::new(acc.margins())?;
        let bounds: Vec<f64> = gammas
            .iter()
            .map(|&g| gamma_bound(&profile, g))
            .collect::<voting_bounds::Result<_>>()?;
        println!(
            "{round:5}  {exact:11.4}  {:7.4}  {:9.4}  {:9.4}",
            bounds[0], bounds[1], bounds[2]
        );
    }
    Ok(())
}
