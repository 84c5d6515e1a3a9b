//! How close the empirical gamma-margin gets to the one computed from the
//! true margin distribution, round by round.

use voting_bounds::data::gen_intervals;
use voting_bounds::ensemble::{adaboost, ExactMarginDistribution, ScoreAccumulator};
use voting_bounds::margins::{gamma_margin, step_gamma_margin, MarginProfile};
use voting_bounds::rng::RngState;

fn main() -> voting_bounds::Result<()> {
    let (train, concept) = gen_intervals(20, 1000, &RngState::new(3))?;
    let trace = adaboost(&train, 300)?;
    let gammas = [0.4, 2.0 / 3.0, 0.8];
    let mut acc = ScoreAccumulator::new(&train);
    println!("round  ratio(0.4)  ratio(2/3)  ratio(0.8)");
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        let round = t + 1;
        if round % 30 != 0 {
            continue;
        }
        let f = trace.combination_at(round)?;
        let exact = ExactMarginDistribution::new(&f, &concept)?;
        let profile = MarginProfile::new(acc.margins())?;
        let mut line = format!("{round:5}");
        for g in gammas {
            let emp = gamma_margin(&profile, g)?.value;
            let truth =
                step_gamma_margin(exact.values(), exact.cumulative(), train.len(), g)?.value;
            line += &format!("  {:10.4}", emp / truth);
        }
        println!("{line}");
    }
    Ok(())
}
