//! The Delta-bound next to the gamma-bound at the matching exponent. Early
//! on the dimension term wins; once many stumps are combined the bound is
//! attained at Delta = 1 and coincides with the gamma-bound.

use voting_bounds::data::gen_intervals;
use voting_bounds::dimension::{delta_bound, DeltaBoundParams, WeightSpectrum};
use voting_bounds::ensemble::{adaboost, ScoreAccumulator};
use voting_bounds::margins::{gamma_bound, gamma_from_alpha, MarginProfile};
use voting_bounds::rng::RngState;
use voting_bounds::stumps::StumpClassMeta;

fn main() -> voting_bounds::Result<()> {
    let (train, _) = gen_intervals(20, 1000, &RngState::new(11))?;
    let meta = StumpClassMeta::for_dim(train.dim());
    let params = DeltaBoundParams::new(meta.alpha, train.len())?;
    let gamma = gamma_from_alpha(meta.alpha);
    let trace = adaboost(&train, 200)?;

    println!("alpha = {}, matching gamma = {gamma:.4}", meta.alpha);
    println!("round  gamma_bound  delta_bound  delta_hat  d(f;Delta)  Delta");
    let mut acc = ScoreAccumulator::new(&train);
    for (t, rec) in trace.rounds.iter().enumerate() {
        acc.push(rec.vote, &rec.stump);
        let round = t + 1;
        if round % 10 != 0 {
            continue;
        }
        let profile = MarginProfile::new(acc.margins())?;
        let spec = WeightSpectrum::from_combination(&trace.combination_at(round)?);
        let b = delta_bound(&profile, &spec, &params)?;
        println!(
            "{round:5}  {:11.4}  {:11.4}  {:9.5}  {:10}  {:5.3}",
            gamma_bound(&profile, gamma)?,
            b.value,
            b.delta_hat.value,
            b.dimension,
            b.big_delta
        );
    }
    Ok(())
}
