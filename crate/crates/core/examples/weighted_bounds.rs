//! Weighted and normalized Delta-bounds on twonorm for a few values of zeta.

use voting_bounds::data::gen_twonorm;
use voting_bounds::dimension::{
    delta_hat, normalized_eps, weighted_eps, DeltaBoundParams, WeightSpectrum, Weighting,
};
use voting_bounds::ensemble::{adaboost, evaluate};
use voting_bounds::margins::MarginProfile;
use voting_bounds::rng::RngState;
use voting_bounds::stumps::StumpClassMeta;

fn main() -> voting_bounds::Result<()> {
    let rng = RngState::new(5);
    let train = gen_twonorm(300, 20, &rng.fork("train"))?;
    let test = gen_twonorm(2000, 20, &rng.fork("test"))?;
    let meta = StumpClassMeta::for_dim(train.dim());
    let params = DeltaBoundParams::new(meta.alpha, train.len())?;
    let trace = adaboost(&train, 100)?;

    for zeta in [0.1, 0.4, 0.9] {
        let w = Weighting::new(zeta, 1.14)?;
        println!("zeta = {zeta}");
        println!("  round  test_error  weighted  normalized");
        for round in [10, 25, 50, 100].into_iter().filter(|&r| r <= trace.len()) {
            let f = trace.combination_at(round)?;
            let profile = MarginProfile::new(evaluate(&f, &train)?.0)?;
            let spec = WeightSpectrum::from_combination(&f);
            let dh = delta_hat(&profile, &spec, &params)?;
            let (we, ne) = if dh.feasible {
                (
                    weighted_eps(&spec, dh.value, &params, &w)?,
                    normalized_eps(&spec, dh.value, &params, &w, round)?,
                )
            } else {
                (f64::INFINITY, f64::INFINITY)
            };
            println!(
                "  {round:5}  {:10.4}  {we:8.4}  {ne:10.4}",
                evaluate(&f, &test)?.1
            );
        }
    }
    Ok(())
}
