//! Re-weights an AdaBoost ensemble with DOOM-LP and compares the weight
//! spectra and margin costs before and after.

use voting_bounds::data::{gen_krkp_like, split};
use voting_bounds::dimension::{delta_dimension, WeightSpectrum};
use voting_bounds::doomlp::optimize_combination;
use voting_bounds::ensemble::{adaboost, evaluate};
use voting_bounds::rng::RngState;

fn main() -> voting_bounds::Result<()> {
    let rng = RngState::new(2);
    let full = gen_krkp_like(800, &rng)?;
    let (train, test) = split(&full, 0.5, &rng)?;
    let f = adaboost(&train, 100)?.final_combination()?;
    let out = optimize_combination(&f, &train, 0.1)?;
    let g = &out.combination;

    for it in &out.result.trace {
        println!(
            "iteration {}: C_min {:.4}  C {:.4}  |S-| {}  |Sl| {}  |S0| {}  cost {:.4}",
            it.iteration, it.c_min, it.c, it.s_minus, it.s_l, it.s_0, it.margin_cost
        );
    }
    println!("status {:?}", out.result.status);
    println!(
        "margin cost  {:.4} -> {:.4}",
        out.result.initial_cost, out.result.final_cost
    );
    println!(
        "test error   {:.4} -> {:.4}",
        evaluate(&f, &test)?.1,
        evaluate(g, &test)?.1
    );
    let (before, after) = (
        WeightSpectrum::from_combination(&f),
        WeightSpectrum::from_combination(g),
    );
    for cut in [0.0, 0.01, 0.05, 0.1] {
        println!(
            "d(f; {cut:4}) {:3} -> {:3}",
            delta_dimension(&before, cut),
            delta_dimension(&after, cut)
        );
    }
    Ok(())
}
