//! Monte-Carlo Rademacher complexity of stumps shrinks like n^(-1/2), and
//! the margin bound built from it.

use voting_bounds::data::gen_twonorm;
use voting_bounds::doomlp::{auto_delta_grid, rademacher_margin_bound};
use voting_bounds::ensemble::{adaboost, evaluate};
use voting_bounds::margins::MarginProfile;
use voting_bounds::rng::RngState;
use voting_bounds::stumps::rademacher_complexity;

fn main() -> voting_bounds::Result<()> {
    let rng = RngState::new(9);
    let mut prev = None;
    for n in [100, 400, 1600] {
        let ds = gen_twonorm(n, 5, &rng.fork_index(n))?;
        let r = rademacher_complexity(&ds, 200, &rng)?;
        let ratio = prev
            .map(|p: f64| format!("  ratio to previous {:.3}", r.estimate / p))
            .unwrap_or_default();
        println!("n = {n:5}: {:.4} +- {:.4}{ratio}", r.estimate, r.std_error);
        prev = Some(r.estimate);
    }

    let ds = gen_twonorm(1600, 5, &rng.fork("bound"))?;
    let rad = rademacher_complexity(&ds, 200, &rng)?.estimate;
    let f = adaboost(&ds, 50)?.final_combination()?;
    let profile = MarginProfile::new(evaluate(&f, &ds)?.0)?;
    let (delta, value) = rademacher_margin_bound(&profile, rad, 1.0, &auto_delta_grid())?;
    println!("margin bound {value:.4} at delta = {delta:.2}");
    Ok(())
}
