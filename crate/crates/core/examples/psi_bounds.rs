//! Empirical psi-bounds: the power family (which reproduces the gamma-bound)
//! and the VC-type instance.

use voting_bounds::data::gen_intervals;
use voting_bounds::ensemble::{adaboost, evaluate};
use voting_bounds::margins::{
    alpha_from_gamma, empirical_psi_bound, gamma_bound, vc_psi_bound, BoundParams, MarginProfile,
    PowerPsi,
};
use voting_bounds::rng::RngState;

fn main() -> voting_bounds::Result<()> {
    let (train, _) = gen_intervals(20, 1000, &RngState::new(1))?;
    let f = adaboost(&train, 300)?.final_combination()?;
    let profile = MarginProfile::new(evaluate(&f, &train)?.0)?;
    let n = train.len();

    for gamma in [0.8, 0.9] {
        let psi = PowerPsi::new(alpha_from_gamma(gamma))?;
        let via_psi = empirical_psi_bound(&profile, &psi, &BoundParams::for_gamma(n, gamma)?)?;
        println!(
            "gamma {gamma}: power-psi bound {via_psi:.6}, gamma-bound {:.6}",
            gamma_bound(&profile, gamma)?
        );
    }
    for t in [1.0, 5.0] {
        println!(
            "VC-type bound, t = {t}: {:.4}",
            vc_psi_bound(&profile, &BoundParams::new(n, t)?)?
        );
    }
    Ok(())
}
