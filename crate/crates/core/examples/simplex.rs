//! The standalone LP solver on a small transportation-style problem.

use voting_bounds::lp::{solve, StandardLp};

fn main() -> voting_bounds::Result<()> {
    // two sources (supply 3, 2), two sinks (demand 4, 1); costs per route
    let c = vec![1.0, 4.0, 2.0, 1.0];
    let a = vec![
        vec![1.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0, 0.0],
        vec![0.0, 1.0, 0.0, 1.0],
    ];
    let b = vec![3.0, 2.0, 4.0, 1.0];
    let lp = StandardLp::new(c, a, b)?;
    print!("{}", lp.to_text());
    let s = solve(&lp)?;
    println!("status {:?}, objective {}", s.status, s.objective);
    println!("x = {:?}", s.x);
    println!("basis = {:?}, pivots = {}", s.basis, s.pivots);
    Ok(())
}
