use std::time::Instant;

use rankforge::aut::{brute_force_aut, count_h_aut, phi_report, ORACLE_BUDGET, SEARCH_BUDGET};
use rankforge::circulant::{SpaceModel, SpaceParams};
use rankforge::codes::build_phi;
use rankforge::FEl;

fn main() -> rankforge::error::Result<()> {
    let md = SpaceModel::new(SpaceParams::new(2, 2, 4, 1)?)?;
    let rep = phi_report(&md, 1, SEARCH_BUDGET)?;
    println!(
        "Aut(phi(2,2,4,1)): predicate {} closed form {:?}",
        rep.predicate_count, rep.closed_form
    );
    let start = Instant::now();
    let oracle = brute_force_aut(&build_phi(&md, 1)?, false, ORACLE_BUDGET)?;
    println!(
        "  oracle {} after {} candidates ({:.2?})",
        oracle.tuples.len(),
        oracle.examined,
        start.elapsed()
    );

    let sq = SpaceModel::new(SpaceParams::new(3, 3, 3, 1)?)?;
    let rep = count_h_aut(&sq, FEl::ONE, 2, 1, SEARCH_BUDGET)?;
    println!(
        "Aut(H) at (3,3,1,2), mu = 1: count {} closed form {:?} factors {:?}",
        rep.predicate_count, rep.closed_form, rep.factors
    );
    Ok(())
}
