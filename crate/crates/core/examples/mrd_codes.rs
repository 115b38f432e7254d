use rankforge::circulant::{SpaceModel, SpaceParams};
use rankforge::codes::{build_phi, build_twisted, rank_distribution, verify_mrd, CODEWORD_BUDGET};
use rankforge::FEl;

fn main() -> rankforge::error::Result<()> {
    let md = SpaceModel::new(SpaceParams::new(2, 3, 6, 1)?)?;
    let phi = build_phi(&md, 2)?;
    let rep = verify_mrd(&phi, CODEWORD_BUDGET)?;
    println!(
        "phi(2,3,6,2): {} codewords, d = {:?}, mrd {}",
        rep.size, rep.min_distance, rep.is_mrd
    );
    println!(
        "rank distribution {:?}",
        rank_distribution(&phi, CODEWORD_BUDGET)?
    );

    let sq = SpaceModel::new(SpaceParams::new(3, 3, 3, 1)?)?;
    let h = build_twisted(&sq, 1, FEl::ONE, 2)?;
    let rep = verify_mrd(&h, CODEWORD_BUDGET)?;
    println!(
        "twisted (3,3,1,2), mu = 1: {} codewords, d = {:?}",
        rep.size, rep.min_distance
    );

    let big = SpaceModel::new(SpaceParams::new(3, 6, 12, 1)?)?;
    let h = build_twisted(&big, 1, big.field.generator(), 3)?;
    let rep = verify_mrd(&h, CODEWORD_BUDGET)?;
    println!(
        "twisted (3,6,12,1,3), mu = g: {} codewords, d = {:?}",
        rep.size, rep.min_distance
    );
    Ok(())
}
