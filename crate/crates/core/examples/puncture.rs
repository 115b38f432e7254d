//! Puncturing a square code down to the rectangular one built directly.

use rankforge::circulant::{std_block_puncture, SpaceModel, SpaceParams};
use rankforge::codes::{build_twisted, puncture_code, CODEWORD_BUDGET};

fn main() -> rankforge::error::Result<()> {
    let sq = SpaceModel::new(SpaceParams::new(3, 6, 6, 1)?)?;
    let rect = SpaceModel::with_field(&sq.field, SpaceParams::new(3, 3, 6, 1)?)?;
    let mu = sq.field.subfield_primitive(3, 6)?;
    let square = build_twisted(&sq, 1, mu, 1)?;
    let block = std_block_puncture(&sq, &rect)?;
    let punctured = puncture_code(&square, &block, 1)?;
    let direct = build_twisted(&rect, 1, mu, 1)?;
    println!(
        "square code: {}x{}, {} codewords",
        square.rows(),
        square.cols(),
        square.size()
    );
    println!(
        "punctured:   {}x{}, {} codewords",
        punctured.rows(),
        punctured.cols(),
        punctured.size()
    );
    let same = punctured.codeword_set(CODEWORD_BUDGET)? == direct.codeword_set(CODEWORD_BUDGET)?;
    println!("equal to the directly built code: {same}");
    Ok(())
}
