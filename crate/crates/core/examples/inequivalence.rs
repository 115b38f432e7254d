//! Certificate against Gabidulin codes, then structured equivalence searches.

use rankforge::aut::{
    h_equivalence_search, inequivalence_certificate, sample_equivalence, SEARCH_BUDGET,
};
use rankforge::circulant::{SpaceModel, SpaceParams};
use rankforge::codes::build_twisted;

fn main() -> rankforge::error::Result<()> {
    let md = SpaceModel::new(SpaceParams::new(3, 6, 12, 1)?)?;
    let g = md.field.generator();
    let cert = inequivalence_certificate(&md, g, 3, 1)?;
    println!(
        "c = {} |B| = {} bound = {} Gabidulin floor = {} verdict {}",
        cert.c, cert.b_subgroup_size, cert.bound, cert.gabidulin_floor, cert.verdict
    );

    for (nu, u) in [(g, 9), (md.field.pow_u(g, 5), 9)] {
        let w = h_equivalence_search(&md, 1, g, 3, nu, u, SEARCH_BUDGET)?;
        println!(
            "nu = g^{} u = {u}: witness {}",
            nu.log().unwrap_or(0),
            w.is_some()
        );
    }

    let from = build_twisted(&md, 1, g, 3)?;
    let to = build_twisted(&md, 1, g, 9)?;
    let hit = sample_equivalence(&from, &to, 200, 7)?;
    println!("200 random samples found a map: {}", hit.is_some());
    Ok(())
}
