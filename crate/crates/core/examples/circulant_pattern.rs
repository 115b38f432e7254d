use rankforge::circulant::{expand, pattern, CircSpec, SpaceParams};

fn main() -> rankforge::error::Result<()> {
    for (q, m, n, k) in [(2u64, 2u32, 6u32, 1u32), (2, 4, 6, 5)] {
        let params = SpaceParams::new(q, m, n, k)?;
        println!("(q, m, n, k) = ({q}, {m}, {n}, {k}), entry a_l^(q^e):");
        for row in pattern(m, n) {
            let cells: Vec<String> = row
                .iter()
                .map(|&(l, sigma)| format!("a{l}^q^{:<2}", (k * sigma) % params.d()))
                .collect();
            println!("  {}", cells.join(" "));
        }
        let field = params.ambient_field()?;
        let units = field.subfield_units(q, params.d())?;
        let gen = units.iter().take(params.e() as usize).copied().collect();
        let mat = expand(&field, &CircSpec { params, gen })?;
        println!("  a sample expansion has rank {}", mat.rank());
    }
    Ok(())
}
