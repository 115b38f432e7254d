//! Forms on F_{2^2} x F_{2^4}: both representations, decomposition and rank.

use rankforge::circulant::{SpaceModel, SpaceParams};
use rankforge::forms::{decompose, eval_form, radical_and_rank, Form};

fn main() -> rankforge::error::Result<()> {
    let md = SpaceModel::new(SpaceParams::new(2, 2, 4, 1)?)?;
    let f = &md.field;
    let g = f.generator();
    let gen = vec![g, f.pow_u(g, 3)];
    let form = Form::from_gen(md.params, gen);
    let std = form.std(&md)?;
    println!("standard matrix rank {}", std.rank());
    let nu = md.nu_forward(&std)?;
    println!(
        "circulant generator recovered: {}",
        nu.gen == form.gen(&md)?
    );

    let x = f.subfield_primitive(2, 2)?;
    let xp = f.subfield_primitive(2, 4)?;
    println!("f(x, x') = {}", f.to_int(eval_form(&md, &form, x, xp)?));

    for (j, part) in decompose(&md, &form)?.iter().enumerate() {
        let (_, r) = radical_and_rank(&md, part)?;
        println!("component {j}: rank {r}");
    }
    Ok(())
}
