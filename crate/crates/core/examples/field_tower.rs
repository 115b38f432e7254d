//! Subfields, relative trace and norm, and `x^(q^j - 1) = c` in F_{3^6}.

use rankforge::make_field;

fn main() -> rankforge::error::Result<()> {
    let f = make_field(3, 6, None)?;
    println!("F_{{3^6}} modulus (constant first): {:?}", f.modulus());
    let g = f.generator();
    for d in [1, 2, 3, 6] {
        println!("  |F_{{3^{d}}}| = {}", f.subfield_elements(3, d)?.len());
    }
    let x = f.pow_u(g, 17);
    println!("x = g^17 = {}", f.to_int(x));
    println!("  Tr_{{3^6/3}}(x) = {}", f.to_int(f.trace_rel(x, 3, 6)?));
    println!("  N_{{3^6/3}}(x)  = {}", f.to_int(f.norm_rel(x, 3, 6)?));
    println!("  N_{{3^6/9}}(x)  = {}", f.to_int(f.norm_rel(x, 9, 3)?));

    let y = f.pow_u(g, 5);
    for j in 1..=5 {
        let e = 3u64.pow(j) - 1;
        let none = f.solve_power_equation(3, 6, e, x)?.len();
        let some = f.solve_power_equation(3, 6, e, f.pow_u(y, e))?.len();
        println!("z^(3^{j}-1): {none} roots of g^17, {some} roots of (g^5)^(3^{j}-1)");
    }
    Ok(())
}
