//! Rank, inverse and null space over F_4, plus a Moore matrix.

use rankforge::linalg::moore_matrix;
use rankforge::{make_field, Mat};

fn main() -> rankforge::error::Result<()> {
    let f = make_field(2, 4, None)?;
    let g = f.generator();
    let a = Mat::from_fn(&f, 3, 3, |i, j| f.pow_u(g, (5 * i * j + i) as u64));
    println!("rank {} invertible {}", a.rank(), a.is_invertible());
    let (r, pivots) = a.rref();
    println!("rref pivots {pivots:?}, rref rank {}", r.rank());
    for v in a.left_null_space() {
        let ints: Vec<u64> = v.iter().map(|&x| f.to_int(x)).collect();
        println!("left null vector {ints:?}");
    }
    let m = moore_matrix(&f, g, 4, 2)?;
    println!(
        "Moore matrix on a power basis of F_16 over F_2: rank {}",
        m.rank()
    );
    let inv = m.inverse()?;
    assert_eq!(inv.mul(&m)?, Mat::identity(&f, 4));
    Ok(())
}
