use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankforge::circulant::{expand, extract_circulant, CircSpec, SpaceModel, SpaceParams};
use rankforge::codes::{build_phi, min_rank_distance, CODEWORD_BUDGET};
use rankforge::forms::{
    apply_automorphism, eval_gen, eval_std, radical_and_rank, to_std, AutTriple, Form,
};
use rankforge::{make_field, FEl, FieldRef, FqMat};

const SHAPES: [(u64, u32, u32, u32); 6] = [
    (2, 2, 4, 1),
    (2, 3, 6, 1),
    (3, 2, 6, 1),
    (2, 4, 6, 5),
    (3, 3, 3, 2),
    (4, 2, 2, 1),
];

fn models() -> &'static [SpaceModel] {
    static MODELS: OnceLock<Vec<SpaceModel>> = OnceLock::new();
    MODELS.get_or_init(|| {
        SHAPES
            .iter()
            .map(|&(q, m, n, k)| SpaceModel::new(SpaceParams::new(q, m, n, k).unwrap()).unwrap())
            .collect()
    })
}

fn f3_6() -> &'static FieldRef {
    static F: OnceLock<FieldRef> = OnceLock::new();
    F.get_or_init(|| make_field(3, 6, None).unwrap())
}

fn random_gen(md: &SpaceModel, rng: &mut ChaCha8Rng) -> Vec<FEl> {
    let p = md.params;
    let elems = md.field.subfield_elements(p.q, p.d()).unwrap();
    (0..p.e())
        .map(|_| elems[rng.gen_range(0..elems.len())])
        .collect()
}

fn random_triple(md: &SpaceModel, rng: &mut ChaCha8Rng) -> AutTriple {
    let p = md.params;
    let em = md.field.subfield_elements(p.q, p.m).unwrap();
    let en = md.field.subfield_elements(p.q, p.n).unwrap();
    loop {
        let t = AutTriple {
            left: (0..p.m).map(|_| em[rng.gen_range(0..em.len())]).collect(),
            right: (0..p.n).map(|_| en[rng.gen_range(0..en.len())]).collect(),
            shift: rng.gen_range(0..p.n),
            frob: rng.gen_range(0..p.n * p.h()),
            transpose: p.m == p.n && rng.gen_bool(0.5),
        };
        if to_std(md, &t).is_ok() {
            return t;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_inverse_and_frobenius(a in 0u64..729, b in 0u64..729, j in 0i64..12) {
        let f = f3_6();
        let (x, y) = (f.from_int(a).unwrap(), f.from_int(b).unwrap());
        prop_assert_eq!(f.to_int(x), a);
        if !x.is_zero() {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), FEl::ONE);
        }
        prop_assert_eq!(f.frobenius(f.add(x, y), 3, j), f.add(f.frobenius(x, 3, j), f.frobenius(y, 3, j)));
        prop_assert_eq!(f.frobenius(f.mul(x, y), 3, j), f.mul(f.frobenius(x, 3, j), f.frobenius(y, 3, j)));
        prop_assert_eq!(f.frobenius(x, 3, 6), x);
    }

    #[test]
    fn power_equation_solutions(c in 1u64..729, j in 1u32..6) {
        let f = f3_6();
        let c = f.from_int(c).unwrap();
        let expo = 3u64.pow(j) - 1;
        for x in f.solve_power_equation(3, 6, expo, c).unwrap() {
            prop_assert_eq!(f.pow_u(x, expo), c);
        }
    }

    #[test]
    fn nu_round_trip(mi in 0usize..SHAPES.len(), seed in any::<u64>()) {
        let md = &models()[mi];
        let p = md.params;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = FqMat::zeros(p.m as usize, p.n as usize);
        for v in x.data.iter_mut() {
            *v = rng.gen_range(0..p.q) as u8;
        }
        let mat = x.to_mat(&md.sf);
        let spec = md.nu_forward(&mat).unwrap();
        prop_assert_eq!(md.nu_inverse(&spec).unwrap(), mat.clone());
        let big = expand(&md.field, &spec).unwrap();
        prop_assert_eq!(big.rank(), mat.rank());
        prop_assert_eq!(extract_circulant(&md.field, &big, p).unwrap(), spec);
    }

    #[test]
    fn generator_and_standard_agree(mi in 0usize..SHAPES.len(), seed in any::<u64>()) {
        let md = &models()[mi];
        let p = md.params;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = random_gen(md, &mut rng);
        let std = md.std_of(&gen).unwrap();
        let em = md.field.subfield_elements(p.q, p.m).unwrap();
        let en = md.field.subfield_elements(p.q, p.n).unwrap();
        for _ in 0..8 {
            let x = em[rng.gen_range(0..em.len())];
            let xp = en[rng.gen_range(0..en.len())];
            prop_assert_eq!(eval_gen(md, &gen, x, xp), eval_std(md, &std, x, xp).unwrap());
        }
        let form = Form::from_gen(p, gen);
        let (radical, rank) = radical_and_rank(md, &form).unwrap();
        prop_assert_eq!(rank, std.rank());
        prop_assert_eq!(radical.len() + rank, p.m as usize);
    }

    #[test]
    fn automorphisms_preserve_rank(mi in 0usize..SHAPES.len(), seed in any::<u64>()) {
        let md = &models()[mi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = Form::from_gen(md.params, random_gen(md, &mut rng));
        let t = random_triple(md, &mut rng);
        let image = apply_automorphism(md, &form, &t).unwrap();
        prop_assert_eq!(image.std(md).unwrap().rank(), form.std(md).unwrap().rank());
        let back = to_std(md, &t).unwrap().inverse(&md.sf).unwrap();
        let img = FqMat::from_mat(&image.std(md).unwrap(), &md.sf).unwrap();
        prop_assert_eq!(back.apply(&img, &md.sf).to_mat(&md.sf), form.std(md).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn phi_is_linear_and_mrd(mi in 0usize..SHAPES.len(), t in 1u32..4, a in any::<u64>(), b in any::<u64>()) {
        let md = &models()[mi];
        let p = md.params;
        prop_assume!(t <= p.m && p.n.is_multiple_of(p.m));
        let code = build_phi(md, t).unwrap();
        prop_assume!(code.size() <= 1 << 16);
        let (x, y) = (code.codeword(a as u128 % code.size()), code.codeword(b as u128 % code.size()));
        prop_assert!(code.contains(&x.add(&y, &md.sf)).unwrap());
        prop_assert_eq!(min_rank_distance(&code, CODEWORD_BUDGET).unwrap(), Some((p.m - t + 1) as usize));
    }
}

#[test]
fn spec_round_trip_keeps_params() {
    let md = &models()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = CircSpec {
        params: md.params,
        gen: random_gen(md, &mut rng),
    };
    let big = expand(&md.field, &spec).unwrap();
    assert_eq!(extract_circulant(&md.field, &big, md.params).unwrap(), spec);
}
