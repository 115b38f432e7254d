//! `q^k`-circulant matrices and the isomorphism `ν` between standard-basis
//! form matrices and circulant generator arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{gcd, inv_mod, lcm, make_field, prime_power, CoordMap, FEl, FieldRef};
use crate::fq::SmallField;
use crate::linalg::{k_permutation, moore_matrix, Mat};

/// Shape of the form space: `m x n` forms over `F_q` with twist `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceParams {
    pub q: u64,
    pub m: u32,
    pub n: u32,
    pub k: u32,
}

impl SpaceParams {
    pub fn new(q: u64, m: u32, n: u32, k: u32) -> Result<SpaceParams> {
        if prime_power(q).is_none() {
            return Err(Error::BadParameters(format!(
                "q = {q} is not a prime power"
            )));
        }
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::BadParameters("m, n, k must be positive".into()));
        }
        if m > n {
            return Err(Error::BadParameters(format!("m = {m} exceeds n = {n}")));
        }
        for r in [m, n] {
            if gcd(k as u64, r as u64) != 1 {
                return Err(Error::NotCoprime(k as u64, r as u64));
            }
        }
        Ok(SpaceParams { q, m, n, k })
    }

    pub fn e(&self) -> u32 {
        gcd(self.m as u64, self.n as u64) as u32
    }

    pub fn d(&self) -> u32 {
        lcm(self.m as u64, self.n as u64) as u32
    }

    /// `n / m`, when `m | n`.
    pub fn r(&self) -> Option<u32> {
        self.n.is_multiple_of(self.m).then(|| self.n / self.m)
    }

    pub fn p(&self) -> u64 {
        prime_power(self.q).unwrap().0
    }

    pub fn h(&self) -> u32 {
        prime_power(self.q).unwrap().1
    }

    /// The smallest field containing `F_{q^d}`.
    pub fn ambient_field(&self) -> Result<FieldRef> {
        make_field(self.p(), self.h() * self.d(), None)
    }
}

/// A `q^k`-circulant `m x n` matrix given by its length-`e` generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircSpec {
    pub params: SpaceParams,
    pub gen: Vec<FEl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircJson {
    pub m: u32,
    pub n: u32,
    pub k: u32,
    pub gen: Vec<u64>,
}

impl CircSpec {
    pub fn to_json(&self, field: &FieldRef) -> CircJson {
        CircJson {
            m: self.params.m,
            n: self.params.n,
            k: self.params.k,
            gen: self.gen.iter().map(|&x| field.to_int(x)).collect(),
        }
    }

    pub fn from_json(field: &FieldRef, q: u64, j: &CircJson) -> Result<CircSpec> {
        let params = SpaceParams::new(q, j.m, j.n, j.k)?;
        let gen = j
            .gen
            .iter()
            .map(|&v| field.from_int(v))
            .collect::<Result<Vec<_>>>()?;
        if gen.len() != params.e() as usize {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} for e = {}",
                gen.len(),
                params.e()
            )));
        }
        Ok(CircSpec { params, gen })
    }
}

/// `(l, σ)` for entry `(i, j)`: the entry is `a_l^{q^{kσ}}` with `σ ∈ Z_d`,
/// `l ≡ j - i (mod e)` and `σ = βm + i` where `j - i ≡ l + βm (mod n)`.
pub fn pattern_entry(m: u32, n: u32, i: u32, j: u32) -> (u32, u32) {
    let e = gcd(m as u64, n as u64) as i64;
    let (m, n, i, j) = (m as i64, n as i64, i as i64, j as i64);
    let l = (j - i).rem_euclid(e);
    let beta = (0..n / e)
        .find(|b| (j - i - l - b * m).rem_euclid(n) == 0)
        .expect("beta exists since e | j - i - l");
    (l as u32, (beta * m + i) as u32)
}

/// The full `(l, σ)` table of an `m x n` circulant.
pub fn pattern(m: u32, n: u32) -> Vec<Vec<(u32, u32)>> {
    (0..m)
        .map(|i| (0..n).map(|j| pattern_entry(m, n, i, j)).collect())
        .collect()
}

pub fn expand(field: &FieldRef, spec: &CircSpec) -> Result<Mat> {
    let p = spec.params;
    if spec.gen.len() != p.e() as usize {
        return Err(Error::DimensionMismatch(format!(
            "generator of length {} for e = {}",
            spec.gen.len(),
            p.e()
        )));
    }
    let d = p.d() as i64;
    Ok(Mat::from_fn(field, p.m as usize, p.n as usize, |i, j| {
        let (l, sigma) = pattern_entry(p.m, p.n, i as u32, j as u32);
        let exp = (p.k as i64 * sigma as i64) % d;
        field.frobenius(spec.gen[l as usize], p.q, exp)
    }))
}

/// Recovers the generator if `mat` is exactly a `q^k`-circulant of shape `params`.
pub fn extract_circulant(field: &FieldRef, mat: &Mat, params: SpaceParams) -> Result<CircSpec> {
    if mat.rows() != params.m as usize || mat.cols() != params.n as usize {
        return Err(Error::DimensionMismatch(
            "matrix shape differs from parameters".into(),
        ));
    }
    let spec = CircSpec {
        params,
        gen: mat.row(0)[..params.e() as usize].to_vec(),
    };
    if spec
        .gen
        .iter()
        .any(|&a| !field.in_subfield(a, params.q, params.d()))
    {
        return Err(Error::NotCirculant);
    }
    if &expand(field, &spec)? != mat {
        return Err(Error::NotCirculant);
    }
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reindex {
    /// `q^k`-circulant generator to the `q`-circulant generator of the same endomorphism.
    ToDickson,
    FromDickson,
}

/// Converts between `q^k`- and `q`-circulant generators of a square
/// endomorphism: `b_i = a_{ih mod r}` with `hk ≡ 1 (mod r)`.
pub fn reindex_k(gen: &[FEl], k: u64, direction: Reindex) -> Result<Vec<FEl>> {
    let r = gen.len() as u64;
    let h = inv_mod(k % r, r).ok_or(Error::NotCoprime(k, r))?;
    let factor = match direction {
        Reindex::ToDickson => h,
        Reindex::FromDickson => k % r,
    };
    Ok((0..r).map(|i| gen[(i * factor % r) as usize]).collect())
}

/// `E_r^{-1} K_r D^{(k)} K_r^{-1} E_r`, the `F_q` matrix of the endomorphism
/// with `q^k`-circulant generator `gen` (length `r`, entries in `F_{q^r}`).
pub fn dickson_to_std(field: &FieldRef, gen: &[FEl], q: u64, k: u32) -> Result<Mat> {
    let r = gen.len() as u32;
    let (e, einv, km, kminv) = dickson_frame(field, q, r, k)?;
    let d = expand(
        field,
        &CircSpec {
            params: SpaceParams::new(q, r, r, k)?,
            gen: gen.to_vec(),
        },
    )?;
    let out = einv.mul(&km)?.mul(&d)?.mul(&kminv)?.mul(&e)?;
    if !out.is_over(q) {
        return Err(Error::EntryNotInField);
    }
    Ok(out)
}

/// Inverse of [`dickson_to_std`].
pub fn std_to_dickson(field: &FieldRef, a: &Mat, q: u64, k: u32) -> Result<Vec<FEl>> {
    let r = a.rows() as u32;
    let (e, einv, km, kminv) = dickson_frame(field, q, r, k)?;
    let d = kminv.mul(&e)?.mul(a)?.mul(&einv)?.mul(&km)?;
    Ok(extract_circulant(field, &d, SpaceParams::new(q, r, r, k)?)?.gen)
}

fn dickson_frame(field: &FieldRef, q: u64, r: u32, k: u32) -> Result<(Mat, Mat, Mat, Mat)> {
    let w = field.subfield_primitive(q, r)?;
    let e = moore_matrix(field, w, r, q)?;
    let einv = e.inverse()?;
    let km = k_permutation(field, r as usize, k as u64)?;
    let kminv = km.inverse()?;
    Ok((e, einv, km, kminv))
}

/// Everything needed to move between the standard and circulant pictures of
/// `Ω_{m,n}`: Moore matrices of the canonical primitives `w_m`, `w_n`, the
/// permutations `K_m`, `K_n`, and coordinate maps on the power bases.
#[derive(Clone, Debug)]
pub struct SpaceModel {
    pub field: FieldRef,
    pub params: SpaceParams,
    pub sf: SmallField,
    pub wm: FEl,
    pub wn: FEl,
    pub coords_m: CoordMap,
    pub coords_n: CoordMap,
    /// `E_m^{-1} K_m`
    left: Mat,
    /// `E_n^{-1} K_n`
    right: Mat,
    left_inv: Mat,
    right_inv: Mat,
}

impl SpaceModel {
    pub fn new(params: SpaceParams) -> Result<SpaceModel> {
        SpaceModel::with_field(&params.ambient_field()?, params)
    }

    pub fn with_field(field: &FieldRef, params: SpaceParams) -> Result<SpaceModel> {
        let q = params.q;
        if !field.has_subfield(q, params.d()) {
            return Err(Error::NoSuchSubfield(q.saturating_pow(params.d())));
        }
        let wm = field.subfield_primitive(q, params.m)?;
        let wn = field.subfield_primitive(q, params.n)?;
        let left = moore_matrix(field, wm, params.m, q)?
            .inverse()?
            .mul(&k_permutation(field, params.m as usize, params.k as u64)?)?;
        let right = moore_matrix(field, wn, params.n, q)?
            .inverse()?
            .mul(&k_permutation(field, params.n as usize, params.k as u64)?)?;
        Ok(SpaceModel {
            field: field.clone(),
            params,
            sf: SmallField::new(field, q)?,
            wm,
            wn,
            coords_m: CoordMap::power_basis(field, q, params.m)?,
            coords_n: CoordMap::power_basis(field, q, params.n)?,
            left_inv: left.inverse()?,
            right_inv: right.inverse()?,
            left,
            right,
        })
    }

    /// `ν(M) = (E_m^{-1}K_m)^t M (E_n^{-1}K_n)`, checked to be circulant.
    pub fn nu_forward(&self, m: &Mat) -> Result<CircSpec> {
        let d = self.left.transpose().mul(m)?.mul(&self.right)?;
        extract_circulant(&self.field, &d, self.params)
    }

    pub fn nu_inverse(&self, spec: &CircSpec) -> Result<Mat> {
        let d = expand(&self.field, spec)?;
        let out = self.left_inv.transpose().mul(&d)?.mul(&self.right_inv)?;
        if !out.is_over(self.params.q) {
            return Err(Error::EntryNotInField);
        }
        Ok(out)
    }

    /// `X^t` with `M = X^t ν(M) Y`, on the `F_{q^m}` side.
    pub fn left_frame(&self) -> Mat {
        self.left_inv.transpose()
    }

    /// `Y` with `M = X^t ν(M) Y`, on the `F_{q^n}` side.
    pub fn right_frame(&self) -> &Mat {
        &self.right_inv
    }

    /// Standard matrix of the form with generator `gen`.
    pub fn std_of(&self, gen: &[FEl]) -> Result<Mat> {
        self.nu_inverse(&CircSpec {
            params: self.params,
            gen: gen.to_vec(),
        })
    }
}

/// `c_j = Σ_h a_{(j-hm) mod n}^{q^{khm}}`: the generator of `(I_m | ... | I_m) D_a`.
pub fn puncture_array(field: &FieldRef, gen: &[FEl], m: u32, q: u64, k: u32) -> Result<Vec<FEl>> {
    let n = gen.len() as u32;
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::NotDivisor(m as u64, n as u64));
    }
    let r = n / m;
    Ok((0..m)
        .map(|j| {
            (0..r).fold(FEl::ZERO, |acc, h| {
                let idx = (j as i64 - (h * m) as i64).rem_euclid(n as i64) as usize;
                field.add(acc, field.frobenius(gen[idx], q, (k * h * m) as i64))
            })
        })
        .collect())
}

/// The `m x n` block matrix `(I_m | I_m | ... | I_m)`.
pub fn identity_block(field: &FieldRef, m: usize, n: usize) -> Result<Mat> {
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::NotDivisor(m as u64, n as u64));
    }
    Ok(Mat::from_fn(field, m, n, |i, j| {
        if j % m == i {
            FEl::ONE
        } else {
            FEl::ZERO
        }
    }))
}

/// The block matrix `(I_m | ... | I_m)` of the circulant picture, carried to
/// standard coordinates: `X_m^t (I_m | ... | I_m) X_n^{-t}`.
pub fn std_block_puncture(square: &SpaceModel, rect: &SpaceModel) -> Result<Mat> {
    let (m, n) = (rect.params.m as usize, rect.params.n as usize);
    if square.params.m as usize != n || square.params.n as usize != n {
        return Err(Error::DimensionMismatch(
            "expected an n x n and an m x n model".into(),
        ));
    }
    let blk = identity_block(&rect.field, m, n)?;
    let out = rect
        .left_frame()
        .mul(&blk)?
        .mul(&square.left_frame().inverse()?)?;
    if !out.is_over(rect.params.q) {
        return Err(Error::EntryNotInField);
    }
    Ok(out)
}

/// `P^t` where column `i` of `P` holds the coordinates of `w_m^i` in the
/// power basis of `F_{q^n}`: restriction of forms to `F_{q^m} x F_{q^n}`.
pub fn restriction_matrix(rect: &SpaceModel) -> Result<Mat> {
    let f = &rect.field;
    let (m, n) = (rect.params.m as usize, rect.params.n as usize);
    let mut out = Mat::zeros(f, m, n);
    for i in 0..m {
        let c = rect.coords_n.coords(f.pow_u(rect.wm, i as u64))?;
        for (j, &x) in c.iter().enumerate() {
            out.set(i, j, x);
        }
    }
    Ok(out)
}

/// Spreads `(c_0, ..., c_{r-1})` to positions `0, m, 2m, ...` of a length-`n` array.
pub fn tprime_embed(c: &[FEl], m: u32, n: u32) -> Result<Vec<FEl>> {
    if m == 0 || !n.is_multiple_of(m) || c.len() as u32 != n / m {
        return Err(Error::NotDivisor(m as u64, n as u64));
    }
    let mut out = vec![FEl::ZERO; n as usize];
    for (i, &ci) in c.iter().enumerate() {
        out[i * m as usize] = ci;
    }
    Ok(out)
}

/// Whether the `r x r` matrix `(c_{j-i}^{Q^i})` with `Q = q^{km}` is invertible,
/// which decides invertibility of the embedded `n x n` circulant.
pub fn tprime_invertible(field: &FieldRef, c: &[FEl], q: u64, m: u32, k: u32) -> bool {
    let r = c.len();
    let step = (k * m) as i64;
    Mat::from_fn(field, r, r, |i, j| {
        field.frobenius(c[(j + r - i) % r], q, step * i as i64)
    })
    .is_invertible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_in(field: &FieldRef, q: u64, deg: u32, rng: &mut ChaCha8Rng) -> FEl {
        let elems = field.subfield_elements(q, deg).unwrap();
        elems[rng.gen_range(0..elems.len())]
    }

    #[test]
    fn zero_generator_expands_to_zero() {
        let p = SpaceParams::new(2, 2, 6, 1).unwrap();
        let f = p.ambient_field().unwrap();
        let m = expand(
            &f,
            &CircSpec {
                params: p,
                gen: vec![FEl::ZERO; 2],
            },
        )
        .unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn square_case_rule() {
        let p = SpaceParams::new(2, 4, 4, 3).unwrap();
        let f = p.ambient_field().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gen: Vec<FEl> = (0..4).map(|_| random_in(&f, 2, 4, &mut rng)).collect();
        let m = expand(
            &f,
            &CircSpec {
                params: p,
                gen: gen.clone(),
            },
        )
        .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    m.get(i, j),
                    f.frobenius(gen[(j + 4 - i) % 4], 2, 3 * i as i64)
                );
            }
        }
    }

    #[test]
    fn row_recurrence() {
        for (q, m, n, k) in [
            (2u64, 2u32, 6u32, 1u32),
            (2, 4, 6, 5),
            (3, 2, 6, 1),
            (2, 3, 6, 5),
            (2, 4, 4, 3),
        ] {
            let p = SpaceParams::new(q, m, n, k).unwrap();
            let f = p.ambient_field().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64 * 31 + n as u64);
            let gen: Vec<FEl> = (0..p.e())
                .map(|_| random_in(&f, q, p.d(), &mut rng))
                .collect();
            let mat = expand(&f, &CircSpec { params: p, gen }).unwrap();
            for i in 1..m as usize {
                for j in 0..n as usize {
                    let prev = mat.get(i - 1, (j + n as usize - 1) % n as usize);
                    assert_eq!(mat.get(i, j), f.frobenius(prev, q, k as i64));
                }
            }
        }
    }

    #[test]
    fn reindex_examples() {
        let f = make_field(2, 4, None).unwrap();
        let a: Vec<FEl> = (0..4).map(|i| f.from_log(i + 1)).collect();
        assert_eq!(reindex_k(&a, 1, Reindex::ToDickson).unwrap(), a);
        let b = reindex_k(&a, 3, Reindex::ToDickson).unwrap();
        assert_eq!(b, vec![a[0], a[3], a[2], a[1]]);
        assert_eq!(reindex_k(&b, 3, Reindex::FromDickson).unwrap(), a);
        assert_eq!(
            reindex_k(&a, 2, Reindex::ToDickson),
            Err(Error::NotCoprime(2, 4))
        );
    }

    #[test]
    fn reindex_matrix_identity() {
        let f = make_field(2, 4, None).unwrap();
        let k4 = k_permutation(&f, 4, 3).unwrap();
        let k4inv = k4.inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a: Vec<FEl> = (0..4).map(|_| random_in(&f, 2, 4, &mut rng)).collect();
            let dk = expand(
                &f,
                &CircSpec {
                    params: SpaceParams::new(2, 4, 4, 3).unwrap(),
                    gen: a.clone(),
                },
            )
            .unwrap();
            let b = reindex_k(&a, 3, Reindex::ToDickson).unwrap();
            let d1 = expand(
                &f,
                &CircSpec {
                    params: SpaceParams::new(2, 4, 4, 1).unwrap(),
                    gen: b,
                },
            )
            .unwrap();
            assert_eq!(k4.mul(&dk).unwrap().mul(&k4inv).unwrap(), d1);
        }
    }

    #[test]
    fn dickson_to_std_examples() {
        let f = make_field(2, 4, None).unwrap();
        let id = dickson_to_std(&f, &[FEl::ONE, FEl::ZERO, FEl::ZERO, FEl::ZERO], 2, 1).unwrap();
        assert_eq!(id, Mat::identity(&f, 4));
        let frob = dickson_to_std(&f, &[FEl::ZERO, FEl::ONE, FEl::ZERO, FEl::ZERO], 2, 1).unwrap();
        let mut pw = Mat::identity(&f, 4);
        for step in 1..=4 {
            pw = pw.mul(&frob).unwrap();
            assert_eq!(pw == Mat::identity(&f, 4), step == 4);
        }
    }

    #[test]
    fn dickson_to_std_is_multiplicative() {
        let f = make_field(2, 4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = SpaceParams::new(2, 4, 4, 1).unwrap();
        for _ in 0..50 {
            let a: Vec<FEl> = (0..4).map(|_| random_in(&f, 2, 4, &mut rng)).collect();
            let b: Vec<FEl> = (0..4).map(|_| random_in(&f, 2, 4, &mut rng)).collect();
            let da = expand(
                &f,
                &CircSpec {
                    params: p,
                    gen: a.clone(),
                },
            )
            .unwrap();
            let db = expand(
                &f,
                &CircSpec {
                    params: p,
                    gen: b.clone(),
                },
            )
            .unwrap();
            let prod = extract_circulant(&f, &da.mul(&db).unwrap(), p).unwrap();
            let lhs = dickson_to_std(&f, &prod.gen, 2, 1).unwrap();
            let rhs = dickson_to_std(&f, &a, 2, 1)
                .unwrap()
                .mul(&dickson_to_std(&f, &b, 2, 1).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(std_to_dickson(&f, &lhs, 2, 1).unwrap(), prod.gen);
        }
    }

    #[test]
    fn dickson_with_twist_matches_reindexed() {
        let f = make_field(2, 4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let a: Vec<FEl> = (0..4).map(|_| random_in(&f, 2, 4, &mut rng)).collect();
            let b = reindex_k(&a, 3, Reindex::ToDickson).unwrap();
            assert_eq!(
                dickson_to_std(&f, &a, 2, 3).unwrap(),
                dickson_to_std(&f, &b, 2, 1).unwrap()
            );
        }
    }

    #[test]
    fn nu_round_trip_and_rank() {
        for (q, m, n, k) in [
            (2u64, 2u32, 4u32, 1u32),
            (2, 3, 6, 1),
            (3, 2, 6, 1),
            (2, 4, 6, 5),
        ] {
            let model = SpaceModel::new(SpaceParams::new(q, m, n, k).unwrap()).unwrap();
            let f = &model.field;
            let elems = f.subfield_elements(q, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q + m as u64);
            let zero = Mat::zeros(f, m as usize, n as usize);
            assert!(model
                .nu_forward(&zero)
                .unwrap()
                .gen
                .iter()
                .all(|x| x.is_zero()));
            for _ in 0..40 {
                let mf = Mat::from_fn(f, m as usize, n as usize, |_, _| {
                    elems[rng.gen_range(0..elems.len())]
                });
                let spec = model.nu_forward(&mf).unwrap();
                assert_eq!(expand(f, &spec).unwrap().rank(), mf.rank());
                assert_eq!(model.nu_inverse(&spec).unwrap(), mf);
            }
        }
    }

    #[test]
    fn puncture_examples() {
        let f = make_field(2, 6, None).unwrap();
        let a = f.generator();
        let c = puncture_array(&f, &[a, FEl::ZERO, FEl::ZERO, FEl::ZERO], 2, 2, 1).unwrap();
        assert_eq!(c, vec![a, FEl::ZERO]);
        let b = f.from_log(7);
        let c = puncture_array(
            &f,
            &[a, b, FEl::ZERO, FEl::ZERO, FEl::ZERO, FEl::ZERO],
            3,
            2,
            1,
        )
        .unwrap();
        assert_eq!(c, vec![a, b, FEl::ZERO]);
        assert_eq!(
            puncture_array(&f, &[a; 5], 2, 2, 1),
            Err(Error::NotDivisor(2, 5))
        );
    }

    #[test]
    fn puncture_matrix_identity() {
        let params_sq = SpaceParams::new(2, 6, 6, 1).unwrap();
        let params_rect = SpaceParams::new(2, 3, 6, 1).unwrap();
        let f = params_sq.ambient_field().unwrap();
        let block = identity_block(&f, 3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a: Vec<FEl> = (0..6).map(|_| random_in(&f, 2, 6, &mut rng)).collect();
            let c = puncture_array(&f, &a, 3, 2, 1).unwrap();
            let lhs = expand(
                &f,
                &CircSpec {
                    params: params_rect,
                    gen: c,
                },
            )
            .unwrap();
            let rhs = block
                .mul(
                    &expand(
                        &f,
                        &CircSpec {
                            params: params_sq,
                            gen: a,
                        },
                    )
                    .unwrap(),
                )
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn block_puncture_is_restriction() {
        for (q, m, n, k) in [
            (2u64, 2u32, 4u32, 1u32),
            (3, 3, 6, 1),
            (2, 3, 6, 5),
            (2, 2, 6, 1),
        ] {
            let sq = SpaceModel::new(SpaceParams::new(q, n, n, k).unwrap()).unwrap();
            let rect =
                SpaceModel::with_field(&sq.field, SpaceParams::new(q, m, n, k).unwrap()).unwrap();
            assert_eq!(
                std_block_puncture(&sq, &rect).unwrap(),
                restriction_matrix(&rect).unwrap()
            );
        }
    }

    #[test]
    fn tprime_examples() {
        let f = make_field(2, 6, None).unwrap();
        assert_eq!(
            tprime_embed(&[FEl::ONE, FEl::ZERO], 3, 6).unwrap(),
            vec![
                FEl::ONE,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO
            ]
        );
        let p = SpaceParams::new(2, 6, 6, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let c1: Vec<FEl> = (0..2).map(|_| random_in(&f, 2, 6, &mut rng)).collect();
            let c2: Vec<FEl> = (0..2).map(|_| random_in(&f, 2, 6, &mut rng)).collect();
            let d1 = expand(
                &f,
                &CircSpec {
                    params: p,
                    gen: tprime_embed(&c1, 3, 6).unwrap(),
                },
            )
            .unwrap();
            let d2 = expand(
                &f,
                &CircSpec {
                    params: p,
                    gen: tprime_embed(&c2, 3, 6).unwrap(),
                },
            )
            .unwrap();
            let prod = extract_circulant(&f, &d1.mul(&d2).unwrap(), p).unwrap();
            // support stays on multiples of m
            for (i, x) in prod.gen.iter().enumerate() {
                assert!(i % 3 == 0 || x.is_zero());
            }
            assert_eq!(tprime_invertible(&f, &c1, 2, 3, 1), d1.is_invertible());
        }
    }

    #[test]
    fn tprime_invertible_count() {
        let f = make_field(2, 4, None).unwrap();
        let elems = f.subfield_elements(2, 4).unwrap();
        let p = SpaceParams::new(2, 4, 4, 1).unwrap();
        let mut count = 0;
        let mut count_full = 0;
        for &a in &elems {
            for &b in &elems {
                if tprime_invertible(&f, &[a, b], 2, 2, 1) {
                    count += 1;
                }
                let g = tprime_embed(&[a, b], 2, 4).unwrap();
                if expand(&f, &CircSpec { params: p, gen: g })
                    .unwrap()
                    .is_invertible()
                {
                    count_full += 1;
                }
            }
        }
        assert_eq!(count, 180);
        assert_eq!(count_full, 180);
    }
}
