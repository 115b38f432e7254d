//! Automorphism groups of `Φ` and of the twisted codes: membership
//! predicates, closed-form orders, a brute-force oracle over `Aut(Ω_{m,n})`,
//! the inequivalence certificate and a structured equivalence search.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circulant::{tprime_embed, tprime_invertible, SpaceModel, SpaceParams};
use crate::codes::{build_twisted, mu_is_valid, Code, Span};
use crate::error::{Error, Result};
use crate::field::{gcd, pow_mod, FEl};
use crate::forms::{to_std, AutTriple, StdAut};
use crate::fq::{gl_order, FqMat, GlEnum, SmallField};

/// Default cap on `|GL(m,q)|·|GL(n,q)|·h` (doubled with the transpose coset).
pub const ORACLE_BUDGET: u128 = 1 << 30;
/// Default cap on enumerated triples or candidate assignments.
pub const SEARCH_BUDGET: u128 = 1 << 32;

fn divides(p: SpaceParams) -> Result<u32> {
    p.r()
        .ok_or_else(|| Error::BadParameters(format!("m = {} does not divide n = {}", p.m, p.n)))
}

/// `m | n` and `1 <= t <= m-1`; returns `r = n/m`.
pub fn check_phi(p: SpaceParams, t_code: u32) -> Result<u32> {
    let r = divides(p)?;
    if t_code == 0 || t_code >= p.m {
        return Err(Error::BadParameters(format!(
            "t = {t_code} must lie in 1..={}",
            p.m.saturating_sub(1)
        )));
    }
    Ok(r)
}

/// `s ≡ 0, ±1, ±2 (mod m)`.
fn excluded_residue(s: u32, m: u32) -> bool {
    let x = s % m;
    x <= 2 || x + 2 >= m
}

/// Parameter conditions under which the automorphisms of `H_{m,n,t,μ,s}` are determined.
pub fn check_twisted(model: &SpaceModel, t_code: u32, mu: FEl, s: u32) -> Result<()> {
    let p = model.params;
    check_phi(p, t_code)?;
    if p.m == p.n {
        if t_code + 2 > p.n {
            return Err(Error::BadParameters(format!(
                "square case needs 1 <= t <= n-2, got t = {t_code}, n = {}",
                p.n
            )));
        }
    } else {
        if p.m <= 5 {
            return Err(Error::ConstraintUnsatisfiable(format!(
                "every s is 0, ±1 or ±2 mod m = {}",
                p.m
            )));
        }
        if t_code + 2 > p.m {
            return Err(Error::BadParameters(format!(
                "t = {t_code} must lie in 1..={}",
                p.m - 2
            )));
        }
        if excluded_residue(s, p.m) {
            return Err(Error::BadParameters(format!(
                "s = {s} is 0, ±1 or ±2 mod {}",
                p.m
            )));
        }
    }
    if !model.field.in_subfield(mu, p.q, p.n) || !mu_is_valid(model, mu, t_code)? {
        return Err(Error::BadParameters(format!(
            "μ is not in F_{{q^{}}} or has norm (-1)^(nt)",
            p.n
        )));
    }
    Ok(())
}

/// `q^j mod (q^n - 1)`.
fn qpow(q: u64, n: u32, j: i64) -> u64 {
    pow_mod(q, j.rem_euclid(n as i64) as u64, q.pow(n) - 1)
}

/// `q^a - q^b mod (q^n - 1)`.
fn qdiff(q: u64, n: u32, a: i64, b: i64) -> u64 {
    let o = q.pow(n) - 1;
    (qpow(q, n, a) + o - qpow(q, n, b)) % o
}

fn phi_shape(model: &SpaceModel, t: &AutTriple) -> bool {
    let p = model.params;
    let f = &model.field;
    if t.transpose || t.left.len() != p.m as usize || t.right.len() != p.n as usize {
        return false;
    }
    let a = t.left[0];
    if a.is_zero() || !f.in_subfield(a, p.q, p.m) || t.left[1..].iter().any(|x| !x.is_zero()) {
        return false;
    }
    let off_support = t.right.iter().enumerate().any(|(j, &x)| {
        (!(j as u32).is_multiple_of(p.m) && !x.is_zero()) || !f.in_subfield(x, p.q, p.n)
    });
    if off_support {
        return false;
    }
    let c: Vec<FEl> = t.right.iter().step_by(p.m as usize).copied().collect();
    tprime_invertible(f, &c, p.q, p.m, p.k)
}

/// Membership in `(S × T') ⋊ C ⋊ Aut(F_q)`: left array `(a,0,...,0)` with
/// `a ∈ F_{q^m}^×`, right array supported on multiples of `m` and invertible.
pub fn phi_aut_predicate(model: &SpaceModel, t: &AutTriple, t_code: u32) -> Result<bool> {
    check_phi(model.params, t_code)?;
    Ok(phi_shape(model, t))
}

/// `μ a^{q^{sk}-1} b^{(q^{sk}-q^{kt}) q^{-khm}} = μ^{p^e q^{ki} q^{-khm}}` at slot `h`.
#[allow(clippy::too_many_arguments)]
fn slot_equation(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
    a: FEl,
    b: FEl,
    i: u32,
    e: u32,
    slot: u32,
) -> bool {
    let p = model.params;
    let f = &model.field;
    let k = p.k as i64;
    let sk = s as i64 * k;
    let kt = k * t_code as i64;
    let khm = k * (slot * p.m) as i64;
    let fr = |x: FEl, j: i64| f.frobenius(x, p.q, j);
    let a_part = f.mul(fr(a, sk), f.inv(a).expect("a ≠ 0"));
    let b_part = f.mul(fr(b, sk - khm), f.inv(fr(b, kt - khm)).expect("b ≠ 0"));
    let lhs = f.mul(mu, f.mul(a_part, b_part));
    let rhs = fr(
        f.frobenius(mu, f.characteristic(), e as i64),
        k * i as i64 - khm,
    );
    lhs == rhs
}

/// Membership in `Aut(H_{m,n,t,μ,s})`: the `Φ` shape plus the slot equation
/// for every nonzero `b_{hm}`.
pub fn h_aut_predicate(
    model: &SpaceModel,
    t: &AutTriple,
    t_code: u32,
    mu: FEl,
    s: u32,
) -> Result<bool> {
    check_twisted(model, t_code, mu, s)?;
    if !phi_shape(model, t) {
        return Ok(false);
    }
    let m = model.params.m as usize;
    Ok(t.right
        .iter()
        .step_by(m)
        .enumerate()
        .filter(|(_, b)| !b.is_zero())
        .all(|(slot, &b)| {
            slot_equation(
                model,
                mu,
                s,
                t_code,
                t.left[0],
                b,
                t.shift,
                t.frob,
                slot as u32,
            )
        }))
}

/// `|G_{n,k}| = (q^n-1)/(q^{gcd(n,k)}-1)`.
pub fn g_order(q: u64, n: u32, k: u32) -> u64 {
    (q.pow(n) - 1) / (q.pow(gcd(n as u64, k as u64) as u32) - 1)
}

/// `c_{n,k,j} = |G_{n,k} ∩ G_{n,j}|`.
pub fn c_order(q: u64, n: u32, k: u32, j: u32) -> u64 {
    gcd(g_order(q, n, k), g_order(q, n, j))
}

/// `d_{n,k,j} = (q^n-1)(q^{gcd(n,k,j)}-1)`.
pub fn d_count(q: u64, n: u32, k: u32, j: u32) -> u64 {
    let g = gcd(gcd(n as u64, k as u64), j as u64) as u32;
    (q.pow(n) - 1) * (q.pow(g) - 1)
}

/// `|S|·|T'|·|C|·|Aut(F_q)| = (q^m-1)·|GL(r,q^m)|·m·h`.
pub fn phi_order(p: SpaceParams) -> Result<u128> {
    let r = divides(p)?;
    let qm = p.q.pow(p.m);
    Ok((qm as u128 - 1) * gl_order(r as usize, qm) * p.m as u128 * p.h() as u128)
}

/// `l = |{r ∈ Z_{nh} : μ^{p^r-1} ∈ ⟨w^{gcd(q^n-1, q^{sk}-1, q^{sk}-q^{kt})}⟩}|`.
pub fn ell(model: &SpaceModel, mu: FEl, s: u32, t_code: u32) -> u64 {
    let p = model.params;
    let f = &model.field;
    let order = p.q.pow(p.n) - 1;
    let k = p.k as i64;
    let sk = s as i64 * k;
    let g0 = gcd(
        gcd(order, qdiff(p.q, p.n, sk, 0)),
        qdiff(p.q, p.n, sk, k * t_code as i64),
    );
    let step = f.mult_order() / order;
    let lmu = mu.log().expect("μ ≠ 0") as u64 / step;
    (0..(p.n * p.h()) as u64)
        .filter(|&r| {
            let pr = pow_mod(f.characteristic(), r, order);
            let ex = lmu as u128 * ((pr + order - 1) % order) as u128 % order as u128;
            (ex as u64).is_multiple_of(g0)
        })
        .count() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factors {
    pub l: u64,
    pub q_n_minus_1: u64,
    pub q_gcd_minus_1: u64,
}

/// `l (q^n-1)(q^{gcd(n,s,t)}-1)` for the square twisted code.
pub fn square_closed_form(model: &SpaceModel, mu: FEl, s: u32, t_code: u32) -> (u128, Factors) {
    let p = model.params;
    let g = gcd(gcd(p.n as u64, s as u64), t_code as u64) as u32;
    let factors = Factors {
        l: ell(model, mu, s, t_code),
        q_n_minus_1: p.q.pow(p.n) - 1,
        q_gcd_minus_1: p.q.pow(g) - 1,
    };
    let total = factors.l as u128 * factors.q_n_minus_1 as u128 * factors.q_gcd_minus_1 as u128;
    (total, factors)
}

/// Counts of automorphisms from the predicate, the oracle and the closed
/// form. Counts are of distinct standard tuples, not of triples.
#[derive(Clone, Debug, Serialize)]
pub struct AutReport {
    pub predicate_count: u128,
    pub oracle_count: Option<u128>,
    pub closed_form: Option<u128>,
    pub factors: Option<Factors>,
    pub agreement: bool,
}

impl AutReport {
    pub fn new(
        predicate_count: u128,
        oracle_count: Option<u128>,
        closed_form: Option<u128>,
        factors: Option<Factors>,
    ) -> AutReport {
        let agreement = oracle_count.is_none_or(|o| o == predicate_count)
            && closed_form.is_none_or(|c| c == predicate_count);
        AutReport {
            predicate_count,
            oracle_count,
            closed_form,
            factors,
            agreement,
        }
    }
}

fn triple(model: &SpaceModel, a: FEl, c: &[FEl], i: u32, e: u32) -> Result<AutTriple> {
    let p = model.params;
    let mut left = vec![FEl::ZERO; p.m as usize];
    left[0] = a;
    Ok(AutTriple {
        left,
        right: tprime_embed(c, p.m, p.n)?,
        shift: i,
        frob: e,
        transpose: false,
    })
}

/// All `c ∈ F_{q^n}^r` with invertible spread array.
fn invertible_tprime(model: &SpaceModel, budget: u128) -> Result<Vec<Vec<FEl>>> {
    let p = model.params;
    let r = divides(p)? as usize;
    let elems = model.field.subfield_elements(p.q, p.n)?;
    let total = (elems.len() as u128)
        .checked_pow(r as u32)
        .unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded {
            requested: total,
            budget,
        });
    }
    let options = vec![elems[1..].to_vec(); r];
    let mut out = Vec::new();
    for_each_invertible(model, &options, |c| {
        out.push(c.to_vec());
        true
    });
    Ok(out)
}

/// Every predicate-true triple of `Aut(Φ)` with `i ∈ Z_n`, `e ∈ Z_h`.
pub fn phi_predicate_triples(
    model: &SpaceModel,
    t_code: u32,
    budget: u128,
) -> Result<Vec<AutTriple>> {
    let p = model.params;
    check_phi(p, t_code)?;
    let cs = invertible_tprime(model, budget)?;
    let units = model.field.subfield_units(p.q, p.m)?;
    let total = units.len() as u128 * cs.len() as u128 * (p.n * p.h()) as u128;
    if total > budget {
        return Err(Error::BudgetExceeded {
            requested: total,
            budget,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    for i in 0..p.n {
        for e in 0..p.h() {
            for &a in &units {
                for c in &cs {
                    out.push(triple(model, a, c, i, e)?);
                }
            }
        }
    }
    Ok(out)
}

/// Predicate count and closed form for `Aut(Φ_{m,n,t})`.
pub fn phi_report(model: &SpaceModel, t_code: u32, budget: u128) -> Result<AutReport> {
    let p = model.params;
    let r = check_phi(p, t_code)?;
    let cs = invertible_tprime(model, budget)?.len() as u128;
    let triples = (p.q.pow(p.m) as u128 - 1) * cs * (p.n * p.h()) as u128;
    Ok(AutReport::new(
        triples / r as u128,
        None,
        Some(phi_order(p)?),
        None,
    ))
}

/// Nonzero solutions of the slot equations at fixed `(a, i, e)`, raised to
/// `q^{khm}`: `b^{q^{sk}-q^{kt}} = μ^{p^e q^{ki} - q^{khm}} a^{1-q^{sk}}`.
fn slot_solutions(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
    a: FEl,
    i: u32,
    e: u32,
) -> Result<Vec<Vec<FEl>>> {
    let p = model.params;
    let f = &model.field;
    let k = p.k as i64;
    let sk = s as i64 * k;
    let nexp = qdiff(p.q, p.n, sk, k * t_code as i64);
    let mu_pi = f.frobenius(
        f.frobenius(mu, f.characteristic(), e as i64),
        p.q,
        k * i as i64,
    );
    let a_part = f.div(a, f.frobenius(a, p.q, sk))?;
    (0..p.n / p.m)
        .map(|h| {
            let shifted = f.frobenius(mu, p.q, k * (h * p.m) as i64);
            let rhs = f.mul(f.div(mu_pi, shifted)?, a_part);
            f.solve_power_equation(p.q, p.n, nexp, rhs)
        })
        .collect()
}

/// Visits every invertible assignment taking slot `h` from `options[h]` or
/// zero; stops early when `visit` returns false.
fn for_each_invertible(
    model: &SpaceModel,
    options: &[Vec<FEl>],
    mut visit: impl FnMut(&[FEl]) -> bool,
) {
    let p = model.params;
    let choices: Vec<Vec<FEl>> = options
        .iter()
        .map(|o| {
            std::iter::once(FEl::ZERO)
                .chain(o.iter().copied())
                .collect()
        })
        .collect();
    let r = choices.len();
    let mut idx = vec![0usize; r];
    let mut cur = vec![FEl::ZERO; r];
    loop {
        for h in 0..r {
            cur[h] = choices[h][idx[h]];
        }
        if cur.iter().any(|x| !x.is_zero())
            && tprime_invertible(&model.field, &cur, p.q, p.m, p.k)
            && !visit(&cur)
        {
            return;
        }
        let mut h = 0;
        loop {
            if h == r {
                return;
            }
            idx[h] += 1;
            if idx[h] < choices[h].len() {
                break;
            }
            idx[h] = 0;
            h += 1;
        }
    }
}

fn count_invertible(model: &SpaceModel, options: &[Vec<FEl>]) -> u128 {
    let mut n = 0u128;
    for_each_invertible(model, options, |_| {
        n += 1;
        true
    });
    n
}

/// Every predicate-true triple of `Aut(H)` with `i ∈ Z_n`, `e ∈ Z_h`,
/// ordered by `(i, e, a)`.
pub fn h_predicate_triples(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
    budget: u128,
) -> Result<Vec<AutTriple>> {
    check_twisted(model, t_code, mu, s)?;
    let p = model.params;
    let units = model.field.subfield_units(p.q, p.m)?;
    let mut out = Vec::new();
    for i in 0..p.n {
        for e in 0..p.h() {
            for &a in &units {
                let options = slot_solutions(model, mu, s, t_code, a, i, e)?;
                let mut err = None;
                for_each_invertible(model, &options, |c| match triple(model, a, c, i, e) {
                    Ok(t) => {
                        out.push(t);
                        out.len() as u128 <= budget
                    }
                    Err(x) => {
                        err = Some(x);
                        false
                    }
                });
                if let Some(x) = err {
                    return Err(x);
                }
                if out.len() as u128 > budget {
                    return Err(Error::BudgetExceeded {
                        requested: out.len() as u128,
                        budget,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Square case: loops over all `(a, b, i, e)` and tests
/// `μ a^{q^{sk}-1} b^{q^{sk}-q^{kt}} = μ^{p^e q^{ki}}` directly.
fn square_loop_count(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
    budget: u128,
) -> Result<u128> {
    let p = model.params;
    let f = &model.field;
    let order = p.q.pow(p.n) - 1;
    let work = order as u128 * order as u128 * (p.n * p.h()) as u128;
    if work > budget {
        return Err(Error::BudgetExceeded {
            requested: work,
            budget,
        });
    }
    let k = p.k as i64;
    let sk = s as i64 * k;
    let x = qdiff(p.q, p.n, sk, 0);
    let y = qdiff(p.q, p.n, sk, k * t_code as i64);
    let units = f.subfield_units(p.q, p.n)?;
    let ax: Vec<FEl> = units.iter().map(|&a| f.pow_pre(a, x)).collect();
    let by: Vec<FEl> = units.iter().map(|&b| f.pow_pre(b, y)).collect();
    let targets: Vec<FEl> = (0..p.n)
        .flat_map(|i| (0..p.h()).map(move |e| (i, e)))
        .map(|(i, e)| {
            f.frobenius(
                f.frobenius(mu, f.characteristic(), e as i64),
                p.q,
                k * i as i64,
            )
        })
        .collect();
    Ok(ax
        .par_iter()
        .map(|&av| {
            let lead = f.mul(mu, av);
            let mut n = 0u128;
            for &bv in &by {
                let lhs = f.mul(lead, bv);
                n += targets.iter().filter(|&&t| t == lhs).count() as u128;
            }
            n
        })
        .sum())
}

fn punctured_triple_count(model: &SpaceModel, mu: FEl, s: u32, t_code: u32) -> Result<u128> {
    let p = model.params;
    let units = model.field.subfield_units(p.q, p.m)?;
    let counts: Vec<u128> = units
        .par_iter()
        .map(|&a| -> Result<u128> {
            let mut n = 0;
            for i in 0..p.n {
                for e in 0..p.h() {
                    n += count_invertible(model, &slot_solutions(model, mu, s, t_code, a, i, e)?);
                }
            }
            Ok(n)
        })
        .collect::<Result<_>>()?;
    Ok(counts.into_iter().sum())
}

/// Order of `Aut(H_{m,n,t,μ,s})` by enumeration: the exhaustive
/// `(a, b, i, e)` loop when `m = n`, slot-wise solutions otherwise.
pub fn count_h_aut(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
    budget: u128,
) -> Result<AutReport> {
    check_twisted(model, t_code, mu, s)?;
    let p = model.params;
    if p.m == p.n {
        let count = square_loop_count(model, mu, s, t_code, budget)?;
        let (closed, factors) = square_closed_form(model, mu, s, t_code);
        Ok(AutReport::new(count, None, Some(closed), Some(factors)))
    } else {
        let triples = punctured_triple_count(model, mu, s, t_code)?;
        Ok(AutReport::new(
            triples / (p.n / p.m) as u128,
            None,
            None,
            None,
        ))
    }
}

/// Standard tuples of a list of triples, deduplicated.
pub fn std_set(model: &SpaceModel, triples: &[AutTriple]) -> Result<BTreeSet<StdAut>> {
    let v: Vec<StdAut> = triples
        .par_iter()
        .map(|t| to_std(model, t))
        .collect::<Result<_>>()?;
    Ok(v.into_iter().collect())
}

/// Whether `aut` maps every generator into `target`.
pub fn preserves(aut: &StdAut, gens: &[FqMat], target: &Span, sf: &SmallField) -> bool {
    gens.iter().all(|g| target.contains(&aut.apply(g, sf).data))
}

enum Membership {
    Bits(Vec<u64>),
    Span(Span),
}

impl Membership {
    fn new(gens: &[FqMat], sf: &SmallField) -> Membership {
        let cells = gens.first().map_or(0, |g| g.data.len());
        let q = sf.q();
        let space = (q as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
        let size = (q as u128)
            .checked_pow(gens.len() as u32)
            .unwrap_or(u128::MAX);
        if space > 1 << 24 || size > 1 << 20 {
            return Membership::Span(Span::new(gens, sf));
        }
        let mut words = vec![vec![0u8; cells]];
        for g in gens {
            let base = words.len();
            for c in 1..q as u8 {
                for w in 0..base {
                    let v: Vec<u8> = words[w]
                        .iter()
                        .zip(&g.data)
                        .map(|(&x, &y)| sf.add(x, sf.mul(c, y)))
                        .collect();
                    words.push(v);
                }
            }
        }
        let mut bits = vec![0u64; (space as usize).div_ceil(64)];
        for w in &words {
            let code = encode(w, q) as usize;
            bits[code / 64] |= 1 << (code % 64);
        }
        Membership::Bits(bits)
    }

    fn contains(&self, data: &[u8], q: u64) -> bool {
        match self {
            Membership::Bits(bits) => {
                let code = encode(data, q) as usize;
                bits[code / 64] >> (code % 64) & 1 == 1
            }
            Membership::Span(s) => s.contains(data),
        }
    }
}

fn encode(v: &[u8], q: u64) -> u64 {
    v.iter().fold(0u64, |acc, &d| acc * q + d as u64)
}

fn mul_into(x: &FqMat, y: &FqMat, sf: &SmallField, out: &mut [u8]) {
    for i in 0..x.rows {
        for j in 0..y.cols {
            let mut acc = 0u8;
            for l in 0..x.cols {
                acc = sf.add(acc, sf.mul(x.data[i * x.cols + l], y.data[l * y.cols + j]));
            }
            out[i * y.cols + j] = acc;
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub tuples: Vec<StdAut>,
    pub transpose_tuples: Vec<StdAut>,
    pub examined: u128,
}

/// Every `(A, B, e)` in `GL(m,q) × GL(n,q) × Z_h` whose action maps each
/// generator into the code, plus the transpose coset when requested.
pub fn brute_force_aut(code: &Code, include_transpose: bool, budget: u128) -> Result<OracleResult> {
    let sf = &code.sf;
    let q = sf.q();
    let (m, n) = (code.rows(), code.cols());
    if include_transpose && m != n {
        return Err(Error::TransposeOnRectangular);
    }
    let h = sf.h();
    let examined =
        gl_order(m, q) * gl_order(n, q) * h as u128 * if include_transpose { 2 } else { 1 };
    if examined > budget {
        return Err(Error::BudgetExceeded {
            requested: examined,
            budget,
        });
    }
    let left: Vec<FqMat> = GlEnum::with_budget(sf, m, budget)?.collect();
    let right: Vec<FqMat> = GlEnum::with_budget(sf, n, budget)?.collect();
    let member = Membership::new(&code.gens, sf);
    let member_t = include_transpose.then(|| {
        let tg: Vec<FqMat> = code.gens.iter().map(|g| g.transpose()).collect();
        Membership::new(&tg, sf)
    });
    let frobbed: Vec<Vec<FqMat>> = (0..h)
        .map(|e| code.gens.iter().map(|g| g.frob(e, sf)).collect())
        .collect();
    let found: Vec<(Vec<StdAut>, Vec<StdAut>)> = left
        .par_iter()
        .map(|a| {
            let at = a.transpose();
            let mut plain = Vec::new();
            let mut flipped = Vec::new();
            let mut buf = vec![0u8; m * n];
            for (e, gens) in frobbed.iter().enumerate() {
                let pre: Vec<FqMat> = gens.iter().map(|g| at.mul(g, sf)).collect();
                for b in &right {
                    let mut ok = true;
                    let mut ok_t = member_t.is_some();
                    for g in &pre {
                        mul_into(g, b, sf, &mut buf);
                        ok = ok && member.contains(&buf, q);
                        if let Some(mt) = &member_t {
                            ok_t = ok_t && mt.contains(&buf, q);
                        }
                        if !ok && !ok_t {
                            break;
                        }
                    }
                    let mk = |transpose| StdAut {
                        a: a.clone(),
                        b: b.clone(),
                        e: e as u32,
                        transpose,
                    };
                    if ok {
                        plain.push(mk(false));
                    }
                    if ok_t {
                        flipped.push(mk(true));
                    }
                }
            }
            (plain, flipped)
        })
        .collect();
    let mut tuples: Vec<StdAut> = Vec::new();
    let mut transpose_tuples: Vec<StdAut> = Vec::new();
    for (p, t) in found {
        tuples.extend(p);
        transpose_tuples.extend(t);
    }
    tuples.sort();
    transpose_tuples.sort();
    Ok(OracleResult {
        tuples,
        transpose_tuples,
        examined,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InequivalenceCertificate {
    pub c: u64,
    pub r: u32,
    pub b_subgroup_size: u128,
    pub bound: u128,
    pub gabidulin_floor: u128,
    pub verdict: bool,
}

/// Bounds the subgroup `B` of automorphisms with `a = 1`, `i = e = 0` by
/// `q^{cr}-1` with `c = gcd(n, sk-t)`, below the `q^n-1` every generalized
/// Gabidulin code has.
pub fn inequivalence_certificate(
    model: &SpaceModel,
    mu: FEl,
    s: u32,
    t_code: u32,
) -> Result<InequivalenceCertificate> {
    let p = model.params;
    let r = divides(p)?;
    if p.m <= 5 {
        return Err(Error::BadParameters(format!(
            "every s is 0, ±1 or ±2 mod m = {}",
            p.m
        )));
    }
    if excluded_residue(s, p.m) {
        return Err(Error::BadParameters(format!(
            "s = {s} is 0, ±1 or ±2 mod {}",
            p.m
        )));
    }
    match check_twisted(model, t_code, mu, s) {
        Err(Error::ConstraintUnsatisfiable(msg)) => return Err(Error::BadParameters(msg)),
        other => other?,
    }
    let diff = (s as i64 * p.k as i64 - t_code as i64).unsigned_abs();
    let c = gcd(p.n as u64, diff);
    if c >= p.m as u64 {
        return Err(Error::BadParameters(format!(
            "gcd(n, sk - t) = {c} is not below m = {}",
            p.m
        )));
    }
    let options = slot_solutions(model, mu, s, t_code, FEl::ONE, 0, 0)?;
    let b_subgroup_size = count_invertible(model, &options);
    let q = p.q as u128;
    let bound = q.pow(c as u32 * r) - 1;
    let gabidulin_floor = q.pow(p.n) - 1;
    Ok(InequivalenceCertificate {
        c,
        r,
        b_subgroup_size,
        bound,
        gabidulin_floor,
        verdict: b_subgroup_size <= bound && bound < gabidulin_floor,
    })
}

/// Orbits of `h ↦ h + j` on `Z_r`, the one through 0 first.
fn cycles(r: u32, j: u32) -> Vec<Vec<usize>> {
    let mut seen = vec![false; r as usize];
    let mut out = Vec::new();
    for h0 in 0..r as usize {
        if seen[h0] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = h0;
        while !seen[h] {
            seen[h] = true;
            cyc.push(h);
            h = (h + j as usize) % r as usize;
        }
        out.push(cyc);
    }
    out
}

/// Assignments to one cycle of `b_h = γ_h b_{h-j}^{q^T}`; each is a list of
/// values in cycle order. Zero is last for the cycle through 0, first otherwise.
fn cycle_assignments(
    model: &SpaceModel,
    cyc: &[usize],
    gammas: &[FEl],
    tau: i64,
    through_zero: bool,
) -> Result<Vec<Vec<FEl>>> {
    let p = model.params;
    let f = &model.field;
    let len = cyc.len();
    let mut coefs = vec![(FEl::ONE, 0i64)];
    let mut coef = FEl::ONE;
    let mut z = 0i64;
    for c in 1..=len {
        coef = f.mul(gammas[cyc[c % len]], f.frobenius(coef, p.q, tau));
        z += tau;
        if c < len {
            coefs.push((coef, z));
        }
    }
    let nexp = qdiff(p.q, p.n, z, 0);
    let mut sols = f.solve_power_equation(p.q, p.n, nexp, f.inv(coef)?)?;
    sols.sort_by_key(|x| x.log());
    let mut out: Vec<Vec<FEl>> = sols
        .into_iter()
        .map(|x| {
            coefs
                .iter()
                .map(|&(cf, zc)| f.mul(cf, f.frobenius(x, p.q, zc)))
                .collect()
        })
        .collect();
    let zero = vec![FEl::ZERO; len];
    if through_zero {
        out.push(zero);
    } else {
        out.insert(0, zero);
    }
    Ok(out)
}

/// Looks for a triple mapping `H_{m,n,t,μ,s}` onto `H_{m,n,t,ν,u}`. Needs
/// `s ≡ u + jm (mod n)`; then for each `(i, e, a)` the slots obey
/// `μ^{p^e q^{ki-khm}} a b_{hm}^{q^{kt-khm}} = ν a^{q^{uk}} b_{(h-j)m}^{q^{uk-k(h-j)m}}`.
/// Any witness found is verified by applying it to the generators.
#[allow(clippy::too_many_arguments)]
pub fn h_equivalence_search(
    model: &SpaceModel,
    t_code: u32,
    mu: FEl,
    s: u32,
    nu: FEl,
    u: u32,
    budget: u128,
) -> Result<Option<AutTriple>> {
    check_twisted(model, t_code, mu, s)?;
    check_twisted(model, t_code, nu, u)?;
    let p = model.params;
    let f = &model.field;
    let (m, n) = (p.m, p.n);
    let r = n / m;
    let diff = (s as i64 - u as i64).rem_euclid(n as i64) as u32;
    if !diff.is_multiple_of(m) {
        return Ok(None);
    }
    let j = diff / m;
    let from = build_twisted(model, t_code, mu, s)?;
    let target = build_twisted(model, t_code, nu, u)?.span();
    let k = p.k as i64;
    let kt = k * t_code as i64;
    let tau = k * (u as i64 + (j * m) as i64 - t_code as i64);
    let orbits = cycles(r, j);
    let units = f.subfield_units(p.q, m)?;
    let mut tried = 0u128;
    for i in 0..n {
        for e in 0..p.h() {
            let mu_pi = f.frobenius(
                f.frobenius(mu, f.characteristic(), e as i64),
                p.q,
                k * i as i64,
            );
            for &a in &units {
                let d = f.mul(nu, f.frobenius(a, p.q, u as i64 * k));
                let gammas = (0..r)
                    .map(|h| {
                        let khm = k * (h * m) as i64;
                        let ch = f.mul(f.frobenius(mu_pi, p.q, -khm), a);
                        Ok(f.frobenius(f.div(d, ch)?, p.q, khm - kt))
                    })
                    .collect::<Result<Vec<FEl>>>()?;
                let per_cycle = orbits
                    .iter()
                    .enumerate()
                    .map(|(ci, cyc)| cycle_assignments(model, cyc, &gammas, tau, ci == 0))
                    .collect::<Result<Vec<_>>>()?;
                if per_cycle.iter().any(|o| o.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; per_cycle.len()];
                let mut b = vec![FEl::ZERO; r as usize];
                'assign: loop {
                    tried += 1;
                    if tried > budget {
                        return Err(Error::BudgetExceeded {
                            requested: tried,
                            budget,
                        });
                    }
                    for (ci, cyc) in orbits.iter().enumerate() {
                        for (pos, &h) in cyc.iter().enumerate() {
                            b[h] = per_cycle[ci][idx[ci]][pos];
                        }
                    }
                    if b.iter().any(|x| !x.is_zero()) && tprime_invertible(f, &b, p.q, m, p.k) {
                        let t = triple(model, a, &b, i, e)?;
                        let s_aut = to_std(model, &t)?;
                        if preserves(&s_aut, &from.gens, &target, &model.sf) {
                            return Ok(Some(t));
                        }
                    }
                    let mut c = 0;
                    loop {
                        if c == idx.len() {
                            break 'assign;
                        }
                        idx[c] += 1;
                        if idx[c] < per_cycle[c].len() {
                            break;
                        }
                        idx[c] = 0;
                        c += 1;
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Tries `samples` uniformly random elements of `Aut(Ω_{m,n})` (transpose
/// included when square) and returns one mapping `from` into `to`, if any.
pub fn sample_equivalence(
    from: &Code,
    to: &Code,
    samples: usize,
    seed: u64,
) -> Result<Option<StdAut>> {
    let sf = &from.sf;
    let (m, n) = (from.rows(), from.cols());
    if (to.rows(), to.cols()) != (m, n) {
        return Err(Error::DimensionMismatch(
            "codes live in different spaces".into(),
        ));
    }
    let target = to.span();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_gl = |rng: &mut ChaCha8Rng, dim: usize| loop {
        let mut x = FqMat::zeros(dim, dim);
        for v in x.data.iter_mut() {
            *v = rng.gen_range(0..sf.q()) as u8;
        }
        if x.rank(sf) == dim {
            return x;
        }
    };
    for _ in 0..samples {
        let a = random_gl(&mut rng, m);
        let b = random_gl(&mut rng, n);
        let (e, flip) = (rng.gen_range(0..sf.h()), rng.gen::<bool>());
        let aut = StdAut {
            a,
            b,
            e,
            transpose: m == n && flip,
        };
        if preserves(&aut, &from.gens, &target, sf) {
            return Ok(Some(aut));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_phi, std_gen};
    use crate::field::make_field;

    fn model(q: u64, m: u32, n: u32, k: u32) -> SpaceModel {
        SpaceModel::new(SpaceParams::new(q, m, n, k).unwrap()).unwrap()
    }

    fn big() -> SpaceModel {
        model(3, 6, 12, 1)
    }

    #[test]
    fn phi_identity_and_shift() {
        let md = model(2, 2, 4, 1);
        let id = AutTriple::identity(md.params);
        assert!(phi_aut_predicate(&md, &id, 1).unwrap());
        let mut t = id.clone();
        t.left = vec![FEl::ZERO, FEl::ONE];
        assert!(!phi_aut_predicate(&md, &t, 1).unwrap());
        let mut t = id.clone();
        t.right[1] = FEl::ONE;
        assert!(!phi_aut_predicate(&md, &t, 1).unwrap());
        assert!(matches!(
            phi_aut_predicate(&md, &id, 2),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            phi_aut_predicate(&model(2, 3, 4, 1), &id, 1),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn phi_triples_sound_and_counted() {
        let md = model(2, 2, 4, 1);
        let code = build_phi(&md, 1).unwrap();
        let span = code.span();
        let triples = phi_predicate_triples(&md, 1, SEARCH_BUDGET).unwrap();
        assert_eq!(triples.len(), 2160);
        assert!(triples
            .iter()
            .all(|t| phi_aut_predicate(&md, t, 1).unwrap()));
        let set = std_set(&md, &triples).unwrap();
        assert_eq!(set.len(), 1080);
        assert!(set.iter().all(|a| preserves(a, &code.gens, &span, &md.sf)));
        let rep = phi_report(&md, 1, SEARCH_BUDGET).unwrap();
        assert_eq!((rep.predicate_count, rep.closed_form), (1080, Some(1080)));
        assert!(rep.agreement);
    }

    #[test]
    fn phi_oracle_matches_predicate() {
        let md = model(2, 2, 4, 1);
        let code = build_phi(&md, 1).unwrap();
        let res = brute_force_aut(&code, false, ORACLE_BUDGET).unwrap();
        assert_eq!(res.examined, 6 * 20160);
        let triples = phi_predicate_triples(&md, 1, SEARCH_BUDGET).unwrap();
        let set: Vec<StdAut> = std_set(&md, &triples).unwrap().into_iter().collect();
        assert_eq!(res.tuples, set);
    }

    #[test]
    fn oracle_on_full_space() {
        let md = model(2, 2, 2, 1);
        let code = build_phi(&md, 2).unwrap();
        let res = brute_force_aut(&code, true, ORACLE_BUDGET).unwrap();
        assert_eq!(res.tuples.len(), 36);
        assert_eq!(res.transpose_tuples.len(), 36);
        assert!(matches!(
            brute_force_aut(&code, true, 10),
            Err(Error::BudgetExceeded { .. })
        ));
        let rect = build_phi(&model(2, 2, 4, 1), 1).unwrap();
        assert!(matches!(
            brute_force_aut(&rect, true, ORACLE_BUDGET),
            Err(Error::TransposeOnRectangular)
        ));
    }

    #[test]
    fn group_orders() {
        let f = make_field(2, 4, None).unwrap();
        let image: BTreeSet<FEl> = f
            .subfield_units(2, 4)
            .unwrap()
            .iter()
            .map(|&x| f.pow_u(x, 3))
            .collect();
        assert_eq!(image.len() as u64, g_order(2, 4, 2));
        assert_eq!(g_order(2, 4, 2), 5);
        let units = f.subfield_units(2, 4).unwrap();
        let pairs = units
            .iter()
            .flat_map(|&x| units.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| f.mul(f.pow_u(x, 1), f.pow_u(y, 3)) == FEl::ONE)
            .count() as u64;
        assert_eq!(pairs, d_count(2, 4, 1, 2));
        assert_eq!(d_count(2, 4, 1, 2), 15);
        assert_eq!(c_order(2, 4, 1, 2), 5);
        assert_eq!(
            phi_order(SpaceParams::new(2, 2, 4, 1).unwrap()).unwrap(),
            1080
        );
    }

    #[test]
    fn square_count() {
        let md = model(3, 3, 3, 1);
        let rep = count_h_aut(&md, FEl::ONE, 2, 1, SEARCH_BUDGET).unwrap();
        assert_eq!(rep.predicate_count, 156);
        assert_eq!(rep.closed_form, Some(156));
        assert_eq!(
            rep.factors,
            Some(Factors {
                l: 3,
                q_n_minus_1: 26,
                q_gcd_minus_1: 2
            })
        );
        assert!(rep.agreement);
        let triples = h_predicate_triples(&md, FEl::ONE, 2, 1, SEARCH_BUDGET).unwrap();
        assert_eq!(triples.len(), 156);
    }

    #[test]
    fn square_count_identity_all_mu() {
        let md = model(3, 3, 3, 1);
        let f = &md.field;
        for mu in f.subfield_units(3, 3).unwrap() {
            if check_twisted(&md, 1, mu, 2).is_err() {
                continue;
            }
            let rep = count_h_aut(&md, mu, 2, 1, SEARCH_BUDGET).unwrap();
            assert!(rep.agreement);
            let l = rep.factors.unwrap().l;
            let nh = 3;
            let d = f.minimal_prime_subfield_degree(mu) as u64;
            assert_eq!(nh % l, 0);
            assert_eq!(l % (nh / d), 0);
            let triples = h_predicate_triples(&md, mu, 2, 1, SEARCH_BUDGET).unwrap();
            assert_eq!(triples.len() as u128, rep.predicate_count);
        }
    }

    #[test]
    fn h_identity_and_soundness_square() {
        let md = model(3, 3, 3, 1);
        let id = AutTriple::identity(md.params);
        assert!(h_aut_predicate(&md, &id, 1, FEl::ONE, 2).unwrap());
        let code = build_twisted(&md, 1, FEl::ONE, 2).unwrap();
        let span = code.span();
        let triples = h_predicate_triples(&md, FEl::ONE, 2, 1, SEARCH_BUDGET).unwrap();
        for t in &triples {
            assert!(h_aut_predicate(&md, t, 1, FEl::ONE, 2).unwrap());
            let a = to_std(&md, t).unwrap();
            assert!(preserves(&a, &code.gens, &span, &md.sf));
        }
        let set = std_set(&md, &triples).unwrap();
        let v: Vec<&StdAut> = set.iter().collect();
        for w in v.windows(2).take(60) {
            let c = w[0].then(w[1], &md.sf);
            assert!(set.contains(&c));
            assert!(set.contains(&w[0].inverse(&md.sf).unwrap()));
        }
    }

    #[test]
    fn h_predicate_rejects_non_solutions() {
        let md = model(3, 3, 3, 1);
        let mut t = AutTriple::identity(md.params);
        t.right[0] = md.field.subfield_primitive(3, 3).unwrap();
        let holds = h_aut_predicate(&md, &t, 1, FEl::ONE, 2).unwrap();
        let code = build_twisted(&md, 1, FEl::ONE, 2).unwrap();
        let a = to_std(&md, &t).unwrap();
        assert_eq!(holds, preserves(&a, &code.gens, &code.span(), &md.sf));
    }

    #[test]
    fn twisted_parameter_guards() {
        let md = model(3, 3, 3, 1);
        assert!(matches!(
            h_aut_predicate(&md, &AutTriple::identity(md.params), 2, FEl::ONE, 2),
            Err(Error::BadParameters(_))
        ));
        let md = model(3, 3, 6, 1);
        let g = md.field.generator();
        assert!(matches!(
            h_aut_predicate(&md, &AutTriple::identity(md.params), 1, g, 2),
            Err(Error::ConstraintUnsatisfiable(_))
        ));
    }

    #[test]
    fn punctured_slot_sizes() {
        let md = big();
        let g = md.field.generator();
        let units = md.field.subfield_units(3, 6).unwrap();
        for &a in units.iter().step_by(37) {
            for i in 0..12 {
                for sols in slot_solutions(&md, g, 3, 1, a, i, 0).unwrap() {
                    assert!(sols.is_empty() || sols.len() == 8);
                }
            }
        }
    }

    #[test]
    fn punctured_soundness_and_invariance() {
        let md = big();
        let f = &md.field;
        let g = f.generator();
        let wm = md.wm;
        for t_code in [1u32, 2] {
            let code = build_twisted(&md, t_code, g, 3).unwrap();
            let span = code.span();
            let mut middle = Vec::new();
            for j in 1..t_code {
                for u in 0..12 {
                    let mut arr = vec![FEl::ZERO; 6];
                    arr[j as usize] = f.pow_u(md.wn, u);
                    middle.push(std_gen(&md, &arr).unwrap());
                }
            }
            let mid_span = Span::new(&middle, &md.sf);
            let mut seen = 0;
            for (i, a) in [(0u32, FEl::ONE), (5, wm), (7, f.pow_u(wm, 100))] {
                let options = slot_solutions(&md, g, 3, t_code, a, i, 0).unwrap();
                let mut batch = Vec::new();
                for_each_invertible(&md, &options, |c| {
                    batch.push(triple(&md, a, c, i, 0).unwrap());
                    batch.len() < 4
                });
                for t in batch {
                    assert!(h_aut_predicate(&md, &t, t_code, g, 3).unwrap());
                    let s = to_std(&md, &t).unwrap();
                    assert!(preserves(&s, &code.gens, &span, &md.sf));
                    assert!(preserves(&s, &middle, &mid_span, &md.sf));
                    seen += 1;
                }
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn certificate_desk_example() {
        let md = big();
        let g = md.field.generator();
        let cert = inequivalence_certificate(&md, g, 3, 1).unwrap();
        assert_eq!((cert.c, cert.r, cert.bound), (2, 2, 80));
        assert_eq!(cert.gabidulin_floor, 531440);
        assert!(cert.b_subgroup_size <= 80 && cert.b_subgroup_size > 0);
        assert!(cert.verdict);
        assert!(matches!(
            inequivalence_certificate(&md, g, 3, 3),
            Err(Error::BadParameters(_))
        ));
        let small = model(3, 3, 6, 1);
        assert!(matches!(
            inequivalence_certificate(&small, small.field.generator(), 1, 1),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn equivalence_identity_witness() {
        let md = big();
        let g = md.field.generator();
        let w = h_equivalence_search(&md, 1, g, 3, g, 3, SEARCH_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(w, AutTriple::identity(md.params));
    }

    #[test]
    fn equivalence_witness_maps_onto() {
        let md = big();
        let f = &md.field;
        let g = f.generator();
        let nu = f.from_log(5);
        let w = h_equivalence_search(&md, 1, g, 3, nu, 9, SEARCH_BUDGET)
            .unwrap()
            .unwrap();
        let s = to_std(&md, &w).unwrap();
        let from = build_twisted(&md, 1, g, 3).unwrap();
        let to = build_twisted(&md, 1, nu, 9).unwrap();
        let image: Vec<FqMat> = from.gens.iter().map(|x| s.apply(x, &md.sf)).collect();
        let joint: Vec<FqMat> = image.iter().chain(&to.gens).cloned().collect();
        assert_eq!(Span::new(&image, &md.sf).rank(), to.dim());
        assert_eq!(Span::new(&joint, &md.sf).rank(), to.dim());
    }

    #[test]
    fn equivalence_none_and_sampled() {
        let md = big();
        let g = md.field.generator();
        assert!(h_equivalence_search(&md, 1, g, 3, g, 9, SEARCH_BUDGET)
            .unwrap()
            .is_none());
        let from = build_twisted(&md, 1, g, 3).unwrap();
        let to = build_twisted(&md, 1, g, 9).unwrap();
        assert!(sample_equivalence(&from, &to, 10_000, 7).unwrap().is_none());
        assert!(h_equivalence_search(&md, 1, g, 3, g, 4, SEARCH_BUDGET).is_err());
    }

    #[test]
    fn cycles_cover() {
        assert_eq!(cycles(4, 2), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(cycles(3, 0), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(cycles(3, 1), vec![vec![0, 1, 2]]);
    }
}
