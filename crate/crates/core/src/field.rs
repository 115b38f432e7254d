//! Arithmetic in a finite field `F_{p^E}` backed by exp/log/Zech tables.
//!
//! Every subfield `F_{q^M}` (with `q = p^h`, `hM | E`) lives inside the one
//! big field as the fixed points of `x -> x^{q^M}`, so there is no coercion
//! between fields: an element of `F_q` is simply an element of the big field
//! that happens to satisfy `x^q = x`.
//!
//! Nonzero elements are stored as discrete logarithms with respect to the
//! root `g` of the modulus. Serialization always goes through the canonical
//! integer `sum c_i p^i` of the polynomial coordinates, which does not depend
//! on the choice of generator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Largest field order for which tables are built.
pub const TABLE_BUDGET: u64 = 1 << 22;

/// A field element: `ZERO` or a log index in `[0, p^E - 2]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FEl(u32);

impl FEl {
    pub const ZERO: FEl = FEl(u32::MAX);
    pub const ONE: FEl = FEl(0);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == u32::MAX
    }

    /// Discrete log with respect to the field generator, `None` for zero.
    #[inline]
    pub fn log(self) -> Option<u32> {
        if self.is_zero() {
            None
        } else {
            Some(self.0)
        }
    }

    #[inline]
    pub(crate) fn from_log(l: u64) -> FEl {
        FEl(l as u32)
    }
}

pub type FieldRef = Arc<Field>;

/// JSON shape of a field description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(rename = "E")]
    pub degree: u32,
    pub modulus: Vec<u32>,
}

pub struct Field {
    p: u64,
    degree: u32,
    modulus: Vec<u32>,
    order: u64,
    /// exp[i] = canonical integer of g^i
    exp: Vec<u32>,
    /// log[v] = i with exp[i] = v (entry 0 unused)
    log: Vec<u32>,
    /// zech[i] = log(1 + g^i), u32::MAX when 1 + g^i = 0
    zech: Vec<u32>,
    neg_one: FEl,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("E", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Writes `q` as `p^h`; `None` if it is not a power of a prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut rest, mut h) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p, h))
}

/// Steps `digits <- digits * x mod f` where `f = x^E + sum modulus[i] x^i`.
fn times_x(digits: &mut [u32], modulus: &[u32], p: u32) {
    let e = digits.len();
    let top = digits[e - 1];
    for i in (1..e).rev() {
        digits[i] = digits[i - 1];
    }
    digits[0] = 0;
    if top != 0 {
        for (i, d) in digits.iter_mut().enumerate() {
            let sub = (top as u64 * modulus[i] as u64 % p as u64) as u32;
            *d = (*d + p - sub) % p;
        }
    }
}

fn digits_to_int(digits: &[u32], p: u64) -> u64 {
    digits.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
}

/// Walks the powers of `x` modulo `f`; returns the exp table when `x` has
/// multiplicative order exactly `p^E - 1`.
fn primitive_walk(p: u64, degree: u32, modulus: &[u32]) -> Option<Vec<u32>> {
    let order = p.pow(degree);
    let n = (order - 1) as usize;
    let mut exp = Vec::with_capacity(n);
    let mut digits = vec![0u32; degree as usize];
    digits[0] = 1;
    for i in 0..n {
        let v = digits_to_int(&digits, p);
        if i > 0 && v == 1 {
            return None;
        }
        exp.push(v as u32);
        times_x(&mut digits, modulus, p as u32);
    }
    (digits_to_int(&digits, p) == 1).then_some(exp)
}

/// `a * b mod f` on digit vectors, `f = x^E + sum modulus[i] x^i`.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u64) -> Vec<u32> {
    let e = modulus.len();
    let mut acc = vec![0u64; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        if x != 0 {
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] = (acc[i + j] + x as u64 * y as u64) % p;
            }
        }
    }
    for top in (e..2 * e).rev() {
        let c = acc[top];
        if c != 0 {
            acc[top] = 0;
            for (i, &m) in modulus.iter().enumerate() {
                let idx = top - e + i;
                acc[idx] = (acc[idx] + p - c * m as u64 % p) % p;
            }
        }
    }
    acc[..e].iter().map(|&v| v as u32).collect()
}

/// `x^k mod f`.
fn x_pow(k: u64, modulus: &[u32], p: u64) -> Vec<u32> {
    let e = modulus.len();
    let mut result = vec![0u32; e];
    result[0] = 1;
    let mut base = vec![0u32; e];
    if e == 1 {
        base[0] = ((p - modulus[0] as u64) % p) as u32;
    } else {
        base[1] = 1;
    }
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = poly_mulmod(&result, &base, modulus, p);
        }
        base = poly_mulmod(&base, &base, modulus, p);
        k >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether `x` has order exactly `p^E - 1` modulo `f`.
fn x_is_primitive(p: u64, degree: u32, modulus: &[u32], factors: &[u64]) -> bool {
    let n = p.pow(degree) - 1;
    let is_one = |v: &[u32]| v[0] == 1 && v[1..].iter().all(|&c| c == 0);
    is_one(&x_pow(n, modulus, p)) && factors.iter().all(|&l| !is_one(&x_pow(n / l, modulus, p)))
}

/// Remainder of `a` divided by the monic polynomial `b` (little-endian, over F_p).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=E/2`.
fn is_irreducible(modulus_full: &[u32], p: u32) -> bool {
    let degree = modulus_full.len() - 1;
    for d in 1..=degree / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                cand.push((v % p as u64) as u32);
                v /= p as u64;
            }
            cand.push(1);
            if poly_rem(modulus_full, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds `F_{p^E}`. Without a modulus, the lexicographically smallest
    /// monic primitive polynomial (by little-endian coefficient tuple) is used.
    pub fn new(p: u64, degree: u32, modulus: Option<&[u32]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if degree == 0 {
            return Err(Error::BadModulus("degree must be positive".into()));
        }
        let order = p.checked_pow(degree).filter(|&o| o <= TABLE_BUDGET).ok_or(
            Error::TableBudgetExceeded {
                order: p.saturating_pow(degree),
                budget: TABLE_BUDGET,
            },
        )?;
        let (low, exp) = match modulus {
            Some(m) => {
                if m.len() != degree as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        degree + 1,
                        m.len()
                    )));
                }
                if m[degree as usize] != 1 {
                    return Err(Error::BadModulus("modulus is not monic".into()));
                }
                if m.iter().any(|&c| c as u64 >= p) {
                    return Err(Error::BadModulus("coefficient out of range".into()));
                }
                let low = m[..degree as usize].to_vec();
                match primitive_walk(p, degree, &low) {
                    Some(exp) => (low, exp),
                    None if is_irreducible(m, p as u32) => return Err(Error::NotPrimitive),
                    None => return Err(Error::NotIrreducible(p)),
                }
            }
            None => Self::default_modulus(p, degree),
        };
        Ok(Self::from_tables(p, degree, low, exp, order))
    }

    fn default_modulus(p: u64, degree: u32) -> (Vec<u32>, Vec<u32>) {
        let e = degree as usize;
        // c0 is the most significant position of the lexicographic order
        let factors = prime_factors(p.pow(degree) - 1);
        // the norm (-1)^E c0 of a primitive root generates F_p^×
        let p_factors = prime_factors(p - 1);
        let norm_ok = |c0: u32| {
            let norm = if degree.is_multiple_of(2) {
                c0 as u64
            } else {
                (p - c0 as u64) % p
            };
            norm != 0
                && p_factors
                    .iter()
                    .all(|&l| pow_mod(norm, (p - 1) / l, p) != 1)
        };
        let mut coeffs = vec![0u32; e];
        coeffs[0] = 1;
        loop {
            if norm_ok(coeffs[0]) && x_is_primitive(p, degree, &coeffs, &factors) {
                if let Some(exp) = primitive_walk(p, degree, &coeffs) {
                    return (coeffs, exp);
                }
            }
            let mut pos = e;
            loop {
                pos -= 1;
                coeffs[pos] += 1;
                if (coeffs[pos] as u64) < p {
                    break;
                }
                coeffs[pos] = 0;
                assert!(pos > 0, "primitive polynomials always exist");
            }
        }
    }

    fn from_tables(p: u64, degree: u32, low: Vec<u32>, exp: Vec<u32>, order: u64) -> Field {
        let n = exp.len();
        let mut log = vec![u32::MAX; order as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        // 1 + g^i: add one to the constant digit
        let zech = exp
            .iter()
            .map(|&v| {
                let c0 = v as u64 % p;
                let w = v as u64 - c0 + (c0 + 1) % p;
                if w == 0 {
                    u32::MAX
                } else {
                    log[w as usize]
                }
            })
            .collect();
        let neg_one = if p == 2 {
            FEl::ONE
        } else {
            FEl((n / 2) as u32)
        };
        let mut modulus = low;
        modulus.push(1);
        Field {
            p,
            degree,
            modulus,
            order,
            exp,
            log,
            zech,
            neg_one,
        }
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Field> {
        Field::new(spec.p, spec.degree, Some(&spec.modulus))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            degree: self.degree,
            modulus: self.modulus.clone(),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Order of the multiplicative group, `p^E - 1`.
    pub fn mult_order(&self) -> u64 {
        self.order - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The root of the modulus.
    pub fn generator(&self) -> FEl {
        if self.order == 2 {
            FEl::ONE
        } else {
            FEl(1)
        }
    }

    pub fn to_int(&self, x: FEl) -> u64 {
        match x.log() {
            None => 0,
            Some(l) => self.exp[l as usize] as u64,
        }
    }

    pub fn from_int(&self, v: u64) -> Result<FEl> {
        if v >= self.order {
            return Err(Error::Parse(format!(
                "{v} is not a canonical element of a field of order {}",
                self.order
            )));
        }
        Ok(if v == 0 {
            FEl::ZERO
        } else {
            FEl(self.log[v as usize])
        })
    }

    /// The image of an integer under `Z -> F_p`.
    pub fn from_prime_field(&self, v: i64) -> FEl {
        let r = v.rem_euclid(self.p as i64) as u64;
        self.from_int(r).expect("prime-field digit is canonical")
    }

    pub fn from_log(&self, l: i64) -> FEl {
        FEl(l.rem_euclid(self.mult_order() as i64) as u32)
    }

    #[inline]
    pub fn add(&self, x: FEl, y: FEl) -> FEl {
        match (x.log(), y.log()) {
            (None, _) => y,
            (_, None) => x,
            (Some(a), Some(b)) => {
                let n = self.mult_order() as u32;
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let z = self.zech[(hi - lo) as usize];
                if z == u32::MAX {
                    FEl::ZERO
                } else {
                    let s = lo as u64 + z as u64;
                    FEl((s % n as u64) as u32)
                }
            }
        }
    }

    #[inline]
    pub fn neg(&self, x: FEl) -> FEl {
        self.mul(x, self.neg_one)
    }

    #[inline]
    pub fn sub(&self, x: FEl, y: FEl) -> FEl {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FEl, y: FEl) -> FEl {
        match (x.log(), y.log()) {
            (Some(a), Some(b)) => {
                let s = a as u64 + b as u64;
                let n = self.mult_order();
                FEl((if s >= n { s - n } else { s }) as u32)
            }
            _ => FEl::ZERO,
        }
    }

    pub fn inv(&self, x: FEl) -> Result<FEl> {
        match x.log() {
            None => Err(Error::DivisionByZero),
            Some(0) => Ok(FEl::ONE),
            Some(a) => Ok(FEl((self.mult_order() - a as u64) as u32)),
        }
    }

    pub fn div(&self, x: FEl, y: FEl) -> Result<FEl> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^k` for any integer exponent; `0^k` is 0 for `k > 0` and 1 for `k = 0`.
    pub fn pow(&self, x: FEl, k: i128) -> Result<FEl> {
        match x.log() {
            None if k > 0 => Ok(FEl::ZERO),
            None if k == 0 => Ok(FEl::ONE),
            None => Err(Error::DivisionByZero),
            Some(a) => {
                let n = self.mult_order() as i128;
                Ok(FEl(((a as i128 * k.rem_euclid(n)) % n) as u32))
            }
        }
    }

    /// `x^k` with `k` already reduced (or any `u64`), zero maps to zero.
    #[inline]
    pub fn pow_u(&self, x: FEl, k: u64) -> FEl {
        match x.log() {
            None => {
                if k == 0 {
                    FEl::ONE
                } else {
                    FEl::ZERO
                }
            }
            Some(a) => {
                let n = self.mult_order();
                let kk = k % n;
                if kk == 0 && k != 0 {
                    return FEl::ONE;
                }
                FEl(((a as u128 * kk as u128) % n as u128) as u32)
            }
        }
    }

    /// `h` with `q = p^h`. Panics if `q` is not a power of the characteristic.
    pub fn degree_of(&self, q: u64) -> u32 {
        match prime_power(q) {
            Some((p, h)) if p == self.p => h,
            _ => panic!("{q} is not a power of the characteristic {}", self.p),
        }
    }

    /// `q^j mod (p^E - 1)` for any integer `j`, reading negative `j` through
    /// the order of the `q`-Frobenius on the big field.
    pub fn q_power(&self, q: u64, j: i64) -> u64 {
        let h = self.degree_of(q) as u64;
        let ord = self.degree as u64 / gcd(self.degree as u64, h);
        let jj = j.rem_euclid(ord as i64) as u64;
        pow_mod(q, jj, self.mult_order())
    }

    /// `x^{q^j}`.
    #[inline]
    pub fn frobenius(&self, x: FEl, q: u64, j: i64) -> FEl {
        self.pow_u(x, self.q_power(q, j))
    }

    /// Multiplies a log by a precomputed exponent; the fast path for loops.
    #[inline]
    pub fn pow_pre(&self, x: FEl, reduced_exp: u64) -> FEl {
        match x.log() {
            None => FEl::ZERO,
            Some(a) => FEl(((a as u64 * reduced_exp) % self.mult_order()) as u32),
        }
    }

    /// Whether `F_{q^m}` is a subfield.
    pub fn has_subfield(&self, q: u64, m: u32) -> bool {
        let h = self.degree_of(q);
        self.degree.is_multiple_of(h * m)
    }

    /// `x ∈ F_{q^m}`, i.e. `x = 0` or `x^{q^m} = x`.
    pub fn in_subfield(&self, x: FEl, q: u64, m: u32) -> bool {
        match x.log() {
            None => true,
            Some(a) => {
                let sub = q.pow(m) - 1;
                let step = self.mult_order() / gcd(self.mult_order(), sub);
                (a as u64).is_multiple_of(step)
            }
        }
    }

    fn subfield_step(&self, q: u64, m: u32) -> Result<u64> {
        let sub = q.checked_pow(m).ok_or(Error::NoSuchSubfield(u64::MAX))?;
        if !self.has_subfield(q, m) {
            return Err(Error::NoSuchSubfield(sub));
        }
        Ok(self.mult_order() / (sub - 1))
    }

    /// Canonical primitive element `g^{(p^E-1)/(q^m-1)}` of `F_{q^m}`.
    pub fn subfield_primitive(&self, q: u64, m: u32) -> Result<FEl> {
        let step = self.subfield_step(q, m)?;
        Ok(FEl::from_log(step % self.mult_order()))
    }

    /// All elements of `F_{q^m}`: zero first, then powers of the canonical primitive.
    pub fn subfield_elements(&self, q: u64, m: u32) -> Result<Vec<FEl>> {
        let step = self.subfield_step(q, m)?;
        let count = q.pow(m) - 1;
        let mut v = Vec::with_capacity(count as usize + 1);
        v.push(FEl::ZERO);
        v.extend((0..count).map(|i| FEl::from_log(i * step)));
        Ok(v)
    }

    /// Nonzero elements of `F_{q^m}`.
    pub fn subfield_units(&self, q: u64, m: u32) -> Result<Vec<FEl>> {
        let mut v = self.subfield_elements(q, m)?;
        v.remove(0);
        Ok(v)
    }

    /// `Tr_{q^D/q}(x) = sum_{i<D} x^{q^i}`.
    pub fn trace_rel(&self, x: FEl, q: u64, d: u32) -> Result<FEl> {
        if !self.in_subfield(x, q, d) {
            return Err(Error::NotInSubfield(q.pow(d)));
        }
        Ok(self.trace_unchecked(x, q, d))
    }

    #[inline]
    pub(crate) fn trace_unchecked(&self, x: FEl, q: u64, d: u32) -> FEl {
        let mut acc = FEl::ZERO;
        let mut y = x;
        for _ in 0..d {
            acc = self.add(acc, y);
            y = self.pow_u(y, q);
        }
        acc
    }

    /// `N_{q^D/q}(x) = x^{(q^D-1)/(q-1)}`.
    pub fn norm_rel(&self, x: FEl, q: u64, d: u32) -> Result<FEl> {
        if !self.in_subfield(x, q, d) {
            return Err(Error::NotInSubfield(q.pow(d)));
        }
        Ok(self.pow_u(x, (q.pow(d) - 1) / (q - 1)))
    }

    /// All `x ∈ F_{q^n}^×` with `x^N = c`. Only `N mod (q^n - 1)` matters.
    ///
    /// One discrete-log division gives a particular solution; the rest is
    /// its coset of the `gcd(N, q^n-1)`-torsion.
    pub fn solve_power_equation(&self, q: u64, n: u32, exponent: u64, c: FEl) -> Result<Vec<FEl>> {
        let gamma_log = c.log().ok_or(Error::ZeroRightHandSide)? as u64;
        let step = self.subfield_step(q, n)?;
        if !gamma_log.is_multiple_of(step) {
            return Err(Error::NotInSubfield(q.pow(n)));
        }
        let order = q.pow(n) - 1;
        let gamma = gamma_log / step;
        let nn = exponent % order;
        let g = gcd(nn, order);
        if !gamma.is_multiple_of(g) {
            return Ok(Vec::new());
        }
        let reduced = order / g;
        let chi0 = if reduced == 1 {
            0
        } else {
            let inv = inv_mod((nn / g) % reduced, reduced).expect("coprime after division by gcd");
            ((gamma / g) as u128 * inv as u128 % reduced as u128) as u64
        };
        Ok((0..g)
            .map(|j| FEl::from_log((chi0 + j * reduced) * step % self.mult_order()))
            .collect())
    }

    /// Smallest `D` with `x ∈ F_{p^D}`.
    pub fn minimal_prime_subfield_degree(&self, x: FEl) -> u32 {
        (1..=self.degree)
            .filter(|d| self.degree.is_multiple_of(*d))
            .find(|&d| self.in_subfield(x, self.p, d))
            .unwrap_or(self.degree)
    }
}

/// Builds a shared field handle.
pub fn make_field(p: u64, degree: u32, modulus: Option<&[u32]>) -> Result<FieldRef> {
    Field::new(p, degree, modulus).map(Arc::new)
}

/// Coordinates with respect to an `F_q`-basis `beta_0..beta_{D-1}` of `F_{q^D}`.
///
/// Since coordinates are fixed by the `q`-Frobenius, `x^{q^j} = sum c_i beta_i^{q^j}`
/// for every `j`, so the coordinate vector is the inverse Moore matrix applied
/// to the conjugates of `x`.
#[derive(Clone, Debug)]
pub struct CoordMap {
    field: FieldRef,
    q: u64,
    basis: Vec<FEl>,
    moore_inv: Mat,
    q_exp: u64,
}

impl CoordMap {
    pub fn new(field: &FieldRef, basis: &[FEl], q: u64) -> Result<CoordMap> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::NotABasis);
        }
        let moore = Mat::from_fn(field, d, d, |j, i| field.frobenius(basis[i], q, j as i64));
        let moore_inv = moore.inverse().map_err(|_| Error::NotABasis)?;
        Ok(CoordMap {
            field: field.clone(),
            q,
            basis: basis.to_vec(),
            q_exp: field.q_power(q, 1),
            moore_inv,
        })
    }

    /// The power basis `1, w, ..., w^{M-1}` of the canonical primitive of `F_{q^M}`.
    pub fn power_basis(field: &FieldRef, q: u64, m: u32) -> Result<CoordMap> {
        let w = field.subfield_primitive(q, m)?;
        let basis: Vec<FEl> = (0..m).map(|i| field.pow_u(w, i as u64)).collect();
        CoordMap::new(field, &basis, q)
    }

    pub fn basis(&self) -> &[FEl] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn coords(&self, x: FEl) -> Result<Vec<FEl>> {
        let f = &self.field;
        let d = self.basis.len();
        let mut conj = Vec::with_capacity(d);
        let mut y = x;
        for _ in 0..d {
            conj.push(y);
            y = f.pow_pre(y, self.q_exp);
        }
        let out: Vec<FEl> = (0..d)
            .map(|i| {
                (0..d).fold(FEl::ZERO, |acc, j| {
                    f.add(acc, f.mul(self.moore_inv.get(i, j), conj[j]))
                })
            })
            .collect();
        if out.iter().all(|&c| f.in_subfield(c, self.q, 1)) {
            Ok(out)
        } else {
            Err(Error::NotInSpan)
        }
    }

    pub fn uncoords(&self, c: &[FEl]) -> FEl {
        let f = &self.field;
        c.iter()
            .zip(&self.basis)
            .fold(FEl::ZERO, |acc, (&ci, &b)| f.add(acc, f.mul(ci, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64, e: u32) -> FieldRef {
        make_field(p, e, None).unwrap()
    }

    #[test]
    fn prime_field_f2() {
        let k = f(2, 1);
        assert_eq!(k.order(), 2);
        assert_eq!(k.to_int(FEl::ONE), 1);
        assert_eq!(k.add(FEl::ONE, FEl::ONE), FEl::ZERO);
    }

    #[test]
    fn f4_generator_relation() {
        let k = make_field(2, 2, Some(&[1, 1, 1])).unwrap();
        let w = k.generator();
        let w2 = k.mul(w, w);
        assert_eq!(w2, k.add(w, FEl::ONE));
        // w + w^2 = 1
        assert_eq!(k.add(w, w2), FEl::ONE);
    }

    #[test]
    fn f729_generator_order() {
        let k = f(3, 6);
        let g = k.generator();
        assert_eq!(k.pow_u(g, 728), FEl::ONE);
        for d in (1..728u64).filter(|d| 728 % d == 0) {
            assert_ne!(k.pow_u(g, d), FEl::ONE, "g^{d} = 1");
        }
    }

    #[test]
    fn default_modulus_is_lexicographically_smallest() {
        // F_8: x^3 + 1 is reducible, x^3 + x^2 + 1 is the first primitive
        let k = f(2, 3);
        assert_eq!(k.modulus(), &[1, 0, 1, 1]);
        // F_9: x^2 + 1 is irreducible of order 4; x^2+x+1, x^2+2x+1, x^2+2 split
        let k9 = f(3, 2);
        assert_eq!(k9.modulus(), &[2, 1, 1]);
    }

    #[test]
    fn modulus_errors() {
        assert_eq!(Field::new(4, 2, None).unwrap_err(), Error::NonPrime(4));
        // x^2 + 1 = (x+1)^2 over F_2
        assert_eq!(
            Field::new(2, 2, Some(&[1, 0, 1])).unwrap_err(),
            Error::NotIrreducible(2)
        );
        // x^4+x^3+x^2+x+1 is irreducible over F_2 with root of order 5
        assert_eq!(
            Field::new(2, 4, Some(&[1, 1, 1, 1, 1])).unwrap_err(),
            Error::NotPrimitive
        );
        assert!(matches!(
            Field::new(2, 23, None),
            Err(Error::TableBudgetExceeded { .. })
        ));
    }

    #[test]
    fn arithmetic_laws() {
        let k = f(3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = k.from_int(rng.gen_range(1..k.order())).unwrap();
            let y = k.from_int(rng.gen_range(0..k.order())).unwrap();
            assert_eq!(k.mul(x, k.inv(x).unwrap()), FEl::ONE);
            assert_eq!(k.add(x, FEl::ZERO), x);
            assert_eq!(k.add(x, k.neg(x)), FEl::ZERO);
            assert_eq!(k.sub(k.add(x, y), y), x);
            assert_eq!(k.pow(x, -1).unwrap(), k.inv(x).unwrap());
            assert_eq!(k.pow(x, 80 + 3).unwrap(), k.pow(x, 3).unwrap());
        }
        assert_eq!(k.inv(FEl::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn addition_matches_digitwise_sum() {
        let k = f(3, 3);
        for a in 0..27u64 {
            for b in 0..27u64 {
                let mut s = 0;
                let (mut x, mut y, mut place) = (a, b, 1);
                for _ in 0..3 {
                    s += ((x % 3 + y % 3) % 3) * place;
                    x /= 3;
                    y /= 3;
                    place *= 3;
                }
                let got = k.add(k.from_int(a).unwrap(), k.from_int(b).unwrap());
                assert_eq!(k.to_int(got), s);
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let k = make_field(2, 2, Some(&[1, 1, 1])).unwrap();
        let w = k.generator();
        assert_eq!(k.frobenius(w, 2, 0), w);
        assert_eq!(k.frobenius(w, 2, 1), k.mul(w, w));
        assert_eq!(k.frobenius(w, 2, 2), w);
        assert_eq!(k.frobenius(k.frobenius(w, 2, 1), 2, -1), w);
    }

    #[test]
    fn trace_examples() {
        let k = make_field(2, 2, Some(&[1, 1, 1])).unwrap();
        assert_eq!(k.trace_rel(k.generator(), 2, 2).unwrap(), FEl::ONE);
        assert_eq!(k.trace_rel(FEl::ZERO, 2, 2).unwrap(), FEl::ZERO);
        let k16 = f(2, 4);
        assert_eq!(
            k16.trace_rel(k16.generator(), 2, 2),
            Err(Error::NotInSubfield(4))
        );
    }

    #[test]
    fn trace_surjective_on_f9() {
        let k = f(3, 2);
        let mut counts = [0usize; 3];
        for x in k.subfield_elements(3, 2).unwrap() {
            let t = k.trace_rel(x, 3, 2).unwrap();
            assert!(k.in_subfield(t, 3, 1));
            counts[k.to_int(t) as usize] += 1;
        }
        assert_eq!(counts, [3, 3, 3]);
    }

    #[test]
    fn norm_product_form_on_f9() {
        let k = f(3, 2);
        for x in k.subfield_elements(3, 2).unwrap() {
            let prod = k.mul(x, k.frobenius(x, 3, 1));
            assert_eq!(k.norm_rel(x, 3, 2).unwrap(), prod);
        }
        assert_eq!(k.norm_rel(FEl::ONE, 3, 2).unwrap(), FEl::ONE);
    }

    #[test]
    fn norm_is_one_in_characteristic_two() {
        let k = f(2, 6);
        for d in [1u32, 2, 3, 6] {
            for x in k.subfield_units(2, d).unwrap() {
                assert_eq!(k.norm_rel(x, 2, d).unwrap(), FEl::ONE);
            }
        }
    }

    #[test]
    fn subfield_primitive_examples() {
        let k = f(2, 4);
        let w = k.subfield_primitive(2, 2).unwrap();
        assert_eq!(w.log(), Some(5));
        assert_eq!(k.add(k.add(k.mul(w, w), w), FEl::ONE), FEl::ZERO);
        assert_eq!(k.subfield_primitive(2, 4).unwrap(), k.generator());
        assert_eq!(k.subfield_primitive(2, 3), Err(Error::NoSuchSubfield(8)));
        let k81 = f(3, 4);
        for m in [1u32, 2, 4] {
            let count = (0..81u64)
                .filter(|&v| k81.in_subfield(k81.from_int(v).unwrap(), 3, m))
                .count() as u64;
            assert_eq!(count, 3u64.pow(m));
        }
    }

    #[test]
    fn power_equation_examples() {
        let k = f(2, 4);
        let c = k.generator();
        assert_eq!(k.solve_power_equation(2, 4, 1, c).unwrap(), vec![c]);
        let sols = k.solve_power_equation(2, 4, 3, FEl::ONE).unwrap();
        assert_eq!(sols.len(), 3);
        for s in sols {
            assert_eq!(k.pow_u(s, 3), FEl::ONE);
        }
        assert_eq!(
            k.solve_power_equation(2, 4, 3, FEl::ZERO),
            Err(Error::ZeroRightHandSide)
        );
    }

    #[test]
    fn power_equation_matches_scan() {
        let k = f(3, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let units = k.subfield_units(3, 6).unwrap();
        for _ in 0..20 {
            let n_exp = rng.gen_range(1..2000u64);
            let c = units[rng.gen_range(0..units.len())];
            let mut got = k.solve_power_equation(3, 6, n_exp, c).unwrap();
            got.sort();
            let mut want: Vec<FEl> = units
                .iter()
                .copied()
                .filter(|&x| k.pow_u(x, n_exp) == c)
                .collect();
            want.sort();
            assert_eq!(got, want);
            let g = gcd(n_exp, 728) as usize;
            assert!(got.is_empty() || got.len() == g);
        }
    }

    #[test]
    fn coords_round_trip() {
        let k = f(2, 6);
        let cm = CoordMap::power_basis(&k, 2, 6).unwrap();
        assert_eq!(
            cm.coords(cm.basis()[0]).unwrap(),
            vec![
                FEl::ONE,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO,
                FEl::ZERO
            ]
        );
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = k.from_int(rng.gen_range(0..64)).unwrap();
            let c = cm.coords(x).unwrap();
            assert_eq!(cm.uncoords(&c), x);
        }
        let k4 = f(2, 4);
        let sub = CoordMap::power_basis(&k4, 2, 2).unwrap();
        assert_eq!(sub.coords(k4.generator()), Err(Error::NotInSpan));
        let w = k4.subfield_primitive(2, 2).unwrap();
        assert_eq!(
            CoordMap::new(&k4, &[FEl::ONE, FEl::ONE], 2).unwrap_err(),
            Error::NotABasis
        );
        // 1 + w over the basis (1, w): coordinates (1, 1)
        assert_eq!(
            sub.coords(k4.add(FEl::ONE, w)).unwrap(),
            vec![FEl::ONE, FEl::ONE]
        );
    }

    #[test]
    fn coords_over_f4_basis() {
        // basis (1, w) of F_16 over F_4: check against a direct 2x2 solve
        let k = f(2, 4);
        let w16 = k.generator();
        let cm = CoordMap::new(&k, &[FEl::ONE, w16], 4).unwrap();
        let f4 = k.subfield_elements(2, 2).unwrap();
        for &a in &f4 {
            for &b in &f4 {
                let x = k.add(a, k.mul(b, w16));
                assert_eq!(cm.coords(x).unwrap(), vec![a, b]);
            }
        }
    }
}
