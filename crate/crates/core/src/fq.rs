//! Table-driven arithmetic in a small base field `F_q` and byte matrices
//! over it. These are the workhorses of the exhaustive scans.

use crate::error::{Error, Result};
use crate::field::{FEl, FieldRef};
use crate::linalg::Mat;

/// Default cap on group orders handed out by [`gl_enumerate`].
pub const GL_BUDGET: u128 = 1 << 28;

/// `F_q` with elements indexed `0..q` in canonical-integer order, so index 0
/// is zero and index 1 is one.
#[derive(Clone, Debug)]
pub struct SmallField {
    field: FieldRef,
    q: u64,
    h: u32,
    elems: Vec<FEl>,
    /// index of g^(step*i), by i
    idx_of_unit: Vec<u8>,
    step: u64,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    /// frob[e][x] = x^{p^e}
    frob: Vec<Vec<u8>>,
}

impl SmallField {
    pub fn new(field: &FieldRef, q: u64) -> Result<SmallField> {
        if q > 256 {
            return Err(Error::BadParameters(format!(
                "base field of order {q} is too large"
            )));
        }
        let h = field.degree_of(q);
        let mut elems = field.subfield_elements(q, 1)?;
        elems.sort_by_key(|&x| field.to_int(x));
        let step = field.mult_order() / (q - 1);
        let mut idx_of_unit = vec![0u8; (q - 1) as usize];
        for (i, &x) in elems.iter().enumerate().skip(1) {
            idx_of_unit[(x.log().unwrap() as u64 / step) as usize] = i as u8;
        }
        let mut sf = SmallField {
            field: field.clone(),
            q,
            h,
            elems,
            idx_of_unit,
            step,
            add: Vec::new(),
            mul: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
            frob: Vec::new(),
        };
        let qs = q as usize;
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                add[a * qs + b] = sf.index(field.add(sf.elems[a], sf.elems[b]));
                mul[a * qs + b] = sf.index(field.mul(sf.elems[a], sf.elems[b]));
            }
        }
        sf.neg = (0..qs).map(|a| sf.index(field.neg(sf.elems[a]))).collect();
        sf.inv = (0..qs)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    sf.index(field.inv(sf.elems[a]).unwrap())
                }
            })
            .collect();
        sf.frob = (0..h)
            .map(|e| {
                (0..qs)
                    .map(|a| {
                        sf.index(field.frobenius(sf.elems[a], field.characteristic(), e as i64))
                    })
                    .collect()
            })
            .collect();
        sf.add = add;
        sf.mul = mul;
        Ok(sf)
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `h` with `q = p^h`.
    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn elem(&self, i: u8) -> FEl {
        self.elems[i as usize]
    }

    /// Index of an `F_q` element; panics outside `F_q`.
    #[inline]
    pub fn index(&self, x: FEl) -> u8 {
        match x.log() {
            None => 0,
            Some(l) => {
                assert!(
                    (l as u64).is_multiple_of(self.step),
                    "element is not in F_{}",
                    self.q
                );
                self.idx_of_unit[(l as u64 / self.step) as usize]
            }
        }
    }

    pub fn try_index(&self, x: FEl) -> Option<u8> {
        self.field.in_subfield(x, self.q, 1).then(|| self.index(x))
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    /// `x -> x^{p^e}`, `e` taken mod `h`.
    #[inline]
    pub fn frob(&self, e: u32, a: u8) -> u8 {
        self.frob[(e % self.h) as usize][a as usize]
    }
}

/// A matrix over [`SmallField`] stored as element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl FqMat {
    pub fn zeros(rows: usize, cols: usize) -> FqMat {
        FqMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> FqMat {
        let mut m = FqMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_mat(m: &Mat, sf: &SmallField) -> Result<FqMat> {
        let data = m
            .entries()
            .iter()
            .map(|&x| sf.try_index(x).ok_or(Error::EntryNotInField))
            .collect::<Result<Vec<_>>>()?;
        Ok(FqMat {
            rows: m.rows(),
            cols: m.cols(),
            data,
        })
    }

    pub fn to_mat(&self, sf: &SmallField) -> Mat {
        Mat::from_fn(sf.field(), self.rows, self.cols, |i, j| {
            sf.elem(self.get(i, j))
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FqMat, sf: &SmallField) -> FqMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = FqMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = sf.add(out.data[idx], sf.mul(a, other.get(l, j)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &FqMat, sf: &SmallField) -> FqMat {
        FqMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| sf.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u8, sf: &SmallField) -> FqMat {
        FqMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| sf.mul(c, a)).collect(),
        }
    }

    pub fn transpose(&self) -> FqMat {
        let mut out = FqMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn frob(&self, e: u32, sf: &SmallField) -> FqMat {
        FqMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| sf.frob(e, a)).collect(),
        }
    }

    /// In-place elimination to reduced row echelon form; returns pivot columns.
    pub fn rref_in_place(&mut self, sf: &SmallField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, pr * self.cols + j);
                }
            }
            let inv = sf.inv(self.get(r, c));
            for j in c..self.cols {
                let v = sf.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                let factor = self.get(i, c);
                if i != r && factor != 0 {
                    let nf = sf.neg(factor);
                    for j in c..self.cols {
                        let v = sf.add(self.get(i, j), sf.mul(nf, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, sf: &SmallField) -> usize {
        self.clone().rref_in_place(sf).len()
    }

    pub fn inverse(&self, sf: &SmallField) -> Result<FqMat> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let mut aug = FqMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let piv = aug.rref_in_place(sf);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut out = FqMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(out)
    }

    /// Row-major base-`q` integer, first entry most significant.
    pub fn encode(&self, q: u64) -> u64 {
        self.data.iter().fold(0u64, |acc, &d| acc * q + d as u64)
    }
}

fn decode_vec(mut v: u64, q: u64, dim: usize) -> Vec<u8> {
    let mut out = vec![0u8; dim];
    for i in (0..dim).rev() {
        out[i] = (v % q) as u8;
        v /= q;
    }
    out
}

fn encode_vec(v: &[u8], q: u64) -> u64 {
    v.iter().fold(0u64, |acc, &d| acc * q + d as u64)
}

/// Deterministic enumeration of `GL(dim, q)`. Matrices are built row by row,
/// each row chosen among the vectors outside the span of the rows above, in
/// lexicographic order; index `i` is addressable directly.
#[derive(Clone)]
pub struct GlEnum {
    sf: SmallField,
    dim: usize,
    order: u128,
    radices: Vec<u128>,
    next: u128,
}

pub fn gl_order(dim: usize, q: u64) -> u128 {
    let qd = (q as u128).pow(dim as u32);
    (0..dim).map(|i| qd - (q as u128).pow(i as u32)).product()
}

pub fn gl_enumerate(sf: &SmallField, dim: usize) -> Result<GlEnum> {
    GlEnum::with_budget(sf, dim, GL_BUDGET)
}

impl GlEnum {
    pub fn with_budget(sf: &SmallField, dim: usize, budget: u128) -> Result<GlEnum> {
        let q = sf.q();
        let order = gl_order(dim, q);
        if order > budget {
            return Err(Error::BudgetExceeded {
                requested: order,
                budget,
            });
        }
        let qd = (q as u128).pow(dim as u32);
        Ok(GlEnum {
            sf: sf.clone(),
            dim,
            order,
            radices: (0..dim).map(|i| qd - (q as u128).pow(i as u32)).collect(),
            next: 0,
        })
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    /// The matrix at position `index` of the enumeration.
    pub fn nth_matrix(&self, index: u128) -> Option<FqMat> {
        if index >= self.order {
            return None;
        }
        let sf = &self.sf;
        let q = sf.q();
        let dim = self.dim;
        let mut digits = vec![0u128; dim];
        let mut rest = index;
        for i in (0..dim).rev() {
            digits[i] = rest % self.radices[i];
            rest /= self.radices[i];
        }
        let size = q.pow(dim as u32) as usize;
        let mut in_span = vec![false; size];
        in_span[0] = true;
        let mut m = FqMat::zeros(dim, dim);
        for (i, &digit) in digits.iter().enumerate() {
            let v = (0..size)
                .filter(|&v| !in_span[v])
                .nth(digit as usize)
                .expect("digit below radix");
            let vv = decode_vec(v as u64, q, dim);
            m.data[i * dim..(i + 1) * dim].copy_from_slice(&vv);
            let current: Vec<usize> = (0..size).filter(|&s| in_span[s]).collect();
            for s in current {
                let sv = decode_vec(s as u64, q, dim);
                for c in 1..q as u8 {
                    let sum: Vec<u8> = sv
                        .iter()
                        .zip(&vv)
                        .map(|(&a, &b)| sf.add(a, sf.mul(c, b)))
                        .collect();
                    in_span[encode_vec(&sum, q) as usize] = true;
                }
            }
        }
        Some(m)
    }
}

impl Iterator for GlEnum {
    type Item = FqMat;

    fn next(&mut self) -> Option<FqMat> {
        let m = self.nth_matrix(self.next)?;
        self.next += 1;
        Some(m)
    }

    fn nth(&mut self, n: usize) -> Option<FqMat> {
        self.next += n as u128;
        self.next()
    }
}
