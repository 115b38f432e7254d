//! Dense matrices over the big field, plus helpers for Moore and permutation
//! matrices and rank factorization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{gcd, FEl, FieldRef};

#[derive(Clone)]
pub struct Mat {
    field: FieldRef,
    rows: usize,
    cols: usize,
    data: Vec<FEl>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<u64> = (0..self.cols)
                .map(|j| self.field.to_int(self.get(i, j)))
                .collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Mat {}

/// JSON shape: entries in row-major order as canonical integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

impl Mat {
    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Mat {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![FEl::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Mat {
        Mat::from_fn(
            field,
            n,
            n,
            |i, j| if i == j { FEl::ONE } else { FEl::ZERO },
        )
    }

    pub fn from_fn(
        field: &FieldRef,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FEl,
    ) -> Mat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(field: &FieldRef, rows: &[Vec<FEl>]) -> Result<Mat> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Mat {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_json(field: &FieldRef, j: &MatJson) -> Result<Mat> {
        if j.entries.len() != j.rows * j.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                j.entries.len(),
                j.rows,
                j.cols
            )));
        }
        let data = j
            .entries
            .iter()
            .map(|&v| field.from_int(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat {
            field: field.clone(),
            rows: j.rows,
            cols: j.cols,
            data,
        })
    }

    pub fn to_json(&self) -> MatJson {
        MatJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.data.iter().map(|&x| self.field.to_int(x)).collect(),
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FEl] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FEl {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FEl) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FEl] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FEl> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let f = &self.field;
        Ok(Mat {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.same_shape(other)?;
        let f = &self.field;
        Ok(Mat {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    fn same_shape(&self, other: &Mat) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: FEl) -> Mat {
        self.map(|x| self.field.mul(c, x))
    }

    pub fn map(&self, f: impl Fn(FEl) -> FEl) -> Mat {
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Applies `x -> x^{p^e}` to every entry; negative `e` inverts.
    pub fn frobenius(&self, e: i64) -> Mat {
        let p = self.field.characteristic();
        let exp = self.field.q_power(p, e);
        self.map(|x| self.field.pow_pre(x, exp))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i != r && !factor.is_zero() {
                    for j in c..m.cols {
                        let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = Mat::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else if j - n == i {
                FEl::ONE
            } else {
                FEl::ZERO
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Mat::from_fn(&self.field, n, n, |i, j| red.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of `{v : v M = 0}` as row vectors.
    pub fn left_null_space(&self) -> Vec<Vec<FEl>> {
        let f = &self.field;
        let (red, pivots) = self.transpose().rref();
        let n = self.rows;
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![FEl::ZERO; n];
                v[free] = FEl::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(red.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Whether every entry lies in `F_q`.
    pub fn is_over(&self, q: u64) -> bool {
        self.data.iter().all(|&x| self.field.in_subfield(x, q, 1))
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }
}

/// `E_r` with `(i, j)` entry `(w^j)^{q^i}`.
pub fn moore_matrix(field: &FieldRef, w: FEl, r: u32, q: u64) -> Result<Mat> {
    let order = q.pow(r) - 1;
    let is_primitive = match w.log() {
        None => false,
        Some(l) => {
            let n = field.mult_order();
            order > 0 && n.is_multiple_of(order) && gcd(l as u64, n) == n / order
        }
    };
    if !is_primitive {
        return Err(Error::ElementNotPrimitive);
    }
    let r = r as usize;
    Ok(Mat::from_fn(field, r, r, |i, j| {
        field.frobenius(field.pow_u(w, j as u64), q, i as i64)
    }))
}

/// Moore matrix of arbitrary points: `(i, j)` entry `g_j^{q^i}`.
pub fn moore_of(field: &FieldRef, points: &[FEl], q: u64) -> Mat {
    let r = points.len();
    Mat::from_fn(field, r, r, |i, j| field.frobenius(points[j], q, i as i64))
}

/// `K_r`: column `i` has its one in row `ik mod r`.
pub fn k_permutation(field: &FieldRef, r: usize, k: u64) -> Result<Mat> {
    if gcd(k % r as u64, r as u64) != 1 {
        return Err(Error::NotCoprime(k, r as u64));
    }
    let k = (k % r as u64) as usize;
    Ok(Mat::from_fn(field, r, r, |row, col| {
        if row == col * k % r {
            FEl::ONE
        } else {
            FEl::ZERO
        }
    }))
}

/// Rows of `A` completed to an invertible matrix with standard basis vectors.
fn complete_basis(a: &Mat) -> Mat {
    let f = a.field();
    let n = a.cols();
    let mut cur = a.clone();
    for j in 0..n {
        if cur.rows() == n {
            break;
        }
        let e = Mat::from_fn(f, 1, n, |_, c| if c == j { FEl::ONE } else { FEl::ZERO });
        let cand = cur.vstack(&e).expect("same width");
        if cand.rank() == cand.rows() {
            cur = cand;
        }
    }
    cur
}

/// `(S, T)` invertible with `B = S A T`, for full-row-rank `A`, `B` of the same shape.
pub fn full_rank_factorize(b: &Mat, a: &Mat) -> Result<(Mat, Mat)> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch("A and B differ in shape".into()));
    }
    let m = b.rows();
    if b.rank() != m || a.rank() != m {
        return Err(Error::RankDeficient);
    }
    let ta = complete_basis(a);
    let tb = complete_basis(b);
    let t = ta.inverse()?.mul(&tb)?;
    Ok((Mat::identity(a.field(), m), t))
}
