//! Linear rank-metric codes in `Ω_{m,n}`: generalized Gabidulin codes,
//! twisted codes, evaluation codes and puncturings, with exhaustive
//! distance verification.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circulant::{SpaceModel, SpaceParams};
use crate::error::{Error, Result};
use crate::field::FEl;
use crate::fq::{FqMat, SmallField};
use crate::linalg::{moore_of, Mat};

/// Default cap on the number of codewords an exhaustive scan may visit.
pub const CODEWORD_BUDGET: u128 = 1 << 26;

#[derive(Clone, Debug)]
pub enum CodeKind {
    Phi { t: u32 },
    TwistedSquare { t: u32, mu: FEl, s: u32 },
    TwistedPunctured { t: u32, mu: FEl, s: u32 },
    GabidulinEval { g: Vec<FEl>, t: u32 },
    PuncturedBy { inner: Box<Code>, a: FqMat },
}

/// A code given by an `F_q`-basis of standard matrices.
#[derive(Clone, Debug)]
pub struct Code {
    pub kind: CodeKind,
    pub params: SpaceParams,
    pub sf: SmallField,
    pub gens: Vec<FqMat>,
}

impl Code {
    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn size(&self) -> u128 {
        (self.sf.q() as u128)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn rows(&self) -> usize {
        self.params.m as usize
    }

    pub fn cols(&self) -> usize {
        self.params.n as usize
    }

    /// Codeword with base-`q` coefficient digits of `index`, first generator most significant.
    pub fn codeword(&self, mut index: u128) -> FqMat {
        let q = self.sf.q() as u128;
        let mut out = FqMat::zeros(self.rows(), self.cols());
        for g in self.gens.iter().rev() {
            let c = (index % q) as u8;
            index /= q;
            if c != 0 {
                accumulate(&mut out, g, c, &self.sf);
            }
        }
        out
    }

    pub fn check_budget(&self, budget: u128) -> Result<()> {
        let size = self.size();
        if size > budget {
            return Err(Error::BudgetExceeded {
                requested: size,
                budget,
            });
        }
        Ok(())
    }

    /// All codewords in enumeration order.
    pub fn codewords(&self, budget: u128) -> Result<Vec<FqMat>> {
        self.check_budget(budget)?;
        Ok((0..self.size())
            .into_par_iter()
            .map(|i| self.codeword(i))
            .collect())
    }

    pub fn codeword_set(&self, budget: u128) -> Result<BTreeSet<Vec<u8>>> {
        Ok(self
            .codewords(budget)?
            .into_iter()
            .map(|c| c.data)
            .collect())
    }

    /// Reduced echelon basis of the span, for membership tests.
    pub fn span(&self) -> Span {
        Span::new(&self.gens, &self.sf)
    }

    pub fn contains(&self, m: &FqMat) -> Result<bool> {
        if m.rows != self.rows() || m.cols != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix against a code in {}x{}",
                m.rows,
                m.cols,
                self.rows(),
                self.cols()
            )));
        }
        Ok(self.span().contains(&m.data))
    }
}

#[inline]
fn accumulate(out: &mut FqMat, g: &FqMat, c: u8, sf: &SmallField) {
    for (o, &x) in out.data.iter_mut().zip(&g.data) {
        *o = sf.add(*o, sf.mul(c, x));
    }
}

/// Row-reduced spanning set with a fast membership test.
#[derive(Clone, Debug)]
pub struct Span {
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    sf: SmallField,
}

impl Span {
    pub fn new(gens: &[FqMat], sf: &SmallField) -> Span {
        let width = gens.first().map_or(0, |g| g.data.len());
        let mut m = FqMat {
            rows: gens.len(),
            cols: width,
            data: gens.iter().flat_map(|g| g.data.iter().copied()).collect(),
        };
        let pivots = m.rref_in_place(sf);
        let rows = (0..pivots.len())
            .map(|i| m.data[i * width..(i + 1) * width].to_vec())
            .collect();
        Span {
            rows,
            pivots,
            sf: sf.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let sf = &self.sf;
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                let nc = sf.neg(c);
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = sf.add(*x, sf.mul(nc, r));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }
}

fn check_divides(p: SpaceParams) -> Result<u32> {
    p.r()
        .ok_or_else(|| Error::BadParameters(format!("m = {} does not divide n = {}", p.m, p.n)))
}

/// `F_q`-basis `1, w_n, w_n^2, ...` of `F_{q^n}`.
pub fn power_basis(model: &SpaceModel) -> Vec<FEl> {
    (0..model.params.n)
        .map(|u| model.field.pow_u(model.wn, u as u64))
        .collect()
}

pub(crate) fn std_gen(model: &SpaceModel, arr: &[FEl]) -> Result<FqMat> {
    FqMat::from_mat(&model.std_of(arr)?, &model.sf)
}

/// `Φ_{m,n,t} = Ω_0 ⊕ ... ⊕ Ω_{t-1}`.
pub fn build_phi(model: &SpaceModel, t: u32) -> Result<Code> {
    let p = model.params;
    check_divides(p)?;
    if t == 0 || t > p.m {
        return Err(Error::BadParameters(format!(
            "t = {t} must lie in 1..={}",
            p.m
        )));
    }
    let mut gens = Vec::with_capacity((p.n * t) as usize);
    for j in 0..t {
        for &b in &power_basis(model) {
            let mut arr = vec![FEl::ZERO; p.e() as usize];
            arr[j as usize] = b;
            gens.push(std_gen(model, &arr)?);
        }
    }
    Ok(Code {
        kind: CodeKind::Phi { t },
        params: p,
        sf: model.sf.clone(),
        gens,
    })
}

/// Whether `N_{q^n/q}(μ) ≠ (-1)^{nt}`.
pub fn mu_is_valid(model: &SpaceModel, mu: FEl, t: u32) -> Result<bool> {
    let p = model.params;
    let f = &model.field;
    if mu.is_zero() {
        return Ok(false);
    }
    let norm = f.norm_rel(mu, p.q, p.n)?;
    let sign = if (p.n * t).is_multiple_of(2) {
        FEl::ONE
    } else {
        f.neg(FEl::ONE)
    };
    Ok(norm != sign)
}

/// `{f_{a,0} + f_{μ a^{q^{sk}}, t} : a ∈ F_{q^n}} ⊕ Ω_1 ⊕ ... ⊕ Ω_{t-1}`.
pub fn build_twisted(model: &SpaceModel, t: u32, mu: FEl, s: u32) -> Result<Code> {
    let p = model.params;
    let f = &model.field;
    check_divides(p)?;
    if t == 0 || t >= p.m {
        return Err(Error::BadParameters(format!(
            "t = {t} must lie in 1..={}",
            p.m - 1
        )));
    }
    if !f.in_subfield(mu, p.q, p.n) {
        return Err(Error::InvalidMu(format!("μ is not in F_{{q^{}}}", p.n)));
    }
    if !mu_is_valid(model, mu, t)? {
        return Err(Error::InvalidMu(format!(
            "N(μ) = (-1)^(nt) for n = {}, t = {t}, q = {}",
            p.n, p.q
        )));
    }
    let sk = (s as i64) * (p.k as i64);
    let e = p.e() as usize;
    let mut gens = Vec::with_capacity((p.n * t) as usize);
    for &b in &power_basis(model) {
        let mut arr = vec![FEl::ZERO; e];
        arr[0] = b;
        arr[t as usize] = f.mul(mu, f.frobenius(b, p.q, sk));
        gens.push(std_gen(model, &arr)?);
    }
    for j in 1..t {
        for &b in &power_basis(model) {
            let mut arr = vec![FEl::ZERO; e];
            arr[j as usize] = b;
            gens.push(std_gen(model, &arr)?);
        }
    }
    let kind = if p.m == p.n {
        CodeKind::TwistedSquare { t, mu, s }
    } else {
        CodeKind::TwistedPunctured { t, mu, s }
    };
    Ok(Code {
        kind,
        params: p,
        sf: model.sf.clone(),
        gens,
    })
}

/// Evaluation code `{(coords f(g_0), ..., coords f(g_{m-1}))}` of the linearized
/// polynomials `a_0 x + a_1 x^{q^k} + ... + a_{t-1} x^{q^{k(t-1)}}`.
pub fn gabidulin_eval(model: &SpaceModel, g: &[FEl], t: u32) -> Result<Code> {
    let p = model.params;
    let f = &model.field;
    if g.len() != p.m as usize {
        return Err(Error::DimensionMismatch(format!(
            "{} points for m = {}",
            g.len(),
            p.m
        )));
    }
    if t == 0 || t > p.m {
        return Err(Error::BadParameters(format!(
            "t = {t} must lie in 1..={}",
            p.m
        )));
    }
    if g.iter().any(|&x| !f.in_subfield(x, p.q, p.n)) || moore_of(f, g, p.q).rank() < g.len() {
        return Err(Error::NotIndependent);
    }
    let mut gens = Vec::with_capacity((p.n * t) as usize);
    for c in 0..t {
        for &b in &power_basis(model) {
            let mut out = FqMat::zeros(p.m as usize, p.n as usize);
            for (i, &gi) in g.iter().enumerate() {
                let val = f.mul(b, f.frobenius(gi, p.q, (p.k * c) as i64));
                for (j, &x) in model.coords_n.coords(val)?.iter().enumerate() {
                    out.set(i, j, model.sf.index(x));
                }
            }
            gens.push(out);
        }
    }
    Ok(Code {
        kind: CodeKind::GabidulinEval { g: g.to_vec(), t },
        params: p,
        sf: model.sf.clone(),
        gens,
    })
}

/// `(Tr_{q^n/q}(w_n^j w_n^l))`, relating evaluation codewords to form matrices.
pub fn gram_matrix(model: &SpaceModel) -> FqMat {
    let p = model.params;
    let f = &model.field;
    let mut out = FqMat::zeros(p.n as usize, p.n as usize);
    for j in 0..p.n as usize {
        for l in 0..p.n as usize {
            let x = f.pow_u(model.wn, (j + l) as u64);
            out.set(j, l, model.sf.index(f.trace_unchecked(x, p.q, p.n)));
        }
    }
    out
}

/// `{A M : M ∈ code}` for a full-rank `m x n` matrix `A`.
pub fn puncture_code(code: &Code, a: &Mat, k: u32) -> Result<Code> {
    let sf = &code.sf;
    let a = FqMat::from_mat(a, sf)?;
    if a.cols != code.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} puncturing matrix for {}x{} codewords",
            a.rows,
            a.cols,
            code.rows(),
            code.cols()
        )));
    }
    if a.rank(sf) < a.rows {
        return Err(Error::RankDeficient);
    }
    let params = SpaceParams::new(code.params.q, a.rows as u32, code.params.n, k)?;
    let gens = code.gens.iter().map(|g| a.mul(g, sf)).collect();
    Ok(Code {
        kind: CodeKind::PuncturedBy {
            inner: Box::new(code.clone()),
            a,
        },
        params,
        sf: sf.clone(),
        gens,
    })
}

/// Number of codewords of each rank `0..=m`.
pub fn rank_distribution(code: &Code, budget: u128) -> Result<Vec<u128>> {
    code.check_budget(budget)?;
    let q = code.sf.q() as u128;
    let m = code.rows();
    let mut counts = scan_projective(code, |c| c.rank(&code.sf))
        .into_iter()
        .fold(vec![0u128; m + 1], |mut acc, r| {
            acc[r] += q - 1;
            acc
        });
    counts[0] += 1;
    Ok(counts)
}

/// Minimum rank over nonzero codewords; `None` for the zero code.
pub fn min_rank_distance(code: &Code, budget: u128) -> Result<Option<usize>> {
    code.check_budget(budget)?;
    Ok(scan_projective(code, |c| c.rank(&code.sf))
        .into_iter()
        .min())
}

/// Evaluates `f` on one codeword per `F_q^×`-class (leading coefficient 1),
/// in lexicographic coefficient order, chunked in parallel.
fn scan_projective<T: Send>(code: &Code, f: impl Fn(&FqMat) -> T + Sync) -> Vec<T> {
    let dim = code.dim();
    let q = code.sf.q() as u128;
    // classes with leading coefficient at position `lead`: q^{dim-1-lead}
    (0..dim)
        .flat_map(|lead| {
            let tail = q.pow((dim - 1 - lead) as u32);
            (0..tail).map(move |i| (lead, i))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .with_min_len(256)
        .map(|(lead, i)| {
            let idx = q.pow((dim - 1 - lead) as u32) + i;
            f(&code.codeword(idx))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrdReport {
    pub size: u128,
    pub dimension: usize,
    pub min_distance: Option<usize>,
    pub singleton: Option<u128>,
    pub is_mrd: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Exhaustive distance plus the Singleton comparison `|X| = q^{n(m-s+1)}`.
pub fn verify_mrd(code: &Code, budget: u128) -> Result<MrdReport> {
    let size = code.size();
    let dist = min_rank_distance(code, budget)?;
    let (m, n) = (code.rows() as u32, code.cols() as u32);
    let singleton = dist.map(|s| (code.sf.q() as u128).pow(n * (m - s as u32 + 1)));
    Ok(MrdReport {
        size,
        dimension: code.dim(),
        min_distance: dist,
        singleton,
        is_mrd: singleton == Some(size),
        error: dist
            .is_none()
            .then(|| "zero code has no minimum distance".to_string()),
    })
}
