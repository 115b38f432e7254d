//! The space `Ω_{m,n}` of `F_q`-bilinear forms `F_{q^m} x F_{q^n} -> F_q`.
//!
//! A form with circulant generator `(a_0, ..., a_{e-1})` is
//! `f(x, x') = Σ_l Tr_{q^d/q}(a_l x x'^{q^{kl}})`, and its standard matrix has
//! entry `(u, v)` equal to `f(w_m^u, w_n^v)` for the canonical primitives.

use serde::{Deserialize, Serialize};

use crate::circulant::{CircJson, CircSpec, SpaceModel, SpaceParams};
use crate::error::{Error, Result};
use crate::field::{FEl, FieldRef};
use crate::fq::{FqMat, SmallField};
use crate::linalg::{Mat, MatJson};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    Std(Mat),
    Circ(CircSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub params: SpaceParams,
    pub repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FormJson {
    Std {
        params: SpaceParams,
        matrix: MatJson,
    },
    Circ {
        q: u64,
        circ: CircJson,
    },
}

impl Form {
    pub fn from_std(params: SpaceParams, m: Mat) -> Form {
        Form {
            params,
            repr: Repr::Std(m),
        }
    }

    pub fn from_gen(params: SpaceParams, gen: Vec<FEl>) -> Form {
        Form {
            params,
            repr: Repr::Circ(CircSpec { params, gen }),
        }
    }

    pub fn std(&self, model: &SpaceModel) -> Result<Mat> {
        match &self.repr {
            Repr::Std(m) => Ok(m.clone()),
            Repr::Circ(c) => model.nu_inverse(c),
        }
    }

    pub fn gen(&self, model: &SpaceModel) -> Result<Vec<FEl>> {
        match &self.repr {
            Repr::Std(m) => Ok(model.nu_forward(m)?.gen),
            Repr::Circ(c) => Ok(c.gen.clone()),
        }
    }

    pub fn to_json(&self, field: &FieldRef) -> FormJson {
        match &self.repr {
            Repr::Std(m) => FormJson::Std {
                params: self.params,
                matrix: m.to_json(),
            },
            Repr::Circ(c) => FormJson::Circ {
                q: self.params.q,
                circ: c.to_json(field),
            },
        }
    }

    pub fn from_json(field: &FieldRef, j: &FormJson) -> Result<Form> {
        match j {
            FormJson::Std { params, matrix } => {
                Ok(Form::from_std(*params, Mat::from_json(field, matrix)?))
            }
            FormJson::Circ { q, circ } => {
                let c = CircSpec::from_json(field, *q, circ)?;
                Ok(Form {
                    params: c.params,
                    repr: Repr::Circ(c),
                })
            }
        }
    }
}

/// The form `Tr(a x x'^{q^{kj}})`, spanning `Ω_j` as `a` runs over `F_{q^d}`.
pub fn component_form(model: &SpaceModel, a: FEl, j: u32) -> Result<Form> {
    let p = model.params;
    if j >= p.e() {
        return Err(Error::IndexOutOfRange(j as usize));
    }
    if !model.field.in_subfield(a, p.q, p.d()) {
        return Err(Error::NotInSubfield(p.q.pow(p.d())));
    }
    let mut gen = vec![FEl::ZERO; p.e() as usize];
    gen[j as usize] = a;
    Ok(Form::from_gen(p, gen))
}

/// `Σ_l Tr_{q^d/q}(a_l x x'^{q^{kl}})` for a generator array.
pub fn eval_gen(model: &SpaceModel, gen: &[FEl], x: FEl, xp: FEl) -> FEl {
    let f = &model.field;
    let p = model.params;
    gen.iter().enumerate().fold(FEl::ZERO, |acc, (l, &a)| {
        let inner = f.mul(f.mul(a, x), f.frobenius(xp, p.q, (p.k as usize * l) as i64));
        f.add(acc, f.trace_unchecked(inner, p.q, p.d()))
    })
}

pub fn eval_form(model: &SpaceModel, form: &Form, x: FEl, xp: FEl) -> Result<FEl> {
    let p = model.params;
    let f = &model.field;
    if !f.in_subfield(x, p.q, p.m) {
        return Err(Error::NotInSubfield(p.q.pow(p.m)));
    }
    if !f.in_subfield(xp, p.q, p.n) {
        return Err(Error::NotInSubfield(p.q.pow(p.n)));
    }
    match &form.repr {
        Repr::Circ(c) => Ok(eval_gen(model, &c.gen, x, xp)),
        Repr::Std(m) => eval_std(model, m, x, xp),
    }
}

/// `coords(x)^t M coords(x')`.
pub fn eval_std(model: &SpaceModel, m: &Mat, x: FEl, xp: FEl) -> Result<FEl> {
    let f = &model.field;
    let cx = model.coords_m.coords(x)?;
    let cy = model.coords_n.coords(xp)?;
    let mut acc = FEl::ZERO;
    for (u, &a) in cx.iter().enumerate() {
        for (v, &b) in cy.iter().enumerate() {
            acc = f.add(acc, f.mul(f.mul(a, m.get(u, v)), b));
        }
    }
    Ok(acc)
}

/// Standard matrix computed straight from the field model.
pub fn std_from_eval(model: &SpaceModel, gen: &[FEl]) -> Mat {
    let f = &model.field;
    let p = model.params;
    Mat::from_fn(f, p.m as usize, p.n as usize, |u, v| {
        eval_gen(
            model,
            gen,
            f.pow_u(model.wm, u as u64),
            f.pow_u(model.wn, v as u64),
        )
    })
}

/// The unique components `f = Σ_j f_j` with `f_j ∈ Ω_j`.
pub fn decompose(model: &SpaceModel, form: &Form) -> Result<Vec<Form>> {
    let gen = form.gen(model)?;
    let e = gen.len();
    Ok((0..e)
        .map(|j| {
            let mut g = vec![FEl::ZERO; e];
            g[j] = gen[j];
            Form::from_gen(model.params, g)
        })
        .collect())
}

/// Left radical `{v : v M_f = 0}` and `rank = m - dim Rad(f)`.
pub fn radical_and_rank(model: &SpaceModel, form: &Form) -> Result<(Vec<Vec<FEl>>, usize)> {
    let m = form.std(model)?;
    let rad = m.left_null_space();
    let rank = m.rows() - rad.len();
    Ok((rad, rank))
}

/// `L_a(x) = Σ_c a_c x^{q^{kc}}`.
pub fn eval_linearized(field: &FieldRef, a: &[FEl], x: FEl, q: u64, k: u32) -> FEl {
    a.iter().enumerate().fold(FEl::ZERO, |acc, (c, &ac)| {
        field.add(
            acc,
            field.mul(ac, field.frobenius(x, q, (k as usize * c) as i64)),
        )
    })
}

/// A candidate automorphism `((D_a, D_b); ℓ^i; p^e)`, optionally followed by
/// the transpose. It acts as `f ↦ f'(L_a x, L_b x')` where `f'` is `f` with
/// every generator entry raised to `q^{ki} p^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutTriple {
    pub left: Vec<FEl>,
    pub right: Vec<FEl>,
    pub shift: u32,
    pub frob: u32,
    pub transpose: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutTripleJson {
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub shift: u32,
    pub frob: u32,
    #[serde(default)]
    pub transpose: bool,
}

impl AutTriple {
    pub fn identity(params: SpaceParams) -> AutTriple {
        let mut left = vec![FEl::ZERO; params.m as usize];
        left[0] = FEl::ONE;
        let mut right = vec![FEl::ZERO; params.n as usize];
        right[0] = FEl::ONE;
        AutTriple {
            left,
            right,
            shift: 0,
            frob: 0,
            transpose: false,
        }
    }

    pub fn to_json(&self, field: &FieldRef) -> AutTripleJson {
        AutTripleJson {
            left: self.left.iter().map(|&x| field.to_int(x)).collect(),
            right: self.right.iter().map(|&x| field.to_int(x)).collect(),
            shift: self.shift,
            frob: self.frob,
            transpose: self.transpose,
        }
    }

    pub fn from_json(field: &FieldRef, j: &AutTripleJson) -> Result<AutTriple> {
        let conv = |v: &[u64]| {
            v.iter()
                .map(|&x| field.from_int(x))
                .collect::<Result<Vec<_>>>()
        };
        Ok(AutTriple {
            left: conv(&j.left)?,
            right: conv(&j.right)?,
            shift: j.shift,
            frob: j.frob,
            transpose: j.transpose,
        })
    }
}

/// An element of `Aut(Ω_{m,n})` in standard coordinates:
/// `M ↦ A^t M^{(p^e)} B`, transposed afterwards when flagged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StdAut {
    pub a: FqMat,
    pub b: FqMat,
    pub e: u32,
    pub transpose: bool,
}

impl StdAut {
    pub fn identity(m: usize, n: usize) -> StdAut {
        StdAut {
            a: FqMat::identity(m),
            b: FqMat::identity(n),
            e: 0,
            transpose: false,
        }
    }

    pub fn apply(&self, m: &FqMat, sf: &SmallField) -> FqMat {
        let mid = if self.e == 0 {
            m.clone()
        } else {
            m.frob(self.e, sf)
        };
        let out = self.a.transpose().mul(&mid, sf).mul(&self.b, sf);
        if self.transpose {
            out.transpose()
        } else {
            out
        }
    }

    /// The automorphism "first `self`, then `next`".
    pub fn then(&self, next: &StdAut, sf: &SmallField) -> StdAut {
        let h = sf.h();
        let a1 = self.a.frob(next.e, sf);
        let b1 = self.b.frob(next.e, sf);
        let (a, b) = if self.transpose {
            (a1.mul(&next.b, sf), b1.mul(&next.a, sf))
        } else {
            (a1.mul(&next.a, sf), b1.mul(&next.b, sf))
        };
        StdAut {
            a,
            b,
            e: (self.e + next.e) % h,
            transpose: self.transpose ^ next.transpose,
        }
    }

    pub fn inverse(&self, sf: &SmallField) -> Result<StdAut> {
        let h = sf.h();
        let e = (h - self.e % h) % h;
        let ai = self.a.frob(e, sf).inverse(sf)?;
        let bi = self.b.frob(e, sf).inverse(sf)?;
        let (a, b) = if self.transpose { (bi, ai) } else { (ai, bi) };
        Ok(StdAut {
            a,
            b,
            e,
            transpose: self.transpose,
        })
    }
}

/// Matrix (columns = images of the power basis) of `x ↦ g(x)` on `F_{q^r}`.
fn basis_image_matrix(model: &SpaceModel, on_n: bool, g: impl Fn(FEl) -> FEl) -> Result<FqMat> {
    let (cm, w, dim) = if on_n {
        (&model.coords_n, model.wn, model.params.n)
    } else {
        (&model.coords_m, model.wm, model.params.m)
    };
    let f = &model.field;
    let mut out = FqMat::zeros(dim as usize, dim as usize);
    for u in 0..dim as usize {
        let img = cm.coords(g(f.pow_u(w, u as u64)))?;
        for (row, &c) in img.iter().enumerate() {
            out.set(row, u, model.sf.index(c));
        }
    }
    Ok(out)
}

/// Converts a triple into standard coordinates.
pub fn to_std(model: &SpaceModel, t: &AutTriple) -> Result<StdAut> {
    let p = model.params;
    let f = &model.field;
    let sf = &model.sf;
    if t.left.len() != p.m as usize || t.right.len() != p.n as usize {
        return Err(Error::DimensionMismatch(format!(
            "triple arrays of length {}, {} for m = {}, n = {}",
            t.left.len(),
            t.right.len(),
            p.m,
            p.n
        )));
    }
    if t.transpose && p.m != p.n {
        return Err(Error::TransposeOnRectangular);
    }
    if t.left.iter().any(|&x| !f.in_subfield(x, p.q, p.m)) {
        return Err(Error::NotInSubfield(p.q.pow(p.m)));
    }
    if t.right.iter().any(|&x| !f.in_subfield(x, p.q, p.n)) {
        return Err(Error::NotInSubfield(p.q.pow(p.n)));
    }
    let pch = f.characteristic();
    let e = t.frob as i64;
    let shift = -((p.k as i64) * (t.shift as i64));
    let frob_e = |mm: FqMat| mm.frob(t.frob, sf);
    let side = |on_n: bool, arr: &[FEl]| -> Result<FqMat> {
        let s = basis_image_matrix(model, on_n, |x| f.frobenius(x, p.q, shift))?;
        let z = basis_image_matrix(model, on_n, |x| f.frobenius(x, pch, -e))?;
        let l = basis_image_matrix(model, on_n, |x| eval_linearized(f, arr, x, p.q, p.k))?;
        Ok(frob_e(s).mul(&frob_e(z), sf).mul(&l, sf))
    };
    let a = side(false, &t.left)?;
    let b = side(true, &t.right)?;
    if a.rank(sf) < a.rows || b.rank(sf) < b.rows {
        return Err(Error::Singular);
    }
    Ok(StdAut {
        a,
        b,
        e: t.frob % sf.h(),
        transpose: t.transpose,
    })
}

/// Applies a triple to a form, working in standard coordinates.
pub fn apply_automorphism(model: &SpaceModel, form: &Form, t: &AutTriple) -> Result<Form> {
    if form.params != model.params {
        return Err(Error::DimensionMismatch(
            "form and model parameters differ".into(),
        ));
    }
    let s = to_std(model, t)?;
    let m = FqMat::from_mat(&form.std(model)?, &model.sf)?;
    Ok(Form::from_std(
        model.params,
        s.apply(&m, &model.sf).to_mat(&model.sf),
    ))
}
