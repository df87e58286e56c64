//! The symmetry operators `L_{i,j}`, their sum `L`, the commuting families
//! `M_j`, `M_j^±`, and the fourth-order expression `F` relating them.

use rayon::prelude::*;

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::params::ParamVector;
use crate::poly::MultiPoly;
use crate::rational::{int, Rational};

/// Which relabelling of indices to apply when building `M_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Plain,
    /// indices mapped through the cycle `k -> k+1 (mod d+1)`
    Plus,
    /// indices mapped through the inverse cycle
    Minus,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Plain => "M",
            Variant::Plus => "M+",
            Variant::Minus => "M-",
        }
    }

    /// Image of the one-based index `k` in `1..=d+1`.
    pub fn map(self, k: usize, d: usize) -> usize {
        match self {
            Variant::Plain => k,
            Variant::Plus => k % (d + 1) + 1,
            Variant::Minus => (k + d - 1) % (d + 1) + 1,
        }
    }
}

fn check_pair(i: usize, j: usize, d: usize) -> Result<()> {
    if i == 0 || j == 0 || i > d + 1 || j > d + 1 || i == j {
        return Err(Error::IndexOutOfRange(format!(
            "L_{{{i},{j}}} needs distinct indices in 1..={}",
            d + 1
        )));
    }
    Ok(())
}

/// `L_{i,j}`, one-based, symmetric in `(i, j)`.
pub fn build_l(i: usize, j: usize, gamma: &ParamVector) -> Result<DiffOp> {
    let d = gamma.d();
    check_pair(i, j, d)?;
    gamma.ensure_valid(d)?;
    let (i, j) = (i.min(j), i.max(j));
    let one = int(1);
    let (a, gi) = (i - 1, gamma.get(i) + &one);
    let xa = MultiPoly::var(d, a);
    if j <= d {
        let b = j - 1;
        let gj = gamma.get(j) + &one;
        let xb = MultiPoly::var(d, b);
        let xx = &xa * &xb;
        let first = xb.scale(&gi) - xa.scale(&gj);
        Ok(DiffOp::second(a, a, xx.clone())
            + DiffOp::second(a, b, xx.scale(&int(-2)))
            + DiffOp::second(b, b, xx)
            + DiffOp::first(a, first.clone())
            + DiffOp::first(b, -&first))
    } else {
        let rest = MultiPoly::one_minus_partial_sum(d, d);
        let gl = gamma.get(d + 1) + &one;
        Ok(DiffOp::second(a, a, &xa * &rest) + DiffOp::first(a, rest.scale(&gi) - xa.scale(&gl)))
    }
}

/// `L` written out directly in the coordinates.
pub fn build_l_total(gamma: &ParamVector) -> Result<DiffOp> {
    let d = gamma.d();
    gamma.ensure_valid(d)?;
    let total = gamma.total() + int(d as i64 + 1);
    let mut op = DiffOp::zero(d);
    for k in 0..d {
        let xk = MultiPoly::var(d, k);
        op = op + DiffOp::second(k, k, &xk - &(&xk * &xk));
        for j in k + 1..d {
            op = op + DiffOp::second(k, j, (&xk * &MultiPoly::var(d, j)).scale(&int(-2)));
        }
        let c = MultiPoly::constant(d, gamma.get(k + 1) + int(1)) - xk.scale(&total);
        op = op + DiffOp::first(k, c);
    }
    Ok(op)
}

/// `Σ_{i<j} L_{i,j}`.
pub fn build_l_total_sum(gamma: &ParamVector) -> Result<DiffOp> {
    let d = gamma.d();
    let mut op = DiffOp::zero(d);
    for i in 1..=d + 1 {
        for j in i + 1..=d + 1 {
            op = op + build_l(i, j, gamma)?;
        }
    }
    Ok(op)
}

/// `Σ_{j<=k<l<=d+1} L_{σ(k),σ(l)}` with `σ` given by the variant.
pub fn build_m(j: usize, gamma: &ParamVector, variant: Variant) -> Result<DiffOp> {
    let d = gamma.d();
    if j == 0 || j > d {
        return Err(Error::IndexOutOfRange(format!("M_{j} needs 1 <= j <= {d}")));
    }
    let mut op = DiffOp::zero(d);
    for k in j..=d + 1 {
        for l in k + 1..=d + 1 {
            op = op + build_l(variant.map(k, d), variant.map(l, d), gamma)?;
        }
    }
    Ok(op)
}

/// `M_j` with the convention that it vanishes for `j = d+1, d+2`.
pub fn build_m_or_zero(j: usize, gamma: &ParamVector, variant: Variant) -> Result<DiffOp> {
    let d = gamma.d();
    if j == d + 1 || j == d + 2 {
        gamma.ensure_valid(d)?;
        return Ok(DiffOp::zero(d));
    }
    build_m(j, gamma, variant)
}

/// Named generator appearing as a leaf of an [`OperatorExpr`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    L(usize, usize),
    Total,
    M(usize, Variant),
}

impl Generator {
    pub fn build(&self, gamma: &ParamVector) -> Result<DiffOp> {
        match *self {
            Generator::L(i, j) => build_l(i, j, gamma),
            Generator::Total => build_l_total(gamma),
            Generator::M(j, v) => build_m(j, gamma, v),
        }
    }
}

/// Symbolic expression over generators, expanded to a [`DiffOp`] on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorExpr {
    Gen(Generator),
    Scale(Rational, Box<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    Compose(Box<OperatorExpr>, Box<OperatorExpr>),
    Commutator(Box<OperatorExpr>, Box<OperatorExpr>),
    Anticommutator(Box<OperatorExpr>, Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn l(i: usize, j: usize) -> Self {
        OperatorExpr::Gen(Generator::L(i, j))
    }

    pub fn scale(self, c: Rational) -> Self {
        OperatorExpr::Scale(c, Box::new(self))
    }

    pub fn compose(self, other: OperatorExpr) -> Self {
        OperatorExpr::Compose(Box::new(self), Box::new(other))
    }

    pub fn commutator(self, other: OperatorExpr) -> Self {
        OperatorExpr::Commutator(Box::new(self), Box::new(other))
    }

    pub fn anticommutator(self, other: OperatorExpr) -> Self {
        OperatorExpr::Anticommutator(Box::new(self), Box::new(other))
    }

    /// Expand into canonical form; independent subtrees run in parallel.
    pub fn eval(&self, gamma: &ParamVector) -> Result<DiffOp> {
        match self {
            OperatorExpr::Gen(g) => g.build(gamma),
            OperatorExpr::Scale(c, e) => Ok(e.eval(gamma)?.scale(c)),
            OperatorExpr::Sum(es) => {
                let parts = es.par_iter().map(|e| e.eval(gamma)).collect::<Result<Vec<_>>>()?;
                let mut acc = DiffOp::zero(gamma.d());
                for p in parts {
                    acc = acc.checked_add(&p)?;
                }
                Ok(acc)
            }
            OperatorExpr::Compose(a, b) | OperatorExpr::Commutator(a, b) | OperatorExpr::Anticommutator(a, b) => {
                let (a, b) = rayon::join(|| a.eval(gamma), || b.eval(gamma));
                let (a, b) = (a?, b?);
                match self {
                    OperatorExpr::Compose(..) => a.compose(&b),
                    OperatorExpr::Commutator(..) => a.commutator(&b),
                    _ => a.anticommutator(&b),
                }
            }
        }
    }
}

impl OperatorExpr {
    /// Evaluates the same expression over matrices, with `leaf` supplying
    /// each generator's matrix.
    pub fn eval_matrix(&self, leaf: &(dyn Fn(&Generator) -> Result<ExactMatrix> + Sync)) -> Result<ExactMatrix> {
        match self {
            OperatorExpr::Gen(g) => leaf(g),
            OperatorExpr::Scale(c, e) => Ok(e.eval_matrix(leaf)?.scale(c)),
            OperatorExpr::Sum(es) => {
                let parts = es.par_iter().map(|e| e.eval_matrix(leaf)).collect::<Result<Vec<_>>>()?;
                let mut it = parts.into_iter();
                let mut acc = it.next().ok_or_else(|| Error::IndexOutOfRange("empty sum".into()))?;
                for p in it {
                    acc = acc.checked_add(&p)?;
                }
                Ok(acc)
            }
            OperatorExpr::Compose(a, b) | OperatorExpr::Commutator(a, b) | OperatorExpr::Anticommutator(a, b) => {
                let (a, b) = rayon::join(|| a.eval_matrix(leaf), || b.eval_matrix(leaf));
                let (a, b) = (a?, b?);
                match self {
                    OperatorExpr::Compose(..) => a.checked_mul(&b),
                    OperatorExpr::Commutator(..) => a.commutator(&b),
                    _ => a.anticommutator(&b),
                }
            }
        }
    }
}

/// Distinctness and range check for the four indices of `F`.
pub fn check_quadruple(idx: [usize; 4], d: usize) -> Result<()> {
    for (a, &p) in idx.iter().enumerate() {
        if p == 0 || p > d + 1 {
            return Err(Error::IndexOutOfRange(format!("index {p} not in 1..={}", d + 1)));
        }
        if idx[..a].contains(&p) {
            return Err(Error::IndexOutOfRange(format!("repeated index {p} in {idx:?}")));
        }
    }
    Ok(())
}

/// The fourth-order expression `F(i,j,k,l)` equal to `(1-γ_k²)(1-γ_l²) L_{i,j}`.
pub fn f_expr(i: usize, j: usize, k: usize, l: usize, gamma: &ParamVector) -> Result<OperatorExpr> {
    check_quadruple([i, j, k, l], gamma.d())?;
    let g = |a: usize| gamma.get(a).clone();
    let (gi, gj, gk, gl) = (g(i), g(j), g(k), g(l));
    let one = int(1);
    let p = |x: &Rational| &one + x;
    let m2 = |x: &Rational| &one - x * x;
    let lik = || OperatorExpr::l(i, k);
    let lil = || OperatorExpr::l(i, l);
    let ljk = || OperatorExpr::l(j, k);
    let ljl = || OperatorExpr::l(j, l);
    let lkl = || OperatorExpr::l(k, l);
    let terms = vec![
        ljk().commutator(lkl()).anticommutator(lik().commutator(lkl())),
        lkl().anticommutator(lik().commutator(ljk().commutator(lkl()))).scale(int(-1)),
        lkl().anticommutator(lik().compose(ljl())).scale(int(-2)),
        lik().commutator(lkl().commutator(ljl())).scale(p(&gk) * p(&gl)),
        lik().anticommutator(lkl()).scale(p(&gj) * p(&gl)),
        lik().anticommutator(ljk()).scale(m2(&gl)),
        lil().anticommutator(ljl()).scale(m2(&gk)),
        ljl().anticommutator(lkl()).scale(p(&gi) * p(&gk)),
        ljk().compose(lil()).scale(int(-4)),
        ljl().compose(lik()).scale(int(2) * (int(-1) + &gk + &gl + &gk * &gl)),
        lik().scale(int(-2) * &gk * p(&gj) * p(&gl)),
        lil().scale(p(&gj) * p(&gk) * (&one + &gk - &gl + &gk * &gl)),
        ljk().scale(p(&gi) * p(&gl) * (&one - &gk + &gl + &gk * &gl)),
        ljl().scale(int(-2) * p(&gi) * p(&gk) * &gl),
        lkl().scale(-(p(&gi) * p(&gj) * p(&gk) * p(&gl))),
    ];
    Ok(OperatorExpr::Sum(terms))
}

pub fn build_f(i: usize, j: usize, k: usize, l: usize, gamma: &ParamVector) -> Result<DiffOp> {
    f_expr(i, j, k, l, gamma)?.eval(gamma)
}

/// `(1-γ_k²)(1-γ_l²)`, the factor multiplying `L_{i,j}` in the F relation.
pub fn f_factor(k: usize, l: usize, gamma: &ParamVector) -> Rational {
    let one = int(1);
    (&one - gamma.get(k) * gamma.get(k)) * (&one - gamma.get(l) * gamma.get(l))
}

/// `L_{1,j}` for `j = 2..=d+1` and `L_{i,d+1}` for `i = 1..=d`, each rebuilt
/// from the commuting families. Returned as `((i, j), op)`.
pub fn recover_l_1j_and_lid1(gamma: &ParamVector) -> Result<Vec<((usize, usize), DiffOp)>> {
    let d = gamma.d();
    let m = |k: usize, v: Variant| build_m_or_zero(k, gamma, v);
    let mut out = Vec::new();
    for j in 2..=d + 1 {
        let op = m(j - 1, Variant::Plus)? + m(j + 1, Variant::Plain)? - m(j, Variant::Plain)? - m(j, Variant::Plus)?;
        out.push(((1, j), op));
    }
    for i in 1..=d {
        let op = m(i, Variant::Plain)? + m(i + 2, Variant::Minus)? - m(i + 1, Variant::Minus)? - m(i + 1, Variant::Plain)?;
        out.push(((i, d + 1), op));
    }
    Ok(out)
}

/// `M_1 - M_2 - M^-_2 + M^-_3 - M^+_d`, which vanishes identically.
pub fn dependence_combination(gamma: &ParamVector) -> Result<DiffOp> {
    let d = gamma.d();
    let m = |k: usize, v: Variant| build_m_or_zero(k, gamma, v);
    Ok(m(1, Variant::Plain)? - m(2, Variant::Plain)? - m(2, Variant::Minus)? + m(3, Variant::Minus)?
        - m(d, Variant::Plus)?)
}
