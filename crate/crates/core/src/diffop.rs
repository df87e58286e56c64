//! Linear differential operators with polynomial coefficients,
//! `Σ_α c_α(x) ∂^α`, stored in fully expanded form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly, TermJson};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    dim: usize,
    /// derivative multi-index -> coefficient; zero coefficients are never stored
    terms: BTreeMap<Monomial, MultiPoly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffTermJson {
    pub deriv: Vec<u32>,
    pub coef_poly: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffOpJson {
    pub d: usize,
    pub terms: Vec<DiffTermJson>,
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        DiffOp {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        DiffOp::term(Monomial::one(dim), MultiPoly::one(dim))
    }

    /// `coef · ∂^deriv`.
    pub fn term(deriv: Monomial, coef: MultiPoly) -> Self {
        let mut op = DiffOp::zero(coef.dim());
        op.add_term(deriv, coef);
        op
    }

    /// `coef · ∂_{x_i}` (zero-based `i`).
    pub fn first(i: usize, coef: MultiPoly) -> Self {
        DiffOp::term(Monomial::var(coef.dim(), i), coef)
    }

    /// `coef · ∂_{x_i} ∂_{x_j}` (zero-based).
    pub fn second(i: usize, j: usize, coef: MultiPoly) -> Self {
        let dim = coef.dim();
        DiffOp::term(Monomial::var(dim, i).mul(&Monomial::var(dim, j)), coef)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, deriv: &Monomial) -> MultiPoly {
        self.terms
            .get(deriv)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    /// Highest derivative order present.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, deriv: Monomial, coef: MultiPoly) {
        assert_eq!(coef.dim(), self.dim, "coefficient dimension");
        assert_eq!(deriv.dim(), self.dim, "derivative dimension");
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(deriv) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other_dim,
            });
        }
        Ok(())
    }

    pub fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(p.dim())?;
        let mut out = MultiPoly::zero(self.dim);
        for (alpha, c) in &self.terms {
            let dp = p.derivative_multi(alpha);
            if !dp.is_zero() {
                out = out + c * &dp;
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> DiffOp {
        if s.is_zero() {
            return DiffOp::zero(self.dim);
        }
        DiffOp {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.scale(s))).collect(),
        }
    }

    /// `self ∘ other`, expanded with the Leibniz rule:
    /// `a ∂^α ∘ b ∂^β = Σ_{g ≤ α} C(α, g) a (∂^g b) ∂^{α-g+β}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        let mut acc: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (alpha, a) in &self.terms {
            let divisors = alpha.divisors();
            for (beta, b) in &other.terms {
                for g in &divisors {
                    let db = b.derivative_multi(g);
                    if db.is_zero() {
                        continue;
                    }
                    let rest = alpha.checked_sub(g).expect("divisor").mul(beta);
                    let c = (a * &db).scale(&alpha.binomial(g));
                    match acc.entry(rest) {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(c);
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            *o.get_mut() = &*o.get() + &c;
                        }
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(DiffOp {
            dim: self.dim,
            terms: acc,
        })
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.compose(other)?.checked_sub(&other.compose(self)?)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.compose(other)?.checked_add(&other.compose(self)?)
    }

    /// Weaker identity test: equal action on every monomial of degree `<= n`.
    pub fn agrees_on_degree(&self, other: &DiffOp, n: u32) -> Result<bool> {
        self.check_dim(other.dim)?;
        for m in Monomial::up_to_degree(self.dim, n) {
            let p = MultiPoly::monomial(m, Rational::one());
            if self.apply(&p)? != other.apply(&p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks that every monomial of degree `k <= n` is mapped to a
    /// polynomial of degree `<= k`; returns the first offender.
    pub fn degree_violation(&self, n: u32) -> Option<(Monomial, u32)> {
        Monomial::up_to_degree(self.dim, n).into_iter().find_map(|m| {
            let k = m.degree();
            let image = self
                .apply(&MultiPoly::monomial(m.clone(), Rational::one()))
                .expect("same dimension");
            match image.degree() {
                Some(e) if e > k => Some((m, e)),
                _ => None,
            }
        })
    }

    pub fn to_json(&self) -> DiffOpJson {
        DiffOpJson {
            d: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| DiffTermJson {
                    deriv: a.0.clone(),
                    coef_poly: c.to_json_terms(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &DiffOpJson) -> Result<DiffOp> {
        let mut op = DiffOp::zero(j.d);
        for t in &j.terms {
            if t.deriv.len() != j.d {
                return Err(Error::DimensionMismatch {
                    expected: j.d,
                    found: t.deriv.len(),
                });
            }
            op.add_term(Monomial(t.deriv.clone()), MultiPoly::from_json_terms(j.d, &t.coef_poly)?);
        }
        Ok(op)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (a, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let d: Vec<String> = a
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("D{}", i + 1) } else { format!("D{}^{e}", i + 1) })
                .collect();
            if d.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", d.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&DiffOp> for &DiffOp {
            type Output = DiffOp;
            fn $method(self, rhs: &DiffOp) -> DiffOp {
                self.$checked(rhs).expect("operator dimension mismatch")
            }
        }
        impl $tr<DiffOp> for DiffOp {
            type Output = DiffOp;
            fn $method(self, rhs: DiffOp) -> DiffOp {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&DiffOp> for DiffOp {
            type Output = DiffOp;
            fn $method(self, rhs: &DiffOp) -> DiffOp {
                (&self).$method(rhs)
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, compose);

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    #[test]
    fn apply_basic() {
        // x1 D2 applied to x2^2 = 2 x1 x2
        let op = DiffOp::first(1, x(0));
        assert_eq!(op.apply(&x(1).pow(2)).unwrap(), (&x(0) * &x(1)).scale(&int(2)));
        assert!(op.apply(&MultiPoly::zero(2)).unwrap().is_zero());
        assert!(op.apply(&MultiPoly::one(3)).is_err());
    }

    #[test]
    fn leibniz_composition() {
        // D1 ∘ x1 = x1 D1 + 1
        let d1 = DiffOp::first(0, MultiPoly::one(2));
        let mul_x1 = DiffOp::term(Monomial::one(2), x(0));
        let expect = DiffOp::first(0, x(0)) + DiffOp::identity(2);
        assert_eq!(d1.compose(&mul_x1).unwrap(), expect);
        assert_eq!(d1.commutator(&mul_x1).unwrap(), DiffOp::identity(2));
        // D1^2 ∘ x1^2 = x1^2 D1^2 + 4 x1 D1 + 2
        let d11 = DiffOp::second(0, 0, MultiPoly::one(2));
        let sq = DiffOp::term(Monomial::one(2), x(0).pow(2));
        let expect = DiffOp::second(0, 0, x(0).pow(2))
            + DiffOp::first(0, x(0).scale(&int(4)))
            + DiffOp::identity(2).scale(&int(2));
        assert_eq!(d11.compose(&sq).unwrap(), expect);
    }

    #[test]
    fn json_round_trip() {
        let op = DiffOp::second(0, 1, &x(0) * &x(1)) + DiffOp::first(1, x(0).scale(&rat(-3, 2)));
        let back = DiffOp::from_json(&op.to_json()).unwrap();
        assert_eq!(op, back);
        assert_eq!(op.order(), Some(2));
    }

    fn small_op() -> impl Strategy<Value = DiffOp> {
        let term = (0u32..2, 0u32..2, 0u32..3, 0u32..3, -3i64..4);
        prop::collection::vec(term, 1..4).prop_map(|ts| {
            let mut op = DiffOp::zero(2);
            for (a1, a2, e1, e2, c) in ts {
                let coef = MultiPoly::monomial(Monomial(vec![e1, e2]), int(c));
                op.add_term(Monomial(vec![a1, a2]), coef);
            }
            op
        })
    }

    fn small_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((0u32..4, 0u32..4, -4i64..5), 0..5).prop_map(|ts| {
            MultiPoly::from_terms(2, ts.into_iter().map(|(a, b, c)| (Monomial(vec![a, b]), int(c))))
        })
    }

    proptest! {
        /// Composition is realised by applying one operator after the other.
        #[test]
        fn compose_matches_sequential_application(a in small_op(), b in small_op(), p in small_poly()) {
            let ab = a.compose(&b).unwrap();
            prop_assert_eq!(ab.apply(&p).unwrap(), a.apply(&b.apply(&p).unwrap()).unwrap());
        }

        #[test]
        fn compose_is_associative(a in small_op(), b in small_op(), c in small_op()) {
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn jacobi_identity(a in small_op(), b in small_op(), c in small_op()) {
            let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
            let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
            let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
            prop_assert!((t1 + t2 + t3).is_zero());
        }
    }
}
