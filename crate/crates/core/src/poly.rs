//! Sparse multivariate polynomials over `Rational`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Exponent (or derivative) multi-index. Ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self - other`, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All multi-indices `g` with `g <= self` componentwise.
    pub fn divisors(&self) -> Vec<Monomial> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for &e in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=e).map(move |k| {
                        let mut p = prefix.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Monomial).collect()
    }

    /// Product of binomial coefficients `C(self_i, g_i)`.
    pub fn binomial(&self, g: &Monomial) -> Rational {
        self.0
            .iter()
            .zip(&g.0)
            .fold(Rational::one(), |acc, (&n, &k)| acc * binomial(n, k))
    }

    /// All exponent vectors of dimension `dim` with total degree exactly `n`,
    /// in ascending graded-lex order.
    pub fn of_degree(dim: usize, n: u32) -> Vec<Monomial> {
        fn rec(dim: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == dim {
                prefix.push(n);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for k in 0..=n {
                prefix.push(k);
                rec(dim, n - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if n == 0 {
                out.push(Monomial(vec![]));
            }
            return out;
        }
        rec(dim, n, &mut Vec::new(), &mut out);
        out
    }

    /// All exponent vectors with total degree `<= n`, ascending graded-lex.
    pub fn up_to_degree(dim: usize, n: u32) -> Vec<Monomial> {
        (0..=n).flat_map(|k| Monomial::of_degree(dim, k)).collect()
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int((i + 1) as i64);
    }
    acc
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `x_1..x_dim` with exact coefficients. No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: String,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(Monomial::one(dim), c)
    }

    /// The coordinate `x_{i+1}` (zero-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(dim, i), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    /// `1 - x_1 - ... - x_k` in `dim` variables.
    pub fn one_minus_partial_sum(dim: usize, k: usize) -> Self {
        let mut p = Self::one(dim);
        for i in 0..k {
            p.add_term(Monomial::var(dim, i), -Rational::one());
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            assert_eq!(m.dim(), dim, "monomial dimension");
            p.add_term(m, c);
        }
        p
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

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &MultiPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other)?;
        let mut out = MultiPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative in zero-based variable `i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * int(e as i64));
        }
        out
    }

    /// Mixed partial `∂^alpha`.
    pub fn derivative_multi(&self, alpha: &Monomial) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let Some(rest) = m.checked_sub(alpha) else {
                continue;
            };
            // falling factorial prod m_i (m_i - 1) ... (m_i - alpha_i + 1)
            let mut f = c.clone();
            for (&mi, &ai) in m.0.iter().zip(&alpha.0) {
                for t in 0..ai {
                    f *= int((mi - t) as i64);
                }
            }
            out.add_term(rest, f);
        }
        out
    }

    /// Replace variable `i` by the polynomial `q` (same dimension).
    pub fn substitute(&self, i: usize, q: &MultiPoly) -> MultiPoly {
        assert_eq!(q.dim, self.dim, "substitution dimension");
        let mut powers = vec![MultiPoly::one(self.dim)];
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * q;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest.0[i] = 0;
            let part = MultiPoly::monomial(rest, c.clone());
            out = out + &part * &powers[e];
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.dim);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                exp: m.0.clone(),
                coef: rational::to_string(c),
            })
            .collect()
    }

    pub fn from_json_terms(dim: usize, terms: &[TermJson]) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(dim);
        for t in terms {
            if t.exp.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.exp.len(),
                });
            }
            p.add_term(Monomial(t.exp.clone()), rational::parse(&t.coef)?);
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("polynomial dimension mismatch")
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    #[test]
    fn additive_inverse_cancels() {
        let p = x(0) + (-x(0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn difference_of_squares() {
        let p = (x(0) + x(1)) * (x(0) - x(1));
        let expected = x(0).pow(2) - x(1).pow(2);
        assert_eq!(p, expected);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn scaling() {
        let p = (x(0) * x(1)).scale(&rat(3, 2));
        assert_eq!(p.coeff(&Monomial(vec![1, 1])), rat(3, 2));
        assert_eq!(p.len(), 1);
        assert!(p.scale(&rat(0, 1)).is_zero());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = MultiPoly::var(2, 0);
        let b = MultiPoly::var(3, 0);
        assert_eq!(
            a.checked_add(&b),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn grlex_order() {
        let mut ms = Monomial::up_to_degree(2, 2);
        let sorted = {
            let mut s = ms.clone();
            s.sort();
            s
        };
        assert_eq!(ms, sorted);
        ms.reverse();
        assert_eq!(ms[0], Monomial(vec![2, 0]));
        assert_eq!(ms[1], Monomial(vec![1, 1]));
        assert_eq!(ms[2], Monomial(vec![0, 2]));
        assert_eq!(ms[3], Monomial(vec![1, 0]));
        assert_eq!(Monomial::up_to_degree(3, 3).len(), 20);
    }

    #[test]
    fn derivatives() {
        let p = x(0).pow(3) * x(1).pow(2);
        assert_eq!(
            p.derivative_multi(&Monomial(vec![2, 1])),
            (x(0) * x(1)).scale(&rat(12, 1))
        );
        assert_eq!(p.derivative(0), (x(0).pow(2) * x(1).pow(2)).scale(&rat(3, 1)));
        assert!(p.derivative_multi(&Monomial(vec![4, 0])).is_zero());
    }

    #[test]
    fn substitution_and_display() {
        // x1^2 with x1 -> 1 - x2
        let p = x(0).pow(2).substitute(0, &(MultiPoly::one(2) - x(1)));
        assert_eq!(p, MultiPoly::one(2) - x(1).scale(&rat(2, 1)) + x(1).pow(2));
        assert_eq!(p.to_string(), "x2^2 - 2*x2 + 1");
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        proptest::collection::vec(((0u32..3, 0u32..3), -5i64..6, 1i64..4), 0..5).prop_map(|ts| {
            MultiPoly::from_terms(
                2,
                ts.into_iter()
                    .map(|((a, b), n, d)| (Monomial(vec![a, b]), rat(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!((&a * &b).degree(), Some(da + db));
            }
            prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn json_terms_round_trip(a in arb_poly()) {
            prop_assert_eq!(MultiPoly::from_json_terms(2, &a.to_json_terms()).unwrap(), a);
        }
    }
}
