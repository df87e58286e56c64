//! Exact rational scalars.
//!
//! `Rational` is `num_rational::BigRational`: always reduced, positive
//! denominator, unbounded precision. Its `Display` and `FromStr` already use
//! the `p/q` (or `p`) text form, which is the serialized representation.

use num_bigint::BigInt;
use num_traits::One;

pub use num_rational::BigRational as Rational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

pub fn factorial(k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * int(i as i64))
}

/// True iff `q` is an integer `<= bound`.
pub fn is_integer_at_most(q: &Rational, bound: i64) -> bool {
    q.is_integer() && *q <= int(bound)
}

pub fn to_string(q: &Rational) -> String {
    q.to_string()
}

/// Parse `p/q` or `p`. Floating-point notation is rejected.
pub fn parse(s: &str) -> Result<Rational, crate::Error> {
    let t = s.trim();
    let bad = || crate::Error::Parse(format!("not an exact rational: {s:?}"));
    if t.is_empty() || t.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    let q: Rational = t.parse().map_err(|_| bad())?;
    Ok(q)
}

/// Comma-separated list of rationals, e.g. `1/2,-1/3,0`.
pub fn parse_list(s: &str) -> Result<Vec<Rational>, crate::Error> {
    s.split(',').map(parse).collect()
}
