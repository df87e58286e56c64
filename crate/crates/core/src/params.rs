//! The parameter vector `(γ_1, ..., γ_{d+1})` and its validity conditions.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, int, is_integer_at_most, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamVector {
    gamma: Vec<Rational>,
}

/// Outcome of the validity predicate together with every violated clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validity {
    pub violations: Vec<String>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ParamVector {
    pub fn new(gamma: Vec<Rational>) -> Self {
        assert!(gamma.len() >= 2, "need at least two parameters (d >= 1)");
        ParamVector { gamma }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let g = rational::parse_list(s)?;
        if g.len() < 2 {
            return Err(Error::Parse(format!("need at least 2 parameters, got {}", g.len())));
        }
        Ok(ParamVector::new(g))
    }

    pub fn zeros(d: usize) -> Self {
        ParamVector::new(vec![Rational::zero(); d + 1])
    }

    /// Dimension `d`; there are `d + 1` parameters.
    pub fn d(&self) -> usize {
        self.gamma.len() - 1
    }

    /// `γ_i`, one-based.
    pub fn get(&self, i: usize) -> &Rational {
        &self.gamma[i - 1]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.gamma
    }

    /// `|γ^j| = γ_j + ... + γ_{d+1}` (one-based; `j = d+2` gives 0).
    pub fn tail_sum(&self, j: usize) -> Rational {
        self.gamma[(j - 1).min(self.gamma.len())..]
            .iter()
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `|γ|`.
    pub fn total(&self) -> Rational {
        self.tail_sum(1)
    }

    /// Parameters `γ^j = (γ_j, ..., γ_{d+1})` of the `(d-j+1)`-dimensional system.
    pub fn tail(&self, j: usize) -> ParamVector {
        ParamVector::new(self.gamma[j - 1..].to_vec())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.gamma.iter().map(rational::to_string).collect()
    }

    /// All clauses of the well-definedness conditions for `d` variables:
    /// `γ_j ∉ Z_{<=-1}` and `|γ^j| ∉ Z_{<= -d+j-2}` for `j = 1..=d+1`.
    pub fn validity(&self, d: usize) -> Validity {
        let mut violations = Vec::new();
        if self.gamma.len() != d + 1 {
            violations.push(format!(
                "expected {} parameters for d = {d}, got {}",
                d + 1,
                self.gamma.len()
            ));
            return Validity { violations };
        }
        for j in 1..=d + 1 {
            let g = self.get(j);
            if is_integer_at_most(g, -1) {
                violations.push(format!("gamma_{j} = {g} lies in Z<=-1"));
            }
        }
        for j in 1..=d + 1 {
            let bound = -(d as i64) + j as i64 - 2;
            let s = self.tail_sum(j);
            // j = d+1 repeats the single-parameter clause for γ_{d+1}
            if j <= d && is_integer_at_most(&s, bound) {
                violations.push(format!("|gamma^{j}| = {s} lies in Z<={bound}"));
            }
        }
        Validity { violations }
    }

    pub fn ensure_valid(&self, d: usize) -> Result<()> {
        let v = self.validity(d);
        if v.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                violations: v.violations,
            })
        }
    }

    /// Every `γ_j > -1`: the weight is integrable and the inner product positive.
    pub fn is_positive_weight(&self) -> bool {
        self.gamma.iter().all(|g| *g > int(-1))
    }
}

/// Boolean form of the validity predicate.
pub fn param_valid(gamma: &ParamVector, d: usize) -> Validity {
    gamma.validity(d)
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn g(v: &[(i64, i64)]) -> ParamVector {
        ParamVector::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn half_integers_are_valid() {
        assert!(param_valid(&g(&[(1, 2), (1, 2), (1, 2)]), 2).is_valid());
    }

    #[test]
    fn negative_integer_gamma_rejected() {
        let v = param_valid(&g(&[(-1, 1), (1, 2), (1, 2)]), 2);
        assert!(!v.is_valid());
        assert!(v.violations[0].contains("gamma_1"));
    }

    #[test]
    fn tail_sum_clause() {
        // γ_2 + γ_3 = -2
        let v = param_valid(&g(&[(1, 2), (-3, 2), (-1, 2)]), 2);
        assert_eq!(v.violations.len(), 1);
        assert!(v.violations[0].contains("|gamma^2|"));
    }

    /// The general clauses agree with the explicit two- and three-variable lists.
    #[test]
    fn agrees_with_low_dimensional_lists() {
        let vals: Vec<Rational> = [-3, -2, -1, 0, 1].iter().map(|&k| int(k)).chain([rat(-1, 2), rat(-3, 2)]).collect();
        let bad = |q: &Rational, b: i64| is_integer_at_most(q, b);
        for a in &vals {
            for b in &vals {
                for c in &vals {
                    let p = ParamVector::new(vec![a.clone(), b.clone(), c.clone()]);
                    let explicit = !(bad(a, -1) || bad(b, -1) || bad(c, -1) || bad(&(b + c), -2) || bad(&(a + b + c), -3));
                    assert_eq!(param_valid(&p, 2).is_valid(), explicit, "{p}");
                    for e in &vals[..3] {
                        let p4 = ParamVector::new(vec![a.clone(), b.clone(), c.clone(), e.clone()]);
                        let explicit3 = !(bad(a, -1)
                            || bad(b, -1)
                            || bad(c, -1)
                            || bad(e, -1)
                            || bad(&(c + e), -2)
                            || bad(&(b + c + e), -3)
                            || bad(&(a + b + c + e), -4));
                        assert_eq!(param_valid(&p4, 3).is_valid(), explicit3, "{p4}");
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_length_is_invalid() {
        assert!(!param_valid(&ParamVector::zeros(2), 3).is_valid());
    }
}
