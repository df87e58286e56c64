//! Jacobi polynomials: the one-variable family from its terminating
//! hypergeometric sum, and the nested simplex family `P_ν(x; γ)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::params::ParamVector;
use crate::poly::{Monomial, MultiPoly, TermJson};
use crate::rational::{factorial, int, is_integer_at_most, pochhammer, Rational};

/// Degree multi-index `ν = (ν_1, ..., ν_d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DegreeIndex(pub Vec<u32>);

impl DegreeIndex {
    pub fn d(&self) -> usize {
        self.0.len()
    }

    /// `|ν|`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `|ν^j| = ν_j + ... + ν_d` (one-based; `j = d+1` gives 0).
    pub fn tail_sum(&self, j: usize) -> u32 {
        self.0[(j - 1).min(self.0.len())..].iter().sum()
    }

    /// `|ν_j| = ν_1 + ... + ν_j`.
    pub fn prefix_sum(&self, j: usize) -> u32 {
        self.0[..j].iter().sum()
    }

    /// `ν + shift`, or `None` if an entry would become negative.
    pub fn shifted(&self, shift: &[i64]) -> Option<DegreeIndex> {
        self.0
            .iter()
            .zip(shift)
            .map(|(&v, &s)| u32::try_from(v as i64 + s).ok())
            .collect::<Option<Vec<_>>>()
            .map(DegreeIndex)
    }
}

/// All `ν ∈ N_0^d` with `|ν| = n`, ascending lexicographic order.
pub fn degree_indices(d: usize, n: u32) -> Vec<DegreeIndex> {
    fn rec(d: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<DegreeIndex>) {
        if prefix.len() + 1 == d {
            prefix.push(n);
            out.push(DegreeIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in 0..=n {
            prefix.push(k);
            rec(d, n - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Checks `α ∉ Z_{<=-1}`, `β ∉ Z_{<=-1}`, `α+β ∉ Z_{<=-2}`.
pub fn jacobi_params_valid(alpha: &Rational, beta: &Rational) -> Result<()> {
    let mut violations = Vec::new();
    if is_integer_at_most(alpha, -1) {
        violations.push(format!("alpha = {alpha} lies in Z<=-1"));
    }
    if is_integer_at_most(beta, -1) {
        violations.push(format!("beta = {beta} lies in Z<=-1"));
    }
    let s = alpha + beta;
    if is_integer_at_most(&s, -2) {
        violations.push(format!("alpha + beta = {s} lies in Z<=-2"));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { violations })
    }
}

/// Coefficients `c_k` of `p_n^{(α,β)} = Σ_k c_k u^k` in the variable `u = (1-t)/2`.
pub fn jacobi_u_coefficients(n: u32, alpha: &Rational, beta: &Rational) -> Result<Vec<Rational>> {
    jacobi_params_valid(alpha, beta)?;
    let n = n as usize;
    let a1 = alpha + int(1);
    let pre = pochhammer(&a1, n) / pochhammer(&(beta + int(1)), n);
    let minus_n = int(-(n as i64));
    let upper = int(n as i64) + alpha + beta + int(1);
    Ok((0..=n)
        .map(|k| {
            &pre * pochhammer(&minus_n, k) * pochhammer(&upper, k) / (factorial(k) * pochhammer(&a1, k))
        })
        .collect())
}

/// The one-variable Jacobi polynomial `p_n^{(α,β)}(t)` as a polynomial in one variable.
pub fn jacobi1d(n: u32, alpha: &Rational, beta: &Rational) -> Result<MultiPoly> {
    let c = jacobi_u_coefficients(n, alpha, beta)?;
    let half = Rational::new(1.into(), 2.into());
    let u = (MultiPoly::one(1) - MultiPoly::var(1, 0)).scale(&half);
    let mut out = MultiPoly::zero(1);
    let mut upow = MultiPoly::one(1);
    for ck in &c {
        out = out + upow.scale(ck);
        upow = &upow * &u;
    }
    Ok(out)
}

/// `a_j = |γ^{j+1}| + 2|ν^{j+1}| + d - j`.
pub fn inner_alpha(j: usize, nu: &DegreeIndex, gamma: &ParamVector) -> Rational {
    let d = nu.d();
    gamma.tail_sum(j + 1) + int(2 * nu.tail_sum(j + 1) as i64 + d as i64 - j as i64)
}

/// `P_ν(x; γ) = Π_k (1-|x_{k-1}|)^{ν_k} p_{ν_k}^{(a_k, γ_k)}(2x_k/(1-|x_{k-1}|) - 1)`,
/// expanded as a polynomial. With `s = 1-|x_{k-1}|`, `s^ν u^j` becomes
/// `(s - x_k)^j s^{ν-j}`, so no rational function ever appears.
pub fn jacobi_simplex(nu: &DegreeIndex, gamma: &ParamVector) -> Result<MultiPoly> {
    let d = nu.d();
    if gamma.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: gamma.d() + 1,
        });
    }
    gamma.ensure_valid(d)?;
    let mut out = MultiPoly::one(d);
    for k in 1..=d {
        let nk = nu.0[k - 1];
        if nk == 0 {
            continue;
        }
        let alpha = inner_alpha(k, nu, gamma);
        let coeffs = jacobi_u_coefficients(nk, &alpha, gamma.get(k))?;
        let s = MultiPoly::one_minus_partial_sum(d, k - 1);
        let s_minus_x = &s - &MultiPoly::var(d, k - 1);
        let s_pows = powers(&s, nk);
        let w_pows = powers(&s_minus_x, nk);
        let mut factor = MultiPoly::zero(d);
        for (j, cj) in coeffs.iter().enumerate() {
            factor = factor + (&w_pows[j] * &s_pows[nk as usize - j]).scale(cj);
        }
        out = &out * &factor;
    }
    Ok(out)
}

fn powers(p: &MultiPoly, n: u32) -> Vec<MultiPoly> {
    let mut v = vec![MultiPoly::one(p.dim())];
    for _ in 0..n {
        let next = v.last().unwrap() * p;
        v.push(next);
    }
    v
}

/// Basis `{P_ν : |ν| = n}` of `V_n^d(γ)`.
#[derive(Clone, Debug)]
pub struct BasisSet {
    pub d: usize,
    pub n: u32,
    pub gamma: ParamVector,
    pub elements: Vec<(DegreeIndex, MultiPoly)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisElementJson {
    pub nu: Vec<u32>,
    pub poly: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisSetJson {
    pub d: usize,
    pub n: u32,
    pub gamma: Vec<String>,
    pub elements: Vec<BasisElementJson>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = &DegreeIndex> {
        self.elements.iter().map(|(nu, _)| nu)
    }

    pub fn position(&self, nu: &DegreeIndex) -> Option<usize> {
        self.elements.iter().position(|(m, _)| m == nu)
    }

    pub fn to_json(&self) -> BasisSetJson {
        BasisSetJson {
            d: self.d,
            n: self.n,
            gamma: self.gamma.to_strings(),
            elements: self
                .elements
                .iter()
                .map(|(nu, p)| BasisElementJson {
                    nu: nu.0.clone(),
                    poly: p.to_json_terms(),
                })
                .collect(),
        }
    }
}

/// Coefficient matrix whose columns are the polynomials expressed in the
/// given monomial list.
pub fn coefficient_matrix(polys: &[&MultiPoly], monomials: &[Monomial]) -> ExactMatrix {
    let cols: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| monomials.iter().map(|m| p.coeff(m)).collect())
        .collect();
    ExactMatrix::from_columns(&cols)
}

pub fn basis(n: u32, d: usize, gamma: &ParamVector) -> Result<BasisSet> {
    if gamma.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: gamma.d() + 1,
        });
    }
    gamma.ensure_valid(d)?;
    let elements = degree_indices(d, n)
        .into_par_iter()
        .map(|nu| jacobi_simplex(&nu, gamma).map(|p| (nu, p)))
        .collect::<Result<Vec<_>>>()?;
    let polys: Vec<&MultiPoly> = elements.iter().map(|(_, p)| p).collect();
    let rank = coefficient_matrix(&polys, &Monomial::up_to_degree(d, n)).rank();
    if rank != elements.len() {
        return Err(Error::Singular {
            rank,
            size: elements.len(),
        });
    }
    Ok(BasisSet {
        d,
        n,
        gamma: gamma.clone(),
        elements,
    })
}

/// Binomial coefficient as a count.
pub fn binomial_count(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
