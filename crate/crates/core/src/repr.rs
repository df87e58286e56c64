//! Matrices of operators on `V_n^d(γ)` in the `P_ν` basis.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::jacobi::{basis, coefficient_matrix, BasisSet, DegreeIndex};
use crate::matrix::ExactMatrix;
use crate::params::ParamVector;
use crate::poly::{Monomial, MultiPoly};
use crate::rational::Rational;

/// Expansion of polynomials of degree `<= n` in the graded basis
/// `{P_μ : |μ| <= n}`, through the inverse of its monomial coefficient matrix.
#[derive(Clone, Debug)]
pub struct BasisExpander {
    pub gamma: ParamVector,
    pub n: u32,
    /// every `P_μ` with `|μ| <= n`, grouped by degree, lexicographic within a degree
    pub full: Vec<(DegreeIndex, MultiPoly)>,
    /// position in `full` of the first element of degree `n`
    top_start: usize,
    monomials: Vec<Monomial>,
    inverse: ExactMatrix,
}

impl BasisExpander {
    pub fn new(n: u32, gamma: &ParamVector) -> Result<Self> {
        let d = gamma.d();
        let layers = (0..=n).into_par_iter().map(|k| basis(k, d, gamma)).collect::<Result<Vec<_>>>()?;
        let top_start = layers[..n as usize].iter().map(BasisSet::len).sum();
        let full: Vec<(DegreeIndex, MultiPoly)> = layers.into_iter().flat_map(|b| b.elements).collect();
        let monomials = Monomial::up_to_degree(d, n);
        let polys: Vec<&MultiPoly> = full.iter().map(|(_, p)| p).collect();
        let inverse = coefficient_matrix(&polys, &monomials).inverse()?;
        Ok(BasisExpander {
            gamma: gamma.clone(),
            n,
            full,
            top_start,
            monomials,
            inverse,
        })
    }

    pub fn d(&self) -> usize {
        self.gamma.d()
    }

    /// The degree-`n` part as a `BasisSet`.
    pub fn top(&self) -> BasisSet {
        BasisSet {
            d: self.d(),
            n: self.n,
            gamma: self.gamma.clone(),
            elements: self.full[self.top_start..].to_vec(),
        }
    }

    pub fn top_indices(&self) -> Vec<DegreeIndex> {
        self.full[self.top_start..].iter().map(|(nu, _)| nu.clone()).collect()
    }

    pub fn top_len(&self) -> usize {
        self.full.len() - self.top_start
    }

    pub fn top_start(&self) -> usize {
        self.top_start
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Coefficients of `p` over `full`. Fails if `p` has degree above `n`.
    pub fn expand(&self, p: &MultiPoly) -> Result<Vec<Rational>> {
        if let Some(deg) = p.degree() {
            if deg > self.n {
                return Err(Error::NotInvariant(format!("image has degree {deg} > {}", self.n)));
            }
        }
        let v: Vec<Rational> = self.monomials.iter().map(|m| p.coeff(m)).collect();
        Ok(self.inverse.mul_vec(&v))
    }
}

/// An operator restricted to `V_n^d(γ)`; column `k` holds the coefficients
/// of the image of the `k`-th basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub name: String,
    pub d: usize,
    pub n: u32,
    pub gamma: ParamVector,
    pub basis: Vec<DegreeIndex>,
    pub matrix: ExactMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorMatrixJson {
    pub op: String,
    pub d: usize,
    pub n: u32,
    pub gamma: Vec<String>,
    /// row/column labels in order
    pub basis: Vec<Vec<u32>>,
    pub matrix: Vec<Vec<String>>,
}

impl OperatorMatrix {
    pub fn to_json(&self) -> OperatorMatrixJson {
        OperatorMatrixJson {
            op: self.name.clone(),
            d: self.d,
            n: self.n,
            gamma: self.gamma.to_strings(),
            basis: self.basis.iter().map(|nu| nu.0.clone()).collect(),
            matrix: self.matrix.to_strings(),
        }
    }
}

/// Matrix of `op` on `V_n^d(γ)`. Any coefficient on a basis element of
/// lower degree is reported as `NotInvariant`.
pub fn matrix_of(name: &str, op: &DiffOp, ex: &BasisExpander) -> Result<OperatorMatrix> {
    if op.dim() != ex.d() {
        return Err(Error::DimensionMismatch {
            expected: ex.d(),
            found: op.dim(),
        });
    }
    let top = &ex.full[ex.top_start..];
    let columns = top
        .par_iter()
        .map(|(nu, p)| {
            let coeffs = ex.expand(&op.apply(p)?)?;
            if let Some(k) = (0..ex.top_start).find(|&k| !coeffs[k].is_zero()) {
                return Err(Error::NotInvariant(format!(
                    "{name} P_{:?} has coefficient {} on P_{:?}",
                    nu.0, coeffs[k], ex.full[k].0 .0
                )));
            }
            Ok(coeffs[ex.top_start..].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorMatrix {
        name: name.to_string(),
        d: ex.d(),
        n: ex.n,
        gamma: ex.gamma.clone(),
        basis: ex.top_indices(),
        matrix: ExactMatrix::from_columns(&columns),
    })
}

/// Convenience: builds the expander and the matrix in one go.
pub fn matrix_of_op(name: &str, op: &DiffOp, n: u32, gamma: &ParamVector) -> Result<OperatorMatrix> {
    matrix_of(name, op, &BasisExpander::new(n, gamma)?)
}

/// Positions of the indices satisfying `keep`, in basis order.
pub fn positions(indices: &[DegreeIndex], keep: impl Fn(&DegreeIndex) -> bool) -> Vec<usize> {
    indices.iter().enumerate().filter(|(_, nu)| keep(nu)).map(|(k, _)| k).collect()
}

/// Restriction of `m` to the coordinate subspace `sub`, or `None` if some
/// column in `sub` has a nonzero entry outside it.
pub fn restrict(m: &ExactMatrix, sub: &[usize]) -> Option<ExactMatrix> {
    for &c in sub {
        for r in 0..m.rows() {
            if !sub.contains(&r) && !m[(r, c)].is_zero() {
                return None;
            }
        }
    }
    Some(m.submatrix(sub, sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_l, build_m, Variant};
    use crate::rational::{int, rat};

    #[test]
    fn hand_example_two_by_two() {
        let g = ParamVector::zeros(2);
        let m = matrix_of_op("L:1,2", &build_l(1, 2, &g).unwrap(), 1, &g).unwrap();
        assert_eq!(m.basis, vec![DegreeIndex(vec![0, 1]), DegreeIndex(vec![1, 0])]);
        // image of P_(1,0) = -(3/2) P_(1,0) + (3/2) P_(0,1)
        let p10 = m.basis.iter().position(|nu| nu.0 == [1, 0]).unwrap();
        let p01 = m.basis.iter().position(|nu| nu.0 == [0, 1]).unwrap();
        assert_eq!(m.matrix[(p10, p10)], rat(-3, 2));
        assert_eq!(m.matrix[(p01, p10)], rat(3, 2));
        assert_eq!(m.matrix[(p10, p01)], rat(1, 2));
        assert_eq!(m.matrix[(p01, p01)], rat(-1, 2));
    }

    #[test]
    fn spectrum_of_l12_on_degree_one() {
        // trace -2, determinant 0: eigenvalues 0 and -2
        let g = ParamVector::zeros(2);
        let a = matrix_of_op("L:1,2", &build_l(1, 2, &g).unwrap(), 1, &g).unwrap().matrix;
        let tr = &a[(0, 0)] + &a[(1, 1)];
        let det = &a[(0, 0)] * &a[(1, 1)] - &a[(0, 1)] * &a[(1, 0)];
        assert_eq!((tr, det), (int(-2), int(0)));
    }

    #[test]
    fn zero_operator_gives_zero_matrix() {
        let g = ParamVector::new(vec![rat(1, 2), rat(1, 3), rat(1, 4)]);
        let m = matrix_of_op("0", &DiffOp::zero(2), 2, &g).unwrap();
        assert!(m.matrix.is_zero());
        assert_eq!(m.matrix.rows(), 3);
    }

    #[test]
    fn m_family_is_diagonal() {
        let g = ParamVector::zeros(3);
        let m2 = matrix_of_op("M:2", &build_m(2, &g, Variant::Plain).unwrap(), 1, &g).unwrap();
        assert_eq!(
            m2.matrix,
            ExactMatrix::diagonal(&[int(-3), int(-3), int(0)])
        );
    }

    #[test]
    fn raising_operator_is_rejected() {
        // x1 * D1^0 raises degree
        let g = ParamVector::zeros(2);
        let ex = BasisExpander::new(1, &g).unwrap();
        let op = DiffOp::term(Monomial::one(2), MultiPoly::var(2, 0));
        assert!(matches!(matrix_of("x1", &op, &ex), Err(Error::NotInvariant(_))));
        // a constant-coefficient first derivative lowers degree: leakage
        let op = DiffOp::first(0, MultiPoly::one(2));
        assert!(matches!(matrix_of("D1", &op, &ex), Err(Error::NotInvariant(_))));
    }

    #[test]
    fn restriction_detects_leakage() {
        let m = ExactMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(2), int(3)]]);
        assert!(restrict(&m, &[0]).is_none());
        assert_eq!(restrict(&m, &[1]).unwrap(), ExactMatrix::from_rows(vec![vec![int(3)]]));
    }
}
