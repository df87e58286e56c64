//! Normalized moments of the simplex weight `x_1^{γ_1} ... x_d^{γ_d} (1-|x|)^{γ_{d+1}}`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::params::ParamVector;
use crate::poly::MultiPoly;
use crate::rational::{int, pochhammer, Rational};

/// `∫ x^m w / ∫ w` over the simplex, where `m` has `d+1` entries and the last
/// one is the exponent of `1 - |x|`. Closed form (Dirichlet):
/// `prod_i (γ_i+1)_{m_i} / (|γ|+d+1)_{|m|}`.
pub fn simplex_moment(m: &[u32], gamma: &ParamVector) -> Result<Rational> {
    let d = gamma.d();
    if m.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: m.len(),
        });
    }
    gamma.ensure_valid(d)?;
    let mut num = Rational::from_integer(1.into());
    for (i, &mi) in m.iter().enumerate() {
        num *= pochhammer(&(gamma.get(i + 1) + int(1)), mi as usize);
    }
    let total: u32 = m.iter().sum();
    let den = pochhammer(&(gamma.total() + int(d as i64 + 1)), total as usize);
    // nonzero under the validity conditions: |γ| ∉ Z_{<= -d-1}
    debug_assert!(!den.is_zero());
    Ok(num / den)
}

/// `<p, q>` induced by the normalized moment functional.
pub fn inner_product(p: &MultiPoly, q: &MultiPoly, gamma: &ParamVector) -> Result<Rational> {
    let d = gamma.d();
    for poly in [p, q] {
        if poly.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: poly.dim(),
            });
        }
    }
    gamma.ensure_valid(d)?;
    let prod = p * q;
    let mut acc = Rational::zero();
    let mut m = vec![0u32; d + 1];
    for (mono, c) in prod.terms() {
        m[..d].copy_from_slice(&mono.0);
        acc += c * simplex_moment(&m, gamma)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use crate::rational::{factorial, rat};

    /// Literal iterated integration of `x^a (1-|x|)^c` over the simplex, for
    /// integer exponents, innermost variable first.
    fn integrate_over_simplex(a: &[u32], c: u32) -> Rational {
        let d = a.len();
        let mut integrand = MultiPoly::monomial(Monomial(a.to_vec()), int(1))
            * MultiPoly::one_minus_partial_sum(d, d).pow(c);
        for k in (0..d).rev() {
            // antiderivative in x_k, evaluated between 0 and 1 - x_1 - ... - x_{k-1}
            let mut anti = MultiPoly::zero(d);
            for (m, v) in integrand.terms() {
                let mut m2 = m.clone();
                m2.0[k] += 1;
                anti.add_term(m2, v / int(m.0[k] as i64 + 1));
            }
            let upper = MultiPoly::one_minus_partial_sum(d, k);
            integrand = anti.substitute(k, &upper);
        }
        integrand.coeff(&Monomial::one(d))
    }

    #[test]
    fn brute_force_integration_matches_closed_form() {
        // the Dirichlet closed form itself, for reference
        let direct = |a: &[u32], c: u32| {
            let num = a.iter().fold(factorial(c as usize), |acc, &ai| acc * factorial(ai as usize));
            num / factorial((a.iter().sum::<u32>() + c) as usize + a.len())
        };
        assert_eq!(integrate_over_simplex(&[1, 0], 0), rat(1, 6));
        assert_eq!(integrate_over_simplex(&[1, 1], 0), rat(1, 24));
        for gamma_int in [[0u32, 0, 0, 0], [1, 0, 2, 1], [2, 1, 0, 0]] {
            for d in 2..=3usize {
                let g: Vec<u32> = gamma_int[..=d].to_vec();
                let params = ParamVector::new(g.iter().map(|&v| int(v as i64)).collect());
                let base = integrate_over_simplex(&g[..d], g[d]);
                for m in Monomial::up_to_degree(d + 1, if d == 3 { 4 } else { 6 }) {
                    let shifted: Vec<u32> = g.iter().zip(&m.0).map(|(a, b)| a + b).collect();
                    let lit = integrate_over_simplex(&shifted[..d], shifted[d]);
                    assert_eq!(lit, direct(&shifted[..d], shifted[d]));
                    assert_eq!(simplex_moment(&m.0, &params).unwrap(), lit / &base, "m = {:?}", m.0);
                }
            }
        }
    }

    #[test]
    fn moment_examples() {
        let g0 = ParamVector::zeros(2);
        assert_eq!(simplex_moment(&[0, 0, 0], &g0).unwrap(), int(1));
        assert_eq!(simplex_moment(&[1, 0, 0], &g0).unwrap(), rat(1, 3));
        assert_eq!(simplex_moment(&[1, 1, 0], &g0).unwrap(), rat(1, 12));
        let bad = ParamVector::new(vec![int(-1), int(0), int(0)]);
        assert!(simplex_moment(&[0, 0, 0], &bad).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let g0 = ParamVector::zeros(2);
        let one = MultiPoly::one(2);
        let x1 = MultiPoly::var(2, 0);
        let x2 = MultiPoly::var(2, 1);
        assert_eq!(inner_product(&one, &one, &g0).unwrap(), int(1));
        assert_eq!(inner_product(&x1, &x2, &g0).unwrap(), rat(1, 12));
        let p10 = x1.scale(&int(3)) - one.clone();
        let p01 = &x1 + &x2.scale(&int(2)) - one;
        assert_eq!(inner_product(&p10, &p01, &g0).unwrap(), int(0));
        assert!(inner_product(&x1, &MultiPoly::var(3, 0), &g0).is_err());
    }

    #[test]
    fn inner_product_is_symmetric_and_bilinear() {
        let g = ParamVector::new(vec![rat(1, 2), rat(-1, 3), rat(2, 5)]);
        let x1 = MultiPoly::var(2, 0);
        let x2 = MultiPoly::var(2, 1);
        let p = &x1 * &x1 - x2.scale(&rat(3, 7));
        let q = &x1 * &x2 + MultiPoly::one(2);
        let r = x2.pow(3);
        let ip = |a: &MultiPoly, b: &MultiPoly| inner_product(a, b, &g).unwrap();
        assert_eq!(ip(&p, &q), ip(&q, &p));
        let c = rat(-5, 3);
        assert_eq!(ip(&(p.scale(&c) + &r), &q), c * ip(&p, &q) + ip(&r, &q));
    }
}
