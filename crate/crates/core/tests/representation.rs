mod common;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use symalg::jacobi::binomial_count;
use symalg::{
    basis, inner_product, operator_matrix, verify, ExactMatrix, Explicit3, Monomial, OpName, ParamVector, Rational, Status, Suite,
    Variant, VerifyOptions,
};

use common::{positive_gamma, small_rational, valid_gamma};

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

// -|ν^j| (|ν^j| + |γ^j| + d + 1 - j), indices from 1
fn lambda(j: usize, nu: &[u32], g: &ParamVector) -> Rational {
    let d = g.d();
    let t = int(nu[j - 1..].iter().map(|&x| x as i64).sum());
    let s: Rational = g.as_slice()[j - 1..].iter().sum();
    -(&t) * (&t + s + int((d + 1 - j) as i64))
}

fn matrix(op: OpName, n: u32, g: &ParamVector) -> ExactMatrix {
    operator_matrix(op, n, g).unwrap().matrix
}

fn small_cell() -> impl Strategy<Value = (u32, ParamVector)> {
    (0u32..=3, 2usize..=3).prop_flat_map(|(n, d)| (Just(n), valid_gamma(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn m_is_diagonal_with_closed_form_eigenvalues((n, g) in small_cell()) {
        let d = g.d();
        for j in 1..=d {
            let m = operator_matrix(OpName::M(j, Variant::Plain), n, &g).unwrap();
            prop_assert!(m.matrix.is_diagonal());
            for (k, nu) in m.basis.iter().enumerate() {
                prop_assert_eq!(&m.matrix[(k, k)], &lambda(j, &nu.0, &g));
            }
        }
    }

    #[test]
    fn b12_equals_l12(n in 0u32..=4, g in valid_gamma(2)) {
        prop_assert_eq!(matrix(OpName::B12, n, &g), matrix(OpName::L(1, 2), n, &g));
    }

    // γ_2 + γ_3 = -1 puts a zero in a printed denominator; the value is the limit
    #[test]
    fn b12_equals_l12_at_removable_points(n in 1u32..=3, a in small_rational(), b in small_rational()) {
        let g = ParamVector::new(vec![a, b.clone(), -int(1) - b]);
        prop_assume!(g.validity(2).is_valid());
        prop_assert_eq!(matrix(OpName::B12, n, &g), matrix(OpName::L(1, 2), n, &g));
    }

    #[test]
    fn explicit_three_dimensional_operators_match(n in 0u32..=2, g in valid_gamma(3)) {
        let l = |i, j| matrix(OpName::L(i, j), n, &g);
        let sum = |ms: &[ExactMatrix]| ms.iter().skip(1).fold(ms[0].clone(), |a, m| a.checked_add(m).unwrap());
        prop_assert_eq!(matrix(OpName::Explicit(Explicit3::B134), n, &g), sum(&[l(1, 3), l(1, 4), l(3, 4)]));
        prop_assert_eq!(matrix(OpName::Explicit(Explicit3::B123), n, &g), sum(&[l(1, 2), l(1, 3), l(2, 3)]));
    }

    #[test]
    fn matrices_respect_disjoint_commutation((n, g) in small_cell()) {
        let d = g.d();
        let ms: Vec<ExactMatrix> = (1..=d).map(|j| matrix(OpName::M(j, Variant::Plain), n, &g)).collect();
        for a in 0..d {
            for b in 0..d {
                prop_assert!(ms[a].commutator(&ms[b]).unwrap().is_zero());
            }
        }
        if d == 3 {
            prop_assert!(matrix(OpName::L(1, 2), n, &g).commutator(&matrix(OpName::L(3, 4), n, &g)).unwrap().is_zero());
        }
    }

    #[test]
    fn total_is_scalar_on_each_degree((n, g) in small_cell()) {
        let t = matrix(OpName::Total, n, &g);
        let c = -int(n as i64) * (int(n as i64) + g.total() + int(g.d() as i64));
        prop_assert_eq!(t, ExactMatrix::identity(binomial_count(n as usize + g.d() - 1, g.d() - 1)).scale(&c));
    }

    #[test]
    fn difference_shifts_conserve_degree(g in valid_gamma(3)) {
        for op in [OpName::Explicit(Explicit3::B23), OpName::Explicit(Explicit3::B134), OpName::Explicit(Explicit3::B123)] {
            let r = symalg::difference_operator(op, 2, &g).unwrap();
            prop_assert!(r.conserves_total(), "{}", op);
        }
        for (plus, j) in [(true, 2), (true, 3), (false, 2), (false, 3)] {
            let r = symalg::difference_operator(OpName::Predicted { plus, j }, 2, &g).unwrap();
            prop_assert!(r.conserves_total());
        }
    }

    #[test]
    fn racah_suite_passes_everywhere((n, g) in small_cell()) {
        let report = verify(n, &g, &[Suite::Racah], VerifyOptions::default()).unwrap();
        for c in &report.checks {
            prop_assert_eq!(c.status, Status::Pass, "{}: {}", c.name, c.details);
        }
    }

    #[test]
    fn generators_are_symmetric_under_the_weight(n in 0u32..=3, g in positive_gamma(2)) {
        let b = basis(n, 2, &g).unwrap();
        let gram: Vec<Rational> = b.elements.iter().map(|(_, p)| inner_product(p, p, &g).unwrap()).collect();
        prop_assert!(gram.iter().all(|x| x > &Rational::zero()));
        let gm = ExactMatrix::diagonal(&gram);
        for op in [OpName::L(1, 2), OpName::L(1, 3), OpName::L(2, 3)] {
            let a = matrix(op, n, &g);
            prop_assert_eq!(gm.checked_mul(&a).unwrap(), a.transpose().checked_mul(&gm).unwrap());
        }
    }

    // leading forms independent, so the first n layers span all of degree <= n
    #[test]
    fn basis_leading_forms_are_independent(n in 0u32..=3, g in (2usize..=3).prop_flat_map(valid_gamma)) {
        let d = g.d();
        let b = basis(n, d, &g).unwrap();
        let top = Monomial::of_degree(d, n);
        prop_assert_eq!(b.len(), top.len());
        let cols: Vec<Vec<Rational>> = b.elements.iter().map(|(_, p)| top.iter().map(|m| p.coeff(m)).collect()).collect();
        prop_assert_eq!(ExactMatrix::from_columns(&cols).rank(), b.len());
        let total: usize = (0..=n).map(|k| basis(k, d, &g).unwrap().len()).sum();
        prop_assert_eq!(total, binomial_count(n as usize + d, d));
    }
}
