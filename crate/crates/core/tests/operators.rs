mod common;

use proptest::prelude::*;
use symalg::generators::f_factor;
use symalg::{build_f, build_l, build_l_total, build_m, DiffOp, Monomial, MultiPoly, ParamVector, Rational, Variant};

use common::valid_gamma;

fn pairs(d: usize) -> Vec<(usize, usize)> {
    (1..=d + 1).flat_map(|i| (i + 1..=d + 1).map(move |j| (i, j))).collect()
}

fn l(i: usize, j: usize, g: &ParamVector) -> DiffOp {
    build_l(i, j, g).unwrap()
}

fn gamma_up_to_five() -> impl Strategy<Value = ParamVector> {
    (2usize..=5).prop_flat_map(valid_gamma)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn total_is_the_sum_of_all_pairs(g in gamma_up_to_five()) {
        let d = g.d();
        let sum = pairs(d).into_iter().fold(DiffOp::zero(d), |acc, (i, j)| acc.checked_add(&l(i, j, &g)).unwrap());
        prop_assert_eq!(sum, build_l_total(&g).unwrap());
    }

    #[test]
    fn m_family_commutes(g in gamma_up_to_five()) {
        let d = g.d();
        let ms: Vec<DiffOp> = (1..=d).map(|j| build_m(j, &g, Variant::Plain).unwrap()).collect();
        for a in 0..d {
            for b in a + 1..d {
                prop_assert!(ms[a].commutator(&ms[b]).unwrap().is_zero(), "[M_{}, M_{}]", a + 1, b + 1);
            }
        }
    }

    #[test]
    fn kohno_drinfeld_relations(g in (2usize..=4).prop_flat_map(valid_gamma)) {
        let d = g.d();
        let idx: Vec<usize> = (1..=d + 1).collect();
        for &i in &idx {
            for &j in &idx {
                for &k in &idx {
                    if i < j && k != i && k != j {
                        let sum = l(i.min(k), i.max(k), &g).checked_add(&l(j.min(k), j.max(k), &g)).unwrap();
                        prop_assert!(l(i, j, &g).commutator(&sum).unwrap().is_zero());
                    }
                }
            }
        }
        for (i, j) in pairs(d) {
            for (k, m) in pairs(d) {
                if [k, m].iter().all(|v| *v != i && *v != j) {
                    prop_assert!(l(i, j, &g).commutator(&l(k, m, &g)).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn f_relation_as_operators(g in valid_gamma(3)) {
        for [i, j, k, m] in [[2, 3, 1, 4], [1, 2, 3, 4]] {
            let lhs = l(i, j, &g).scale(&f_factor(k, m, &g));
            prop_assert_eq!(lhs, build_f(i, j, k, m, &g).unwrap());
        }
    }

    #[test]
    fn generators_preserve_degree(g in (2usize..=3).prop_flat_map(valid_gamma)) {
        let d = g.d();
        let mut ops: Vec<DiffOp> = pairs(d).into_iter().map(|(i, j)| l(i, j, &g)).collect();
        for v in [Variant::Plain, Variant::Plus, Variant::Minus] {
            ops.extend((1..=d).map(|j| build_m(j, &g, v).unwrap()));
        }
        for op in &ops {
            for n in 0..=3 {
                for m in Monomial::of_degree(d, n) {
                    let image = op.apply(&MultiPoly::monomial(m, Rational::from_integer(1.into()))).unwrap();
                    prop_assert!(image.degree().map_or(true, |k| k <= n));
                }
            }
        }
    }
}
