#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use symalg::{ParamVector, Rational};

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// Valid parameter vectors for dimension `d`.
pub fn valid_gamma(d: usize) -> impl Strategy<Value = ParamVector> {
    prop::collection::vec(small_rational(), d + 1)
        .prop_map(ParamVector::new)
        .prop_filter("valid parameters", move |g| g.validity(d).is_valid())
}

/// Valid parameters with every `γ_j > -1`.
pub fn positive_gamma(d: usize) -> impl Strategy<Value = ParamVector> {
    valid_gamma(d).prop_filter("positive weight", |g| g.is_positive_weight())
}
