//! Exact computations for the symmetry algebra of the generic superintegrable
//! system on the d-sphere.
//!
//! Everything is exact rational arithmetic: simplex Jacobi polynomials, the
//! second-order symmetry operators `L_{i,j}` acting on polynomials, the
//! multivariable Racah difference operators describing that action on the
//! Jacobi basis, and the verification checks built on top of them.

pub mod diffop;
pub mod error;
pub mod generators;
pub mod jacobi;
pub mod matrix;
pub mod moment;
pub mod params;
pub mod poly;
pub mod racah;
pub mod repr;
pub mod run;
pub mod verify;
pub mod rational;

pub use diffop::DiffOp;
pub use error::{Error, Result};
pub use generators::{build_f, build_l, build_l_total, build_m, OperatorExpr, Variant};
pub use jacobi::{basis, jacobi1d, jacobi_simplex, BasisSet, DegreeIndex};
pub use matrix::{exact_solve, ExactMatrix};
pub use moment::{inner_product, simplex_moment};
pub use params::{param_valid, ParamVector};
pub use poly::{Monomial, MultiPoly};
pub use racah::{build_b12, build_explicit_3d, predicted_action, Explicit3, RacahOp};
pub use rational::Rational;
pub use run::{difference_operator, differential_operator, operator_matrix, run, GammaSpec, Mode, OpName, RunConfig, RunOutcome, Sampler, Scope};
pub use repr::{matrix_of, BasisExpander, OperatorMatrix};
pub use verify::{verify, CheckResult, Status, Suite, VerificationReport, VerifyOptions};
