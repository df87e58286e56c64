//! Difference operators acting on functions of a degree index.
//!
//! An operator is a list of `(shift, coefficient)` pairs; it maps `f` to
//! `ν ↦ Σ c_s(ν) f(ν + s)`. On the polynomial side the same data means
//! `L P_ν = Σ_s c_s(ν) P_{ν+s}`, so the coefficient at `ν` lands in row
//! `ν + s`, column `ν` of the representation matrix.
//!
//! Printed coefficients are rational functions of the parameters. Where a
//! printed denominator vanishes, the value is the limit along a generic line
//! through the parameter point (see [`eval_or_limit`]); index factors such as
//! `ν_1` make the limit 0. Only a genuine pole is a `DegenerateParameter`.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{degree_indices, DegreeIndex};
use crate::matrix::ExactMatrix;
use crate::params::ParamVector;
use crate::rational::{int, pochhammer, rat, Rational};

pub type CoefFn = Arc<dyn Fn(&[Rational]) -> Result<Rational> + Send + Sync>;

#[derive(Clone)]
pub struct RacahTerm {
    pub shift: Vec<i64>,
    pub coef: CoefFn,
}

#[derive(Clone)]
pub struct RacahOp {
    pub name: String,
    /// number of index variables the operator acts on
    pub dim: usize,
    pub terms: Vec<RacahTerm>,
}

impl std::fmt::Debug for RacahOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let shifts: Vec<_> = self.terms.iter().map(|t| &t.shift).collect();
        f.debug_struct("RacahOp")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("shifts", &shifts)
            .finish()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefSample {
    pub nu: Vec<u32>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RacahTermJson {
    pub shift: Vec<i64>,
    pub coef_at: Vec<CoefSample>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RacahOpJson {
    pub name: String,
    pub d: usize,
    pub n: u32,
    pub terms: Vec<RacahTermJson>,
}

fn as_point(nu: &DegreeIndex) -> Vec<Rational> {
    nu.0.iter().map(|&v| int(v as i64)).collect()
}

fn point_strings(p: &[Rational]) -> Vec<String> {
    p.iter().map(|q| q.to_string()).collect()
}

impl RacahOp {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        RacahOp {
            name: name.into(),
            dim,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, shift: Vec<i64>, coef: impl Fn(&[Rational]) -> Result<Rational> + Send + Sync + 'static) {
        assert_eq!(shift.len(), self.dim);
        self.terms.push(RacahTerm {
            shift,
            coef: Arc::new(coef),
        });
    }

    /// Every stored shift has coordinate sum zero.
    pub fn conserves_total(&self) -> bool {
        self.terms.iter().all(|t| t.shift.iter().sum::<i64>() == 0)
    }

    /// Coefficients at a point, merged by shift (terms with equal shifts add).
    pub fn coefficients_at(&self, point: &[Rational]) -> Result<BTreeMap<Vec<i64>, Rational>> {
        let mut out: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for t in &self.terms {
            let c = (t.coef)(point)?;
            *out.entry(t.shift.clone()).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Matrix on `{ν : |ν| = n}` in lexicographic order. A nonzero
    /// coefficient on a shift leaving the index range is reported as
    /// `NotInvariant`.
    pub fn matrix_on(&self, n: u32) -> Result<ExactMatrix> {
        let idx = degree_indices(self.dim, n);
        let pos: BTreeMap<&DegreeIndex, usize> = idx.iter().enumerate().map(|(k, nu)| (nu, k)).collect();
        let mut m = ExactMatrix::zeros(idx.len(), idx.len());
        for (col, nu) in idx.iter().enumerate() {
            for (shift, c) in self.coefficients_at(&as_point(nu))? {
                match nu.shifted(&shift).as_ref().and_then(|mu| pos.get(mu)) {
                    Some(&row) => m[(row, col)] += c,
                    None => {
                        return Err(Error::NotInvariant(format!(
                            "{}: coefficient {c} on shift {shift:?} at nu = {:?} leaves the index range",
                            self.name, nu.0
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn to_json(&self, n: u32) -> Result<RacahOpJson> {
        let idx = degree_indices(self.dim, n);
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut samples = Vec::new();
            for nu in &idx {
                samples.push(CoefSample {
                    nu: nu.0.clone(),
                    value: (t.coef)(&as_point(nu))?.to_string(),
                });
            }
            terms.push(RacahTermJson {
                shift: t.shift.clone(),
                coef_at: samples,
            });
        }
        Ok(RacahOpJson {
            name: self.name.clone(),
            d: self.dim,
            n,
            terms,
        })
    }
}

thread_local! {
    static NUMERATOR_FIRST: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with the printed numerator-first rule: a vanishing numerator
/// gives 0 without looking at the denominator, and no limits are taken.
/// Used only to detect vanishing denominators under a nonzero numerator.
pub fn numerator_first<T>(f: impl FnOnce() -> T) -> T {
    let old = NUMERATOR_FIRST.with(|c| c.replace(true));
    let out = f();
    NUMERATOR_FIRST.with(|c| c.set(old));
    out
}

fn scanning() -> bool {
    NUMERATOR_FIRST.with(Cell::get)
}

/// `num / Π den`. Each denominator factor carries the printed linear form
/// used in the error message; any vanishing factor is reported, whatever
/// the numerator, and [`eval_or_limit`] decides what the value is.
pub fn ratio(num: Rational, den: &[(&str, Rational)], at: &[Rational]) -> Result<Rational> {
    if num.is_zero() && scanning() {
        return Ok(num);
    }
    let mut acc = num;
    for (form, v) in den {
        if v.is_zero() {
            return Err(Error::DegenerateParameter {
                form: form.to_string(),
                at: point_strings(at),
            });
        }
        acc /= v;
    }
    Ok(acc)
}

const APPROACH: [i64; 16] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59];

/// `p + t·δ` with `δ_k = 1/q_k` for distinct primes `q_k >= 3`. A linear
/// form with integer coefficients of size at most 2 is constant along this
/// line only if it does not involve the parameters at all.
pub fn along_line(p: &[Rational], t: &Rational) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .map(|(k, v)| v + t / int(APPROACH[k % APPROACH.len()] + 60 * (k / APPROACH.len()) as i64))
        .collect()
}

fn gamma_along(gamma: &ParamVector, t: &Rational) -> ParamVector {
    ParamVector::new(along_line(gamma.as_slice(), t))
}

fn horner(c: &[Rational], t: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, a| acc * t + a)
}

/// Fits `N/D` with both degrees `<= deg` through the first `2 deg + 1`
/// samples of component `c`, checks the fit on the remaining samples, and
/// returns its value at `t = 0` (inner `None` for a pole). Outer `None`
/// means the degree bound was too small.
fn limit_from_samples(samples: &[(Rational, Vec<Rational>)], c: usize, deg: usize) -> Option<Option<Rational>> {
    let fit = 2 * deg + 1;
    let rows = samples[..fit]
        .iter()
        .map(|(t, v)| {
            let mut row = Vec::with_capacity(2 * deg + 2);
            let mut p = Rational::one();
            for _ in 0..=deg {
                row.push(p.clone());
                p *= t;
            }
            let mut p = -v[c].clone();
            for _ in 0..=deg {
                row.push(p.clone());
                p *= t;
            }
            row
        })
        .collect();
    let x = ExactMatrix::from_rows(rows).kernel().into_iter().next()?;
    let (num, den) = x.split_at(deg + 1);
    for (t, v) in &samples[fit..] {
        let dt = horner(den, t);
        if dt.is_zero() || horner(num, t) / dt != v[c] {
            return None;
        }
    }
    let vd = den.iter().position(|q| !q.is_zero())?;
    Some(match num.iter().position(|q| !q.is_zero()) {
        None => Some(Rational::zero()),
        Some(vn) if vn > vd => Some(Rational::zero()),
        Some(vn) if vn == vd => Some(&num[vn] / &den[vd]),
        Some(_) => None,
    })
}

/// `f(0)`, where `f(t)` evaluates rational functions of the parameters at
/// `p + t·δ`. If a printed denominator vanishes at `t = 0`, each component
/// is rebuilt exactly as a rational function of `t` from samples and its
/// limit is returned. A genuine pole keeps the original error.
pub fn eval_or_limit(f: impl Fn(&Rational) -> Result<Vec<Rational>>) -> Result<Vec<Rational>> {
    if scanning() {
        return f(&Rational::zero());
    }
    let err = match f(&Rational::zero()) {
        Err(e @ Error::DegenerateParameter { .. }) => e,
        other => return other,
    };
    let mut samples: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let mut k = 0i64;
    let mut deg = 2;
    while deg <= 64 {
        let need = 2 * deg + 4;
        while samples.len() < need {
            k += 1;
            if k > 10 * need as i64 {
                return Err(err);
            }
            let t = rat(1, k);
            match f(&t) {
                Ok(v) => samples.push((t, v)),
                Err(Error::DegenerateParameter { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let mut out = Vec::new();
        for c in 0..samples[0].1.len() {
            match limit_from_samples(&samples, c, deg) {
                Some(Some(v)) => out.push(v),
                Some(None) => return Err(err),
                None => break,
            }
        }
        if out.len() == samples[0].1.len() {
            return Ok(out);
        }
        deg *= 2;
    }
    Err(err)
}

fn prod(fs: &[Rational]) -> Rational {
    fs.iter().fold(Rational::one(), |a, b| a * b)
}

// ---------------------------------------------------------------------------
// Explicit two- and three-variable operators

fn need_dim(gamma: &ParamVector, d: usize, name: &str) -> Result<()> {
    if gamma.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            found: gamma.d() + 1,
        });
    }
    gamma.ensure_valid(d).map_err(|e| match e {
        Error::InvalidParameter { mut violations } => {
            violations.insert(0, format!("{name} requires valid parameters"));
            Error::InvalidParameter { violations }
        }
        other => other,
    })
}

/// `c^{-,+}`, `c^{0,0}`, `c^{+,-}` of the three-term operator representing `L_{1,2}` for d = 2.
pub fn b12_coefficients(gamma: &ParamVector, nu: &[Rational]) -> Result<[Rational; 3]> {
    let v = eval_or_limit(|t| b12_printed(&gamma_along(gamma, t), nu).map(|a| a.to_vec()))?;
    Ok(v.try_into().expect("three coefficients"))
}

fn b12_printed(gamma: &ParamVector, nu: &[Rational]) -> Result<[Rational; 3]> {
    let (g1, g2, g3) = (gamma.get(1).clone(), gamma.get(2).clone(), gamma.get(3).clone());
    let (n1, n2) = (nu[0].clone(), nu[1].clone());
    let one = int(1);
    let two = int(2);
    let g23 = &g2 + &g3;
    let minus_plus = ratio(
        prod(&[n1.clone(), &g2 + &n2 + &one, &g23 + &n2 + &one, &g1 + &g23 + &n1 + &two * &n2 + &two]),
        &[("gamma_2+gamma_3+2nu_2+1", &g23 + &two * &n2 + &one), ("gamma_2+gamma_3+2nu_2+2", &g23 + &two * &n2 + &two)],
        nu,
    )?;
    let plus_minus = ratio(
        prod(&[n2.clone(), &g1 + &n1 + &one, &g3 + &n2, &g23 + &n1 + &two * &n2 + &one]),
        &[("gamma_2+gamma_3+2nu_2", &g23 + &two * &n2), ("gamma_2+gamma_3+2nu_2+1", &g23 + &two * &n2 + &one)],
        nu,
    )?;
    let diag = -(&n1 + &n2 + &two * &n1 * &n2 + &n2 * &g1 + &n1 * &g2)
        + ratio(
            prod(&[&n1 + &one, n2.clone(), &g1 + &n1 + &one, &g2 + &n2]),
            &[("gamma_2+gamma_3+2nu_2", &g23 + &two * &n2)],
            nu,
        )?
        - ratio(
            prod(&[n1.clone(), &n2 + &one, &g1 + &n1, &g2 + &n2 + &one]),
            &[("gamma_2+gamma_3+2nu_2+2", &g23 + &two * &n2 + &two)],
            nu,
        )?;
    Ok([minus_plus, diag, plus_minus])
}

pub fn build_b12(gamma: &ParamVector) -> Result<RacahOp> {
    need_dim(gamma, 2, "B12")?;
    let mut op = RacahOp::new("B12", 2);
    for (k, shift) in [vec![-1, 1], vec![0, 0], vec![1, -1]].into_iter().enumerate() {
        let g = gamma.clone();
        op.push(shift, move |nu| Ok(b12_coefficients(&g, nu)?[k].clone()));
    }
    Ok(op)
}

/// Shorthand sums for three variables.
struct Sums3 {
    g1: Rational,
    g2: Rational,
    g3: Rational,
    g4: Rational,
    g34: Rational,
    g134: Rational,
    g234: Rational,
    g1234: Rational,
    n1: Rational,
    n2: Rational,
    n3: Rational,
    n13: Rational,
    n23: Rational,
    n123: Rational,
}

impl Sums3 {
    fn new(gamma: &ParamVector, nu: &[Rational]) -> Self {
        let g = |i| gamma.get(i).clone();
        let g34 = g(3) + g(4);
        let g234 = g(2) + &g34;
        Sums3 {
            g1: g(1),
            g2: g(2),
            g3: g(3),
            g4: g(4),
            g134: g(1) + &g34,
            g1234: g(1) + &g234,
            g34,
            g234,
            n1: nu[0].clone(),
            n2: nu[1].clone(),
            n3: nu[2].clone(),
            n13: &nu[0] + &nu[2],
            n23: &nu[1] + &nu[2],
            n123: &nu[0] + &nu[1] + &nu[2],
        }
    }
}

fn c(k: i64) -> Rational {
    int(k)
}

type Printed = fn(&ParamVector, &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>>;

fn with_limit(gamma: &ParamVector, nu: &[Rational], printed: Printed) -> Result<Vec<(Vec<i64>, Rational)>> {
    if let Ok(v) = printed(gamma, nu) {
        return Ok(v);
    }
    // the shift list does not depend on the point
    let shifts: Vec<Vec<i64>> = printed(&gamma_along(gamma, &rat(1, 1000)), nu)?.into_iter().map(|(s, _)| s).collect();
    let values = eval_or_limit(|t| Ok(printed(&gamma_along(gamma, t), nu)?.into_iter().map(|(_, v)| v).collect()))?;
    Ok(shifts.into_iter().zip(values).collect())
}

/// Coefficients of the operator representing `L_{2,3}` for d = 3, keyed by shift.
pub fn b23_coefficients(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    with_limit(gamma, nu, b23_printed)
}

fn b23_printed(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    let s = Sums3::new(gamma, nu);
    let down = ratio(
        prod(&[
            s.n2.clone(),
            &s.g3 + &s.n3 + c(1),
            &s.g34 + &s.n3 + c(1),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(2),
        ]),
        &[
            ("gamma_34+2nu_3+1", &s.g34 + c(2) * &s.n3 + c(1)),
            ("gamma_34+2nu_3+2", &s.g34 + c(2) * &s.n3 + c(2)),
        ],
        nu,
    )?;
    let up = ratio(
        prod(&[
            s.n3.clone(),
            &s.g2 + &s.n2 + c(1),
            &s.g4 + &s.n3,
            &s.g34 + &s.n2 + c(2) * &s.n3 + c(1),
        ]),
        &[
            ("gamma_34+2nu_3", &s.g34 + c(2) * &s.n3),
            ("gamma_34+2nu_3+1", &s.g34 + c(2) * &s.n3 + c(1)),
        ],
        nu,
    )?;
    let diag = -(&s.n2 + &s.n3 + c(2) * &s.n2 * &s.n3 + &s.n2 * &s.g3 + &s.n3 * &s.g2)
        + ratio(
            prod(&[&s.n2 + c(1), s.n3.clone(), &s.g2 + &s.n2 + c(1), &s.g3 + &s.n3]),
            &[("gamma_34+2nu_3", &s.g34 + c(2) * &s.n3)],
            nu,
        )?
        - ratio(
            prod(&[s.n2.clone(), &s.n3 + c(1), &s.g2 + &s.n2, &s.g3 + &s.n3 + c(1)]),
            &[("gamma_34+2nu_3+2", &s.g34 + c(2) * &s.n3 + c(2))],
            nu,
        )?;
    Ok(vec![(vec![0, -1, 1], down), (vec![0, 0, 0], diag), (vec![0, 1, -1], up)])
}

/// Coefficients of the operator representing `L_{1,3,4}` for d = 3.
pub fn b134_coefficients(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    with_limit(gamma, nu, b134_printed)
}

fn b134_printed(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    let s = Sums3::new(gamma, nu);
    let w = &s.g234 + c(2) * &s.n23;
    let up = -ratio(
        prod(&[
            s.n2.clone(),
            &s.g1 + &s.n1 + c(1),
            &s.g34 + &s.n2 + c(2) * &s.n3 + c(1),
            &s.g234 + &s.n1 + c(2) * &s.n23 + c(2),
        ]),
        &[("gamma_234+2nu_23+1", &w + c(1)), ("gamma_234+2nu_23+2", &w + c(2))],
        nu,
    )?;
    let down = -ratio(
        prod(&[
            s.n1.clone(),
            &s.g2 + &s.n2 + c(1),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(2),
            &s.g1234 + &s.n1 + c(2) * &s.n23 + c(3),
        ]),
        &[("gamma_234+2nu_23+2", &w + c(2)), ("gamma_234+2nu_23+3", &w + c(3))],
        nu,
    )?;
    let diag = -(&s.n13 * (&s.g134 + &s.n13 + c(2)))
        + ratio(
            prod(&[s.n1.clone(), &s.n2 + c(1), &s.g1 + &s.n1, &s.g2 + &s.n2 + c(1)]),
            &[("gamma_234+2nu_23+3", &w + c(3))],
            nu,
        )?
        - ratio(
            prod(&[&s.n1 + c(1), s.n2.clone(), &s.g1 + &s.n1 + c(1), &s.g2 + &s.n2]),
            &[("gamma_234+2nu_23+1", &w + c(1))],
            nu,
        )?;
    Ok(vec![(vec![1, -1, 0], up), (vec![0, 0, 0], diag), (vec![-1, 1, 0], down)])
}

/// Coefficients of the nine-term operator representing `L_{1,2,3}` for d = 3.
pub fn b123_coefficients(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    with_limit(gamma, nu, b123_printed)
}

fn b123_printed(gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
    let s = Sums3::new(gamma, nu);
    let v = &s.g34 + c(2) * &s.n3;
    let w = &s.g234 + c(2) * &s.n23;
    let v0 = ("gamma_34+2nu_3", v.clone());
    let v1 = ("gamma_34+2nu_3+1", &v + c(1));
    let v2 = ("gamma_34+2nu_3+2", &v + c(2));
    let w1 = ("gamma_234+2nu_23+1", &w + c(1));
    let w2 = ("gamma_234+2nu_23+2", &w + c(2));
    let w3 = ("gamma_234+2nu_23+3", &w + c(3));
    // recurring numerator blocks
    let a = c(2) * &s.n3 * (&s.g34 + &s.n3 + c(1)) + (&s.g4 + c(1)) * &s.g34;
    let b1 = c(2) * &s.n1 * (&s.g1234 + &s.n1 + c(2) * &s.n23 + c(3)) + (&w + c(3)) * (&s.g1234 + c(2) * &s.n23 + c(2));

    let t_m0p = ratio(
        prod(&[
            s.n1.clone(),
            &s.g3 + &s.n3 + c(1),
            &s.g34 + &s.n3 + c(1),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(2),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(3),
            &s.g1234 + &s.n1 + c(2) * &s.n23 + c(3),
        ]),
        &[v1.clone(), v2.clone(), w2.clone(), w3.clone()],
        nu,
    )?;
    let t_m2m = ratio(
        prod(&[
            s.n1.clone(),
            s.n3.clone(),
            &s.g2 + &s.n2 + c(1),
            &s.g2 + &s.n2 + c(2),
            &s.g4 + &s.n3,
            &s.g1234 + &s.n1 + c(2) * &s.n23 + c(3),
        ]),
        &[v0.clone(), v1.clone(), w2.clone(), w3.clone()],
        nu,
    )?;
    let t_pmp = ratio(
        prod(&[
            &s.n2 - c(1),
            s.n2.clone(),
            &s.g1 + &s.n1 + c(1),
            &s.g3 + &s.n3 + c(1),
            &s.g34 + &s.n3 + c(1),
            &s.g234 + &s.n1 + c(2) * &s.n23 + c(2),
        ]),
        &[v1.clone(), v2.clone(), w1.clone(), w2.clone()],
        nu,
    )?;
    let t_p0m = ratio(
        prod(&[
            s.n3.clone(),
            &s.g1 + &s.n1 + c(1),
            &s.g4 + &s.n3,
            &s.g34 + &s.n2 + c(2) * &s.n3,
            &s.g34 + &s.n2 + c(2) * &s.n3 + c(1),
            &s.g234 + &s.n1 + c(2) * &s.n23 + c(2),
        ]),
        &[v0.clone(), v1.clone(), w1.clone(), w2.clone()],
        nu,
    )?;
    let t_0mp = ratio(
        prod(&[
            s.n2.clone(),
            &s.g3 + &s.n3 + c(1),
            &s.g34 + &s.n3 + c(1),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(2),
            c(2) * &s.n123 * (&s.g1234 + &s.n123 + c(3))
                + c(2) * &s.n23 * (&s.g234 + &s.n23 + c(2))
                + (&s.g234 + c(3)) * (&s.g1234 + c(2)),
        ]),
        &[v1.clone(), v2.clone(), w1.clone(), w3.clone()],
        nu,
    )?;
    let t_0pm = ratio(
        prod(&[
            s.n3.clone(),
            &s.g2 + &s.n2 + c(1),
            &s.g4 + &s.n3,
            &s.g34 + &s.n2 + c(2) * &s.n3 + c(1),
            b1.clone(),
        ]),
        &[v0.clone(), v1.clone(), w1.clone(), w3.clone()],
        nu,
    )?;
    let t_mp0 = ratio(
        prod(&[
            s.n1.clone(),
            &s.g2 + &s.n2 + c(1),
            &s.g234 + &s.n2 + c(2) * &s.n3 + c(2),
            &s.g1234 + &s.n1 + c(2) * &s.n23 + c(3),
            a.clone(),
        ]),
        &[v0.clone(), v2.clone(), w2.clone(), w3.clone()],
        nu,
    )?;
    let t_pm0 = ratio(
        prod(&[
            s.n2.clone(),
            &s.g1 + &s.n1 + c(1),
            &s.g34 + &s.n2 + c(2) * &s.n3 + c(1),
            &s.g234 + &s.n1 + c(2) * &s.n23 + c(2),
            a.clone(),
        ]),
        &[v0.clone(), v2.clone(), w1.clone(), w2.clone()],
        nu,
    )?;
    let t_000 = -(&s.n123 * (&s.g1234 + &s.n123 + c(3))) - rat(1, 2) * (&s.g4 + c(1)) * (&s.g1234 + c(2))
        + ratio(
            prod(&[
                a,
                c(2) * &s.n2 * (&s.g234 + &s.n2 + c(2) * &s.n3 + c(2))
                    + (&v + c(2)) * (&s.g234 + c(2) * &s.n3 + c(1)),
                b1,
                rat(1, 2),
            ]),
            &[v0, v2, w1, w3],
            nu,
        )?;
    Ok(vec![
        (vec![-1, 0, 1], t_m0p),
        (vec![-1, 2, -1], t_m2m),
        (vec![1, -2, 1], t_pmp),
        (vec![1, 0, -1], t_p0m),
        (vec![0, -1, 1], t_0mp),
        (vec![0, 1, -1], t_0pm),
        (vec![-1, 1, 0], t_mp0),
        (vec![1, -1, 0], t_pm0),
        (vec![0, 0, 0], t_000),
    ])
}

/// Which hand-written three-variable operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Explicit3 {
    B23,
    B134,
    B123,
}

impl Explicit3 {
    pub fn name(self) -> &'static str {
        match self {
            Explicit3::B23 => "B23",
            Explicit3::B134 => "B134",
            Explicit3::B123 => "B123",
        }
    }

    fn coefficients(self, gamma: &ParamVector, nu: &[Rational]) -> Result<Vec<(Vec<i64>, Rational)>> {
        match self {
            Explicit3::B23 => b23_coefficients(gamma, nu),
            Explicit3::B134 => b134_coefficients(gamma, nu),
            Explicit3::B123 => b123_coefficients(gamma, nu),
        }
    }
}

pub fn build_explicit_3d(which: Explicit3, gamma: &ParamVector) -> Result<RacahOp> {
    need_dim(gamma, 3, which.name())?;
    let shifts: Vec<Vec<i64>> = which
        .coefficients(gamma, &[int(0), int(0), int(0)])?
        .into_iter()
        .map(|(s, _)| s)
        .collect();
    let mut op = RacahOp::new(which.name(), 3);
    for (k, shift) in shifts.into_iter().enumerate() {
        let g = gamma.clone();
        op.push(shift, move |nu| Ok(which.coefficients(&g, nu)?.swap_remove(k).1));
    }
    Ok(op)
}

// ---------------------------------------------------------------------------
// General operators in the variables z_1, ..., z_j

/// The four bilinear forms and two denominators attached to position `i`,
/// in the order `B^{0,0}, B^{0,1}, B^{1,0}, B^{1,1}, b^0, b^1`.
/// `z` is indexed from 0 with `z[0] = 0`; `beta` from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub b00: Rational,
    pub b01: Rational,
    pub b10: Rational,
    pub b11: Rational,
    pub den0: Rational,
    pub den1: Rational,
}

impl Kernel {
    pub fn upper(&self, a: u8, b: u8) -> &Rational {
        match (a, b) {
            (0, 0) => &self.b00,
            (0, 1) => &self.b01,
            (1, 0) => &self.b10,
            _ => &self.b11,
        }
    }

    pub fn lower(&self, a: u8) -> &Rational {
        if a == 0 {
            &self.den0
        } else {
            &self.den1
        }
    }
}

pub fn racah_kernel(i: usize, z: &[Rational], beta: &[Rational]) -> Kernel {
    let one = int(1);
    let two = int(2);
    let (zi, zj) = (&z[i], &z[i + 1]);
    let (bi, bj) = (&beta[i], &beta[i + 1]);
    let half = rat(1, 2);
    Kernel {
        b00: zi * (zi + bi) + zj * (zj + bj) + &half * (bi + &one) * (bj - &one),
        b01: (zj + zi + bj) * (zj - zi + bj - bi),
        b10: (zj - zi) * (zj + zi + bj),
        b11: (zj + zi + bj) * (zj + zi + bj + &one),
        den0: &half * (&two * zi + bi + &one) * (&two * zi + bi - &one),
        den1: (&two * zi + bi + &one) * (&two * zi + bi),
    }
}

/// `C_{j,ν}(z; β)` for a pattern `ν ∈ {-1,0,1}^j`; `z = (0, z_1, ..., z_{j+1})`.
/// Negative entries are handled by the involutions `z_k ↦ -z_k - β_k`.
pub fn racah_c(pattern: &[i8], z: &[Rational], beta: &[Rational]) -> Result<Rational> {
    let j = pattern.len();
    assert!(z.len() >= j + 2 && beta.len() >= j + 2, "need z_0..z_{{j+1}} and beta_0..beta_{{j+1}}");
    let mut zz = z.to_vec();
    for k in 1..=j {
        if pattern[k - 1] < 0 {
            zz[k] = -&z[k] - &beta[k];
        }
    }
    let full: Vec<u8> = std::iter::once(0)
        .chain(pattern.iter().map(|&p| p.unsigned_abs()))
        .chain(std::iter::once(0))
        .collect();
    let kernels: Vec<Kernel> = (0..=j).map(|k| racah_kernel(k, &zz, beta)).collect();
    let mut acc = (0..=j).fold(Rational::one(), |acc, k| acc * kernels[k].upper(full[k], full[k + 1]));
    if acc.is_zero() && scanning() {
        return Ok(acc);
    }
    for k in 1..=j {
        let den = kernels[k].lower(full[k]);
        if den.is_zero() {
            return Err(Error::DegenerateParameter {
                form: format!("b_{k}^{}", full[k]),
                at: point_strings(&z[1..]),
            });
        }
        acc /= den;
    }
    Ok(acc)
}

/// All patterns in `{-1,0,1}^j`, lexicographic.
pub fn patterns(j: usize) -> Vec<Vec<i8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..j {
        out = out
            .into_iter()
            .flat_map(|p| {
                [-1i8, 0, 1].into_iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// `z_{j+1}(z_{j+1}+β_{j+1}) + (β_0+1)(β_{j+1}-1)/2`, removed from the identity term.
pub fn racah_constant(j: usize, z_bound: &Rational, beta: &[Rational]) -> Rational {
    z_bound * (z_bound + &beta[j + 1]) + rat(1, 2) * (&beta[0] + int(1)) * (&beta[j + 1] - int(1))
}

/// Coefficient of the general operator `B_j` on a pattern, as a function of
/// `(z_1, ..., z_j)` with boundary value `z_{j+1}`.
pub fn racah_general_coefficient(pattern: &[i8], z_inner: &[Rational], z_bound: &Rational, beta: &[Rational]) -> Result<Rational> {
    let v = eval_or_limit(|t| Ok(vec![general_printed(pattern, z_inner, z_bound, &along_line(beta, t))?]))?;
    Ok(v.into_iter().next().expect("one value"))
}

fn general_printed(pattern: &[i8], z_inner: &[Rational], z_bound: &Rational, beta: &[Rational]) -> Result<Rational> {
    let j = pattern.len();
    let mut z = Vec::with_capacity(j + 2);
    z.push(int(0));
    z.extend_from_slice(&z_inner[..j]);
    z.push(z_bound.clone());
    let mut v = racah_c(pattern, &z, beta)?;
    if pattern.iter().all(|&p| p == 0) {
        v -= racah_constant(j, z_bound, beta);
    }
    Ok(v)
}

/// `B_j(z; β)` acting on functions of `(z_1, ..., z_j)`; `z_{j+1}` is fixed.
pub fn build_racah_general(j: usize, beta: &[Rational], z_bound: Rational) -> Result<RacahOp> {
    if j == 0 || beta.len() < j + 2 {
        return Err(Error::IndexOutOfRange(format!(
            "B_{j} needs j >= 1 and beta_0..beta_{}, got {} values",
            j + 1,
            beta.len()
        )));
    }
    let mut op = RacahOp::new(format!("B_{j}"), j);
    for p in patterns(j) {
        let beta = beta.to_vec();
        let zb = z_bound.clone();
        let shift = p.iter().map(|&s| s as i64).collect();
        op.push(shift, move |z| racah_general_coefficient(&p, z, &zb, &beta));
    }
    Ok(op)
}

/// Compares `C_{flip_k(s)}(z) = C_s(I_k z)` for every pattern `s` at the
/// point, for `k = 1..=j`, and invariance in the boundary value for `k = j+1`.
/// Returns the first mismatch as `(k, pattern)`.
pub fn involution_mismatch(j: usize, beta: &[Rational], z_inner: &[Rational], z_bound: &Rational) -> Result<Option<(usize, Vec<i8>)>> {
    for k in 1..=j + 1 {
        for p in patterns(j) {
            let (lhs, rhs) = if k <= j {
                let mut flipped = p.clone();
                flipped[k - 1] = -flipped[k - 1];
                let mut iz = z_inner.to_vec();
                iz[k - 1] = -&z_inner[k - 1] - &beta[k];
                (
                    racah_general_coefficient(&flipped, z_inner, z_bound, beta)?,
                    racah_general_coefficient(&p, &iz, z_bound, beta)?,
                )
            } else {
                let ib = -z_bound - &beta[j + 1];
                (
                    racah_general_coefficient(&p, z_inner, z_bound, beta)?,
                    racah_general_coefficient(&p, z_inner, &ib, beta)?,
                )
            };
            if lhs != rhs {
                return Ok(Some((k, p)));
            }
        }
    }
    Ok(None)
}

/// Coefficients of `A ∘ B` at a point: `Σ_{s+t=u} A_s(z) B_t(z+s)`.
pub fn compose_at(a: &RacahOp, b: &RacahOp, point: &[Rational]) -> Result<BTreeMap<Vec<i64>, Rational>> {
    let mut out: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (s, cs) in a.coefficients_at(point)? {
        let moved: Vec<Rational> = point.iter().zip(&s).map(|(p, &d)| p + int(d)).collect();
        for (t, ct) in b.coefficients_at(&moved)? {
            let u: Vec<i64> = s.iter().zip(&t).map(|(x, y)| x + y).collect();
            *out.entry(u).or_insert_with(Rational::zero) += &cs * ct;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Same operator acting on `dim >= op.dim` variables; the extra ones are not shifted.
fn lift(op: &RacahOp, dim: usize) -> RacahOp {
    let mut out = RacahOp::new(op.name.clone(), dim);
    for t in &op.terms {
        let mut shift = t.shift.clone();
        shift.resize(dim, 0);
        let coef = t.coef.clone();
        out.push(shift, move |z| coef(z));
    }
    out
}

/// `[B_a, B_b]` at one point of `(z_1, ..., z_m)`, `m = max(a, b)`. The
/// lower operator sees the variable `z_{a+1}` as its boundary value; the top
/// one uses the fixed `z_{m+1}`.
pub fn racah_commutator_at(a: usize, b: usize, beta: &[Rational], z_top: &Rational, point: &[Rational]) -> Result<BTreeMap<Vec<i64>, Rational>> {
    let m = a.max(b);
    let build = |j: usize| -> Result<RacahOp> {
        if j == m {
            return Ok(lift(&build_racah_general(j, beta, z_top.clone())?, m));
        }
        // boundary read from the point itself
        let mut op = RacahOp::new(format!("B_{j}"), m);
        for p in patterns(j) {
            let beta = beta.to_vec();
            let mut shift: Vec<i64> = p.iter().map(|&s| s as i64).collect();
            shift.resize(m, 0);
            op.push(shift, move |z| racah_general_coefficient(&p, &z[..j], &z[j], &beta));
        }
        Ok(op)
    };
    let (ba, bb) = (build(a)?, build(b)?);
    let ab = compose_at(&ba, &bb, point)?;
    let ba_ = compose_at(&bb, &ba, point)?;
    let mut diff = ab;
    for (u, v) in ba_ {
        *diff.entry(u).or_insert_with(Rational::zero) -= v;
    }
    diff.retain(|_, v| !v.is_zero());
    Ok(diff)
}

// ---------------------------------------------------------------------------
// Parameter maps and the predicted actions of M_j^±

/// `(β⁺, β⁻)`, each with entries `β_0, ..., β_d`.
pub fn parameter_maps(gamma: &ParamVector, n: u32) -> (Vec<Rational>, Vec<Rational>) {
    let d = gamma.d();
    let mut plus = vec![gamma.get(1).clone()];
    for j in 1..=d {
        plus.push(-gamma.tail_sum(j + 1) - int(2 * n as i64 + d as i64 - j as i64));
    }
    let minus = (0..=d).map(|j| gamma.tail_sum(d + 1 - j) + int(j as i64)).collect();
    (plus, minus)
}

/// `g(ν) = (1+γ_1)_{ν_1} / (|γ|+2n+d-ν_1)_{ν_1}`.
pub fn gauge_factor(nu1: u32, n: u32, gamma: &ParamVector) -> Result<Rational> {
    let d = gamma.d() as i64;
    let num = pochhammer(&(gamma.get(1) + int(1)), nu1 as usize);
    let den = pochhammer(&(gamma.total() + int(2 * n as i64 + d - nu1 as i64)), nu1 as usize);
    if den.is_zero() {
        return Err(Error::DegenerateParameter {
            form: "(|gamma|+2n+d-nu_1)_{nu_1}".into(),
            at: vec![nu1.to_string()],
        });
    }
    Ok(num / den)
}

/// Predicted action of `M_j^+` (plus) or `M_j^-` (minus) on `{ν : |ν| = n}`.
pub fn predicted_action(plus: bool, j: usize, n: u32, gamma: &ParamVector) -> Result<RacahOp> {
    let d = gamma.d();
    gamma.ensure_valid(d)?;
    if j < 2 || j > d {
        return Err(Error::IndexOutOfRange(format!("predicted action needs 2 <= j <= {d}, got {j}")));
    }
    let (bp, bm) = parameter_maps(gamma, n);
    let name = format!("R{}:{j}", if plus { '+' } else { '-' });
    let mut op = RacahOp::new(name, d);
    if plus {
        let jj = j - 1;
        let extra = int(n as i64) * (int(n as i64) + &bp[j] - &bp[0] - int(1));
        for p in patterns(jj) {
            let mut shift = vec![0i64; d];
            for l in 0..jj {
                shift[l] += p[l] as i64;
                shift[l + 1] -= p[l] as i64;
            }
            let beta = bp.clone();
            let g = gamma.clone();
            let diag = p.iter().all(|&s| s == 0);
            let extra = extra.clone();
            let sh = shift.clone();
            op.push(shift, move |nu| {
                let z: Vec<Rational> = (1..=jj + 1).map(|l| nu[..l].iter().sum()).collect();
                let mut v = racah_general_coefficient(&p, &z[..jj], &z[jj], &beta)?;
                if !v.is_zero() {
                    let nu1 = nu[0].to_integer();
                    let mu1 = &nu1 + sh[0];
                    let to_u32 = |q: &num_bigint::BigInt| u32::try_from(q).map_err(|_| Error::IndexOutOfRange(format!("nu_1 = {q}")));
                    v *= gauge_factor(to_u32(&mu1)?, n, &g)? / gauge_factor(to_u32(&nu1)?, n, &g)?;
                }
                if diag {
                    v += &extra;
                }
                Ok(v)
            });
        }
    } else {
        let jj = d + 1 - j;
        for p in patterns(jj) {
            let mut shift = vec![0i64; d];
            for l in 1..=jj {
                shift[d - l] += p[l - 1] as i64;
                shift[d - l - 1] -= p[l - 1] as i64;
            }
            let beta = bm.clone();
            op.push(shift, move |nu| {
                let z: Vec<Rational> = (1..=jj + 1).map(|l| nu[d - l..].iter().sum()).collect();
                racah_general_coefficient(&p, &z[..jj], &z[jj], &beta)
            });
        }
    }
    Ok(op)
}

/// Evaluates every difference-side coefficient used for `(d, n, γ)` on the
/// whole index range under the numerator-first rule and reports the first
/// vanishing denominator whose numerator does not vanish.
pub fn prescan(n: u32, gamma: &ParamVector) -> Result<()> {
    let d = gamma.d();
    gamma.ensure_valid(d)?;
    let mut ops = Vec::new();
    if d == 2 {
        ops.push(build_b12(gamma)?);
    }
    if d == 3 {
        for w in [Explicit3::B23, Explicit3::B134, Explicit3::B123] {
            ops.push(build_explicit_3d(w, gamma)?);
        }
    }
    for j in 2..=d {
        ops.push(predicted_action(true, j, n, gamma)?);
        ops.push(predicted_action(false, j, n, gamma)?);
    }
    numerator_first(|| {
        for nu in degree_indices(d, n) {
            let p = as_point(&nu);
            for op in &ops {
                op.coefficients_at(&p)?;
            }
        }
        Ok(())
    })
}

/// `D = 2 c^{-,+} c^{+,-} (1 + 2ν_2 + γ_2 + γ_3)` for interior `ν` (d = 2).
pub fn irreducibility_certificate_2d(nu: &DegreeIndex, gamma: &ParamVector) -> Result<Rational> {
    need_dim(gamma, 2, "certificate")?;
    if nu.d() != 2 || nu.0[0] == 0 || nu.0[1] == 0 {
        return Err(Error::IndexOutOfRange(format!("certificate needs nu_1 > 0 and nu_2 > 0, got {:?}", nu.0)));
    }
    let [mp, _, pm] = b12_coefficients(gamma, &as_point(nu))?;
    Ok(int(2) * mp * pm * (int(1 + 2 * nu.0[1] as i64) + gamma.get(2) + gamma.get(3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[(i64, i64)]) -> ParamVector {
        ParamVector::new(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| int(k)).collect()
    }

    #[test]
    fn b12_examples() {
        let g = ParamVector::zeros(2);
        let [mp, diag, _] = b12_coefficients(&g, &pt(&[1, 0])).unwrap();
        assert_eq!((mp, diag), (rat(3, 2), rat(-3, 2)));
        let [_, diag, pm] = b12_coefficients(&g, &pt(&[0, 1])).unwrap();
        assert_eq!((pm, diag), (rat(1, 2), rat(-1, 2)));
        let g = pv(&[(1, 3), (2, 7), (-1, 5)]);
        for n2 in 0..5 {
            assert!(b12_coefficients(&g, &pt(&[0, n2])).unwrap()[0].is_zero());
        }
        let op = build_b12(&ParamVector::zeros(2)).unwrap();
        assert!(op.conserves_total());
        // columns are images of (0,1), (1,0) in lexicographic order
        let m = op.matrix_on(1).unwrap();
        assert_eq!(m.to_rows(), vec![vec![rat(-1, 2), rat(3, 2)], vec![rat(1, 2), rat(-3, 2)]]);
    }

    #[test]
    fn b12_boundary_zero_with_vanishing_denominator() {
        // γ_2 + γ_3 = 0: the denominator γ_2+γ_3+2ν_2 vanishes at ν_2 = 0,
        // but every coefficient it divides carries the factor ν_2
        let g = pv(&[(1, 2), (1, 3), (-1, 3)]);
        let [_, _, pm] = b12_coefficients(&g, &pt(&[2, 0])).unwrap();
        assert!(pm.is_zero());
    }

    #[test]
    fn vanishing_denominator_reports_form() {
        match ratio(int(3), &[("a+1", int(2)), ("b", int(0))], &pt(&[1, 2])) {
            Err(Error::DegenerateParameter { form, at }) => {
                assert_eq!(form, "b");
                assert_eq!(at, vec!["1", "2"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(ratio(int(0), &[("b", int(0))], &[]).is_err());
    }

    #[test]
    fn explicit_3d_examples() {
        let g = ParamVector::zeros(3);
        let b23 = b23_coefficients(&g, &pt(&[0, 1, 0])).unwrap();
        assert_eq!(b23[0], (vec![0, -1, 1], rat(3, 2)));
        let g = pv(&[(1, 2), (1, 3), (1, 4), (1, 5)]);
        for nu in [[2, 1, 0], [0, 0, 3], [1, 1, 1]] {
            let b = b123_coefficients(&g, &pt(&nu)).unwrap();
            assert!(b[2].1.is_zero(), "{nu:?}");
        }
        for nu in [[0, 2, 1], [0, 0, 3]] {
            let b = b134_coefficients(&g, &pt(&nu)).unwrap();
            assert!(b[2].1.is_zero());
        }
        assert_eq!(build_explicit_3d(Explicit3::B23, &g).unwrap().terms.len(), 3);
        assert_eq!(build_explicit_3d(Explicit3::B134, &g).unwrap().terms.len(), 3);
        let b123 = build_explicit_3d(Explicit3::B123, &g).unwrap();
        assert_eq!(b123.terms.len(), 9);
        assert!(b123.conserves_total());
        assert!(b123.terms.iter().any(|t| t.shift == vec![-1, 2, -1]));
        assert!(build_b12(&g).is_err());
    }

    #[test]
    fn kernel_examples() {
        let z = pt(&[0, 1, 0]);
        let beta = pt(&[0, 2, 0]);
        assert_eq!(racah_kernel(0, &z, &beta).b00, rat(7, 2));
        assert_eq!(racah_kernel(1, &z, &beta).den0, rat(15, 2));
        let z = vec![int(0), rat(5, 3), rat(5, 3)];
        assert!(racah_kernel(1, &z, &pt(&[1, 2, 3])).b10.is_zero());
    }

    #[test]
    fn c_examples() {
        let beta = vec![rat(1, 3), rat(2, 5), rat(-3, 7)];
        let z = vec![int(0), rat(7, 2), rat(11, 3)];
        let k0 = racah_kernel(0, &z, &beta);
        let k1 = racah_kernel(1, &z, &beta);
        // ν_1 = 0 still contributes b_1^0 to the denominator
        assert_eq!(racah_c(&[0], &z, &beta).unwrap(), &k0.b00 * &k1.b00 / &k1.den0);
        assert_eq!(racah_c(&[1], &z, &beta).unwrap(), &k0.b01 * &k1.b10 / &k1.den1);
        // the involution applied twice is the identity
        let iz = |z: &[Rational]| vec![z[0].clone(), -&z[1] - &beta[1], z[2].clone()];
        assert_eq!(iz(&iz(&z)), z);
        assert_eq!(racah_c(&[-1], &iz(&z), &beta).unwrap(), racah_c(&[1], &z, &beta).unwrap());
    }

    #[test]
    fn general_term_counts() {
        let beta: Vec<Rational> = (0..5).map(|k| rat(2 * k + 1, 7)).collect();
        assert_eq!(build_racah_general(1, &beta, int(4)).unwrap().terms.len(), 3);
        assert_eq!(build_racah_general(2, &beta, int(4)).unwrap().terms.len(), 9);
        assert!(build_racah_general(0, &beta, int(4)).is_err());
    }

    #[test]
    fn general_is_involution_invariant() {
        let beta: Vec<Rational> = vec![rat(1, 3), rat(-2, 5), rat(3, 7), rat(5, 11), rat(-1, 13)];
        for j in 1..=3 {
            for shift in 0..3i64 {
                let z: Vec<Rational> = (1..=j as i64).map(|k| rat(3 * k + shift, 2) + rat(1, 17)).collect();
                let zb = rat(7 + shift, 3);
                assert_eq!(involution_mismatch(j, &beta, &z, &zb).unwrap(), None, "j = {j}");
            }
        }
    }

    #[test]
    fn general_operators_commute_on_grid() {
        let beta: Vec<Rational> = vec![rat(1, 3), rat(-2, 5), rat(3, 7), rat(5, 11), rat(-1, 13)];
        let top = rat(9, 2);
        for z1 in 0..6 {
            for z2 in 0..6 {
                let p = pt(&[z1, z2]);
                assert!(racah_commutator_at(1, 2, &beta, &top, &p).unwrap().is_empty(), "{p:?}");
            }
        }
        for z1 in 0..3 {
            for z2 in 0..3 {
                for z3 in 0..3 {
                    let p = pt(&[z1, z2, z3]);
                    for (a, b) in [(1, 3), (2, 3)] {
                        assert!(racah_commutator_at(a, b, &beta, &top, &p).unwrap().is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn commutator_detects_non_commuting_pair() {
        // B_1 with two different parameter vectors does not commute with B_2
        let beta: Vec<Rational> = vec![rat(1, 3), rat(-2, 5), rat(3, 7), rat(5, 11)];
        let b1 = build_racah_general(1, &[rat(1, 2), rat(1, 5), rat(2, 3)], int(0)).unwrap();
        let b2 = build_racah_general(2, &beta, rat(9, 2)).unwrap();
        let p = pt(&[2, 3]);
        let ab = compose_at(&lift(&b1, 2), &b2, &p).unwrap();
        let ba = compose_at(&b2, &lift(&b1, 2), &p).unwrap();
        assert_ne!(ab, ba);
    }

    #[test]
    fn parameter_map_examples() {
        let (plus, minus) = parameter_maps(&ParamVector::zeros(3), 2);
        assert_eq!(minus, pt(&[0, 1, 2, 3]));
        assert_eq!(plus, pt(&[0, -6, -5, -4]));
        let g = pv(&[(1, 2), (1, 3), (1, 4), (1, 5)]);
        assert_eq!(parameter_maps(&g, 1).0[0], rat(1, 2));
    }

    #[test]
    fn certificate_examples() {
        let g0 = ParamVector::zeros(2);
        let nu = DegreeIndex(vec![1, 1]);
        let [mp, _, pm] = b12_coefficients(&g0, &pt(&[1, 1])).unwrap();
        assert_eq!((mp, pm), (rat(5, 3), rat(4, 3)));
        assert_eq!(irreducibility_certificate_2d(&nu, &g0).unwrap(), rat(40, 3));
        assert!(irreducibility_certificate_2d(&DegreeIndex(vec![0, 1]), &g0).is_err());
        let g = pv(&[(1, 2), (1, 2), (1, 2)]);
        assert!(!irreducibility_certificate_2d(&nu, &g).unwrap().is_zero());
    }

    #[test]
    fn prescan_accepts_generic_parameters() {
        prescan(3, &pv(&[(1, 2), (1, 3), (1, 4), (1, 5)])).unwrap();
        prescan(2, &pv(&[(2, 3), (-1, 7), (5, 2)])).unwrap();
    }

    #[test]
    fn limit_through_removable_point() {
        // (t^2 + 3t) / (2t), printed at t = 0
        let f = |t: &Rational| Ok(vec![ratio(t * t + int(3) * t, &[("2t", int(2) * t)], &[])?]);
        assert_eq!(eval_or_limit(f).unwrap(), vec![rat(3, 2)]);
        let g = |t: &Rational| Ok(vec![ratio(t * t, &[("t", t.clone())], &[])?]);
        assert_eq!(eval_or_limit(g).unwrap(), vec![int(0)]);
    }

    #[test]
    fn numerator_first_scan() {
        let zero_over_zero = || ratio(int(0), &[("b", int(0))], &[]);
        assert!(zero_over_zero().is_err());
        assert_eq!(numerator_first(zero_over_zero).unwrap(), int(0));
        assert!(numerator_first(|| ratio(int(2), &[("b", int(0))], &[])).is_err());
        // no limit is taken while scanning
        let f = |t: &Rational| Ok(vec![ratio(int(1) + t, &[("t", t.clone())], &[])?]);
        assert!(numerator_first(|| eval_or_limit(f)).is_err());
        assert!(!scanning());
    }

    #[test]
    fn pole_stays_degenerate() {
        let f = |t: &Rational| Ok(vec![ratio(int(1) + t, &[("t", t.clone())], &[])?]);
        assert!(matches!(eval_or_limit(f), Err(Error::DegenerateParameter { .. })));
    }

    #[test]
    fn b12_limit_matches_nearby_formula() {
        // γ_2 + γ_3 = -1 at ν_2 = 0: compare with the closed form after cancelling
        let g = pv(&[(1, 2), (-1, 3), (-2, 3)]);
        let direct = b12_coefficients(&g, &[int(1), int(0)]).unwrap();
        let near = |e: i64| b12_coefficients(&ParamVector::new(along_line(g.as_slice(), &rat(1, e))), &[int(1), int(0)]).unwrap();
        // the value varies continuously: consecutive offsets shrink the gap
        let gap = |e: i64| {
            let v = near(e);
            (0..3).map(|k| num_traits::Signed::abs(&(&v[k] - &direct[k]))).fold(int(0), |a, b| a + b)
        };
        assert!(gap(1000) < gap(10));
        assert!(gap(100000) < rat(1, 1000));
    }
}
