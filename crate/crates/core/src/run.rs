//! Run configuration, seeded parameter sampling, sweeps over cells, and the
//! operator-name registry used by the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::diffop::DiffOp;
use crate::generators::{build_f, build_l, build_l_total, build_m, f_expr, Generator, Variant};
use crate::jacobi::degree_indices;
use crate::params::ParamVector;
use crate::racah::{build_b12, build_explicit_3d, predicted_action, Explicit3, RacahOp};
use crate::rational::Rational;
use crate::repr::{matrix_of, BasisExpander, OperatorMatrix};
use crate::verify::{verify, Status, Suite, VerificationReport, VerifyOptions};

/// Operators addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpName {
    L(usize, usize),
    Total,
    M(usize, Variant),
    F([usize; 4]),
    B12,
    Explicit(Explicit3),
    Predicted { plus: bool, j: usize },
}

fn parse_indices<const K: usize>(s: &str, what: &str) -> Result<[usize; K]> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("{what}: bad index list '{s}'")))?;
    parts
        .try_into()
        .map_err(|_| Error::Parse(format!("{what}: expected {K} indices in '{s}'")))
}

impl FromStr for OpName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "Ltot" => return Ok(OpName::Total),
            "B12" => return Ok(OpName::B12),
            "B23" => return Ok(OpName::Explicit(Explicit3::B23)),
            "B134" => return Ok(OpName::Explicit(Explicit3::B134)),
            "B123" => return Ok(OpName::Explicit(Explicit3::B123)),
            _ => {}
        }
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown operator '{s}'")))?;
        match head {
            "L" => {
                let [i, j] = parse_indices::<2>(rest, s)?;
                Ok(OpName::L(i, j))
            }
            "M" | "M+" | "M-" => {
                let [j] = parse_indices::<1>(rest, s)?;
                let v = match head {
                    "M" => Variant::Plain,
                    "M+" => Variant::Plus,
                    _ => Variant::Minus,
                };
                Ok(OpName::M(j, v))
            }
            "F" => Ok(OpName::F(parse_indices::<4>(rest, s)?)),
            "R+" | "R-" => {
                let [j] = parse_indices::<1>(rest, s)?;
                Ok(OpName::Predicted { plus: head == "R+", j })
            }
            _ => Err(Error::Parse(format!("unknown operator '{s}'"))),
        }
    }
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OpName::L(i, j) => write!(f, "L:{i},{j}"),
            OpName::Total => f.write_str("Ltot"),
            OpName::M(j, v) => write!(f, "{}:{j}", v.label()),
            OpName::F([i, j, k, l]) => write!(f, "F:{i},{j},{k},{l}"),
            OpName::B12 => f.write_str("B12"),
            OpName::Explicit(w) => f.write_str(w.name()),
            OpName::Predicted { plus, j } => write!(f, "R{}:{j}", if plus { '+' } else { '-' }),
        }
    }
}

fn racah_matrix(name: &str, op: &RacahOp, n: u32, gamma: &ParamVector) -> Result<OperatorMatrix> {
    Ok(OperatorMatrix {
        name: name.to_string(),
        d: gamma.d(),
        n,
        gamma: gamma.clone(),
        basis: degree_indices(gamma.d(), n),
        matrix: op.matrix_on(n)?,
    })
}

impl OpName {
    /// Names whose matrix comes from a difference operator on degree indices.
    pub fn is_difference(self) -> bool {
        matches!(self, OpName::B12 | OpName::Explicit(_) | OpName::Predicted { .. })
    }
}

/// The expanded differential operator behind a name.
pub fn differential_operator(op: OpName, gamma: &ParamVector) -> Result<DiffOp> {
    gamma.ensure_valid(gamma.d())?;
    match op {
        OpName::L(i, j) => build_l(i, j, gamma),
        OpName::Total => build_l_total(gamma),
        OpName::M(j, v) => build_m(j, gamma, v),
        OpName::F([i, j, k, l]) => build_f(i, j, k, l, gamma),
        _ => Err(Error::Parse(format!("{op} is a difference operator"))),
    }
}

/// The difference operator behind a name; `n` fixes the boundary value of
/// the predicted actions.
pub fn difference_operator(op: OpName, n: u32, gamma: &ParamVector) -> Result<RacahOp> {
    gamma.ensure_valid(gamma.d())?;
    match op {
        OpName::B12 => build_b12(gamma),
        OpName::Explicit(w) => build_explicit_3d(w, gamma),
        OpName::Predicted { plus, j } => predicted_action(plus, j, n, gamma),
        _ => Err(Error::Parse(format!("{op} is a differential operator"))),
    }
}

/// Exact matrix of a named operator on `V_n^d(γ)`.
pub fn operator_matrix(op: OpName, n: u32, gamma: &ParamVector) -> Result<OperatorMatrix> {
    let d = gamma.d();
    gamma.ensure_valid(d)?;
    let name = op.to_string();
    match op {
        OpName::L(i, j) => matrix_of(&name, &build_l(i, j, gamma)?, &BasisExpander::new(n, gamma)?),
        OpName::Total => matrix_of(&name, &build_l_total(gamma)?, &BasisExpander::new(n, gamma)?),
        OpName::M(j, v) => matrix_of(&name, &build_m(j, gamma, v)?, &BasisExpander::new(n, gamma)?),
        OpName::F([i, j, k, l]) => {
            let expr = f_expr(i, j, k, l, gamma)?;
            let ex = BasisExpander::new(n, gamma)?;
            let mut leaves = BTreeMap::new();
            for (a, b) in [(i, k), (i, l), (j, k), (j, l), (k, l)] {
                let m = matrix_of("L", &build_l(a, b, gamma)?, &ex)?.matrix;
                leaves.insert((a.min(b), a.max(b)), m);
            }
            let matrix = expr.eval_matrix(&|g: &Generator| match *g {
                Generator::L(a, b) => Ok(leaves[&(a.min(b), a.max(b))].clone()),
                _ => Err(Error::IndexOutOfRange("unexpected leaf".into())),
            })?;
            Ok(OperatorMatrix {
                name,
                d,
                n,
                gamma: gamma.clone(),
                basis: ex.top_indices(),
                matrix,
            })
        }
        _ => racah_matrix(&name, &difference_operator(op, n, gamma)?, n, gamma),
    }
}

/// Strict runs the numerator-first prescan before any difference-side
/// check; sweeps default to it, explicit runs to lenient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Lenient,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "lenient" => Ok(Mode::Lenient),
            _ => Err(Error::Parse(format!("mode must be strict or lenient, got '{s}'"))),
        }
    }
}

/// Preset `(d, n)` ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Quick,
    Full,
}

impl Scope {
    pub fn dims(self) -> Vec<usize> {
        match self {
            Scope::Quick => vec![2, 3],
            Scope::Full => vec![2, 3, 4, 5],
        }
    }

    pub fn degrees(self) -> Vec<u32> {
        match self {
            Scope::Quick => (0..=4).collect(),
            Scope::Full => (0..=3).collect(),
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Scope::Quick),
            "full" => Ok(Scope::Full),
            _ => Err(Error::Parse(format!("scope must be quick or full, got '{s}'"))),
        }
    }
}

/// `a..b` (inclusive), a comma list, or a single value.
pub fn parse_range<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr + Copy + Ord + Into<u64> + TryFrom<u64>,
{
    let one = |t: &str| t.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad value '{t}' in '{s}'")));
    let mut out = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (one(a)?.into(), one(b.trim_start_matches('='))?.into());
        if a > b {
            return Err(Error::Parse(format!("empty range '{s}'")));
        }
        (a..=b)
            .map(|v| T::try_from(v).map_err(|_| Error::Parse(format!("out of range in '{s}'"))))
            .collect::<Result<Vec<T>>>()?
    } else {
        s.split(',').map(one).collect::<Result<Vec<T>>>()?
    };
    out.sort();
    out.dedup();
    Ok(out)
}

/// Seeded sampler of rationals `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampler {
    pub seed: u64,
    pub draws: usize,
    pub max_num: i64,
    pub max_den: i64,
}

impl Sampler {
    pub fn new(seed: u64, draws: usize) -> Self {
        Sampler {
            seed,
            draws,
            max_num: 6,
            max_den: 5,
        }
    }

    fn rng(&self, d: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ ((d as u64) << 32))
    }

    fn draw(&self, rng: &mut ChaCha8Rng, d: usize) -> ParamVector {
        let gamma = (0..=d)
            .map(|_| {
                let p = rng.gen_range(-self.max_num..=self.max_num);
                let q = rng.gen_range(1..=self.max_den);
                Rational::new(BigInt::from(p), BigInt::from(q))
            })
            .collect();
        ParamVector::new(gamma)
    }

    /// `draws` valid parameter vectors for dimension `d`, plus the rejected
    /// ones with their reasons. Gives up after `50 * draws` attempts.
    pub fn sample(&self, d: usize) -> (Vec<ParamVector>, Vec<(ParamVector, String)>) {
        let mut rng = self.rng(d);
        let (mut ok, mut rejected) = (Vec::new(), Vec::new());
        let mut attempts = 0;
        while ok.len() < self.draws && attempts < 50 * self.draws.max(1) {
            attempts += 1;
            let g = self.draw(&mut rng, d);
            let v = g.validity(d);
            if v.is_valid() {
                ok.push(g);
            } else {
                rejected.push((g, v.violations.join("; ")));
            }
        }
        (ok, rejected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaSpec {
    Explicit(ParamVector),
    Random(Sampler),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// ignored for explicit parameters, whose length fixes `d`
    pub dims: Vec<usize>,
    pub degrees: Vec<u32>,
    pub gamma: GammaSpec,
    pub suites: Vec<Suite>,
    pub mode: Mode,
    /// 0 means the rayon default
    pub workers: usize,
    pub timing: bool,
}

impl RunConfig {
    pub fn explicit(gamma: ParamVector, degrees: Vec<u32>, suites: Vec<Suite>) -> Self {
        RunConfig {
            dims: vec![gamma.d()],
            degrees,
            gamma: GammaSpec::Explicit(gamma),
            suites,
            mode: Mode::Lenient,
            workers: 0,
            timing: false,
        }
    }

    pub fn sweep(scope: Scope, sampler: Sampler, suites: Vec<Suite>) -> Self {
        RunConfig {
            dims: scope.dims(),
            degrees: scope.degrees(),
            gamma: GammaSpec::Random(sampler),
            suites,
            mode: Mode::Strict,
            workers: 0,
            timing: false,
        }
    }
}

pub const INVALID_SKIP: &str = "invalid-parameter skip";
pub const DEGENERATE_SKIP: &str = "degenerate skip";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub d: usize,
    pub n: Option<u32>,
    pub gamma: Vec<String>,
    pub reason: String,
    pub details: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub pass: usize,
    pub fail: usize,
    pub degenerate: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub skip_counts: BTreeMap<String, usize>,
    pub skips: Vec<Skip>,
    pub checks: BTreeMap<String, CheckTally>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    /// `(file stem, report)` in a fixed order
    pub reports: Vec<(String, VerificationReport)>,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn has_failure(&self) -> bool {
        self.reports.iter().any(|(_, r)| r.has_failure())
    }

    /// Writes one JSON file per report and `summary.json`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (stem, r) in &self.reports {
            fs::write(dir.join(format!("{stem}.json")), r.to_json_string() + "\n")?;
        }
        let summary = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        fs::write(dir.join("summary.json"), summary + "\n")
    }
}

struct Job {
    stem: String,
    n: u32,
    gamma: ParamVector,
}

/// Runs every cell of the configuration. Invalid parameter draws are
/// skipped and counted; degenerate cells are skipped in strict mode and
/// recorded in the report otherwise. Errors only for explicit parameters
/// that are invalid, or degenerate in strict mode.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let mut skips = Vec::new();
    let mut jobs = Vec::new();
    match &config.gamma {
        GammaSpec::Explicit(g) => {
            g.ensure_valid(g.d())?;
            for &n in &config.degrees {
                jobs.push(Job {
                    stem: format!("d{}_n{n}", g.d()),
                    n,
                    gamma: g.clone(),
                });
            }
        }
        GammaSpec::Random(s) => {
            for &d in &config.dims {
                let (ok, rejected) = s.sample(d);
                for (g, why) in rejected {
                    skips.push(Skip {
                        d,
                        n: None,
                        gamma: g.to_strings(),
                        reason: INVALID_SKIP.into(),
                        details: why,
                    });
                }
                for (k, g) in ok.into_iter().enumerate() {
                    for &n in &config.degrees {
                        jobs.push(Job {
                            stem: format!("d{d}_n{n}_draw{k:03}"),
                            n,
                            gamma: g.clone(),
                        });
                    }
                }
            }
        }
    }
    let strict = config.mode == Mode::Strict;
    let opts = VerifyOptions {
        strict,
        timing: config.timing,
    };
    let explicit = matches!(config.gamma, GammaSpec::Explicit(_));
    let work = || -> Vec<(Job, Result<VerificationReport>)> {
        jobs.into_par_iter()
            .map(|job| {
                let r = verify(job.n, &job.gamma, &config.suites, opts);
                (job, r)
            })
            .collect()
    };
    let results = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Parse(format!("worker pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    let mut reports = Vec::new();
    for (job, r) in results {
        match r {
            Ok(rep) => reports.push((job.stem, rep)),
            Err(e @ Error::DegenerateParameter { .. }) if !explicit => skips.push(Skip {
                d: job.gamma.d(),
                n: Some(job.n),
                gamma: job.gamma.to_strings(),
                reason: DEGENERATE_SKIP.into(),
                details: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let mut skip_counts: BTreeMap<String, usize> = [(INVALID_SKIP.to_string(), 0), (DEGENERATE_SKIP.to_string(), 0)].into();
    for s in &skips {
        *skip_counts.entry(s.reason.clone()).or_default() += 1;
    }
    let mut checks: BTreeMap<String, CheckTally> = BTreeMap::new();
    for (_, rep) in &reports {
        for c in &rep.checks {
            let t = checks.entry(c.name.clone()).or_default();
            match c.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Degenerate => t.degenerate += 1,
            }
        }
    }
    Ok(RunOutcome {
        summary: Summary {
            cells: reports.len(),
            skip_counts,
            skips,
            checks,
        },
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn op_names_round_trip() {
        for s in ["L:1,2", "Ltot", "M:2", "M+:3", "M-:2", "F:2,3,1,4", "B12", "B23", "B134", "B123", "R+:2", "R-:3"] {
            assert_eq!(s.parse::<OpName>().unwrap().to_string(), s);
        }
        for s in ["L:1", "Q:1", "M:x", "F:1,2,3", "", "B13"] {
            assert!(s.parse::<OpName>().is_err(), "{s}");
        }
    }

    #[test]
    fn matrix_by_name() {
        let g = ParamVector::zeros(2);
        let m = operator_matrix("L:1,2".parse().unwrap(), 1, &g).unwrap();
        let b = operator_matrix("B12".parse().unwrap(), 1, &g).unwrap();
        assert_eq!(m.matrix, b.matrix);
        assert_eq!(m.basis, b.basis);
        let g = ParamVector::zeros(3);
        let m = operator_matrix("M:2".parse().unwrap(), 1, &g).unwrap();
        assert_eq!(m.matrix, crate::matrix::ExactMatrix::diagonal(&[int(-3), int(-3), int(0)]));
        let g = ParamVector::new(vec![rat(1, 2), rat(1, 3), rat(1, 4), rat(1, 5)]);
        let f = operator_matrix("F:2,3,1,4".parse().unwrap(), 1, &g).unwrap();
        let l = operator_matrix("L:2,3".parse().unwrap(), 1, &g).unwrap();
        assert_eq!(f.matrix, l.matrix.scale(&crate::generators::f_factor(1, 4, &g)));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range::<u32>("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_range::<u32>("3,1,3").unwrap(), vec![1, 3]);
        assert_eq!(parse_range::<u32>("2").unwrap(), vec![2]);
        assert!(parse_range::<u32>("3..1").is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let s = Sampler::new(42, 10);
        let (a, _) = s.sample(2);
        let (b, _) = s.sample(2);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|g| g.validity(2).is_valid()));
        assert_ne!(Sampler::new(43, 10).sample(2).0, a);
    }

    #[test]
    fn sweep_records_invalid_draws() {
        // small bounds force integer draws, many of them negative
        let s = Sampler {
            seed: 7,
            draws: 3,
            max_num: 3,
            max_den: 1,
        };
        let mut cfg = RunConfig::sweep(Scope::Quick, s, vec![Suite::Separation]);
        cfg.dims = vec![2];
        cfg.degrees = vec![1];
        let out = run(&cfg).unwrap();
        assert_eq!(out.reports.len(), 3);
        assert!(out.summary.skip_counts[INVALID_SKIP] > 0);
        assert_eq!(out.summary.skip_counts[INVALID_SKIP], out.summary.skips.len());
    }

    #[test]
    fn strict_and_lenient_agree_at_removable_point() {
        // γ_2 + γ_3 = -1: a printed B12 denominator vanishes at ν_2 = 0, but the value is a limit
        let g = ParamVector::new(vec![rat(1, 2), rat(-1, 3), rat(-2, 3)]);
        let mut cfg = RunConfig::explicit(g, vec![1], vec![Suite::Racah]);
        cfg.mode = Mode::Strict;
        let strict = run(&cfg).unwrap();
        cfg.mode = Mode::Lenient;
        let lenient = run(&cfg).unwrap();
        assert_eq!(strict.reports, lenient.reports);
        assert!(strict.reports[0].1.all_pass(), "{:?}", strict.reports);
    }
}
