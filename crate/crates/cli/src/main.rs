use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use symalg::run::{parse_range, Summary};
use symalg::{
    basis, difference_operator, differential_operator, operator_matrix, racah, run, Error, Mode, OpName,
    ParamVector, RunConfig, Sampler, Scope, Suite, VerificationReport,
};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

/// Exact symmetry-algebra operators on the d-sphere: bases, matrices and verification runs.
#[derive(Parser)]
#[command(name = "symalg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact matrix of a named operator on the degree-n space.
    Matrix(MatrixArgs),
    /// Run verification suites for explicit parameters.
    Verify(VerifyArgs),
    /// Run verification suites over seeded random parameters.
    Sweep(SweepArgs),
    /// Dump the degree-n basis polynomials.
    Basis(CellArgs),
    /// Dump the expanded differential operator behind a name.
    Diffop(OpArgs),
    /// Dump a difference operator sampled on the degree-n index range.
    Racah(OpArgs),
}

#[derive(Args)]
struct CellArgs {
    /// dimension; inferred from --gamma when omitted
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: u32,
    /// comma-separated rationals p/q, d+1 of them
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    /// output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OpArgs {
    #[arg(long)]
    op: String,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long)]
    op: String,
    #[command(flatten)]
    cell: CellArgs,
    /// strict runs the numerator-first prescan for difference operators
    #[arg(long, default_value = "lenient")]
    mode: String,
}

#[derive(Args)]
struct RunArgs {
    /// comma list of suites, or "all"
    #[arg(long, default_value = "all")]
    suite: String,
    /// output directory for one report per cell plus summary.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads (0: one per core)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// record wall-clock milliseconds per check (reports are then not reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    d: Option<usize>,
    /// degree, "a..b" or a comma list
    #[arg(long, default_value = "0..3")]
    n: String,
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, default_value = "lenient")]
    mode: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    seed: u64,
    /// valid draws per dimension
    #[arg(long, default_value_t = 5)]
    draws: usize,
    /// preset (d, n) ranges; --d and --n override
    #[arg(long, default_value = "quick")]
    scope: String,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, default_value = "strict")]
    mode: String,
    #[command(flatten)]
    run: RunArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. } => EXIT_INVALID,
            Error::DegenerateParameter { .. } => EXIT_DEGENERATE,
            Error::Parse(_) | Error::IndexOutOfRange(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_FAIL,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn gamma_for(d: Option<usize>, gamma: &str) -> Result<ParamVector, Failure> {
    let g = ParamVector::parse(gamma)?;
    g.ensure_valid(d.unwrap_or(g.d()))?;
    Ok(g)
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_matrix(a: MatrixArgs) -> CliResult {
    let op: OpName = a.op.parse()?;
    let mode: Mode = a.mode.parse()?;
    let g = gamma_for(a.cell.d, &a.cell.gamma)?;
    if mode == Mode::Strict && op.is_difference() {
        racah::prescan(a.cell.n, &g)?;
    }
    let m = operator_matrix(op, a.cell.n, &g)?;
    emit(&m.to_json(), a.cell.out.as_deref())?;
    Ok(0)
}

fn cmd_basis(a: CellArgs) -> CliResult {
    let g = gamma_for(a.d, &a.gamma)?;
    emit(&basis(a.n, g.d(), &g)?.to_json(), a.out.as_deref())?;
    Ok(0)
}

fn cmd_diffop(a: OpArgs) -> CliResult {
    let op: OpName = a.op.parse()?;
    let g = gamma_for(a.d, &a.gamma)?;
    emit(&differential_operator(op, &g)?.to_json(), a.out.as_deref())?;
    Ok(0)
}

fn cmd_racah(a: OpArgs) -> CliResult {
    let op: OpName = a.op.parse()?;
    let g = gamma_for(a.d, &a.gamma)?;
    emit(&difference_operator(op, a.n, &g)?.to_json(a.n)?, a.out.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct RunJson<'a> {
    reports: Vec<&'a VerificationReport>,
    summary: &'a Summary,
}

fn finish(config: &RunConfig, r: &RunArgs) -> CliResult {
    let outcome = run(config)?;
    match &r.out {
        Some(dir) => outcome.write_to(dir)?,
        None => emit(
            &RunJson {
                reports: outcome.reports.iter().map(|(_, rep)| rep).collect(),
                summary: &outcome.summary,
            },
            None,
        )?,
    }
    for (stem, rep) in &outcome.reports {
        for c in rep.failures() {
            eprintln!("{stem}: {} failed: {}", c.name, c.details);
        }
    }
    Ok(if outcome.has_failure() { EXIT_FAIL } else { 0 })
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let g = gamma_for(a.d, &a.gamma)?;
    let mut config = RunConfig::explicit(g, parse_range(&a.n)?, Suite::parse_list(&a.run.suite)?);
    config.mode = a.mode.parse()?;
    config.workers = a.run.workers;
    config.timing = a.run.timing;
    finish(&config, &a.run)
}

fn cmd_sweep(a: SweepArgs) -> CliResult {
    let scope: Scope = a.scope.parse()?;
    let mut config = RunConfig::sweep(scope, Sampler::new(a.seed, a.draws), Suite::parse_list(&a.run.suite)?);
    if let Some(d) = &a.d {
        config.dims = parse_range::<u32>(d)?.into_iter().map(|v| v as usize).collect();
        if config.dims.iter().any(|&d| d < 2) {
            return Err(Error::Parse("sweeps need d >= 2".into()).into());
        }
    }
    if let Some(n) = &a.n {
        config.degrees = parse_range(n)?;
    }
    config.mode = a.mode.parse()?;
    config.workers = a.run.workers;
    config.timing = a.run.timing;
    finish(&config, &a.run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Matrix(a) => cmd_matrix(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Diffop(a) => cmd_diffop(a),
        Command::Racah(a) => cmd_racah(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("symalg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
