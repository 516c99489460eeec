//! `biball`: solve, verify and tabulate the biharmonic Dirichlet problem on
//! the unit ball.
//!
//! Exit codes: 0 success, 1 input/schema/argument error, 2 domain error,
//! 3 quadrature-escalation warning, 4 a verified statement failed.

mod output;
mod points;

use std::path::PathBuf;
use std::process::ExitCode;

use biball::bounds::{default_radii, schwarz_check_with, table1_rows, CentreValues};
use biball::geometry::norm;
use biball::lipschitz::{lipschitz_estimate, solution_bound, Majorant};
use biball::solver::{solve_many, Problem, SupNorms, ESCALATION_RADIUS};
use biball::verify::{run_suite, Suite, VerifyConfig};
use biball::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{Sink, Table};

#[derive(Parser)]
#[command(name = "biball", version, about = "Biharmonic Dirichlet problem on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the solution at points.
    Solve(PointArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Tabulate the axis profiles U and U*.
    Table1(TableArgs),
    /// Check the Schwarz-type estimate at points.
    Bound(PointArgs),
    /// Compare a sampled modulus of continuity with the explicit bound.
    Lipschitz(LipschitzArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct PointArgs {
    /// JSON problem file.
    #[arg(long)]
    problem: PathBuf,
    /// A points file, inline JSON, `a,b;c,d`, or `axis:K:R`.
    #[arg(long)]
    points: String,
    /// Quadrature level (overrides the problem file).
    #[arg(long, env = "BIBALL_LEVEL")]
    level: Option<usize>,
    /// Accept points with |x| > 0.95.
    #[arg(long)]
    allow_near_boundary: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// identities, bounds, green or table1.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    /// Replace every check's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, env = "BIBALL_LEVEL")]
    level: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated radii; default 0.1, 0.2, …, 0.9.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long, env = "BIBALL_LEVEL")]
    level: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LipschitzArgs {
    #[arg(long)]
    problem: PathBuf,
    /// `t`, `power:α`, `linear:s`, or a JSON majorant.
    #[arg(long, default_value = "t")]
    omega: String,
    #[arg(long, default_value_t = 500)]
    pairs: usize,
    #[arg(long, env = "BIBALL_LEVEL")]
    level: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Schema(_) | Error::Parameter(_) | Error::DimensionMismatch { .. } => 1,
            Error::Domain(_) | Error::Singular(_) | Error::NonConvergence { .. } | Error::NonFinite { .. } => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

const OK: u8 = 0;
const WARNING: u8 = 3;
const CHECK_FAILED: u8 = 4;

fn load_problem(path: &PathBuf, level: Option<usize>) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read problem file {}: {e}", path.display())))?;
    let p = Problem::from_json(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    Ok(match level {
        Some(l) => p.with_level(l)?,
        None => p,
    })
}

fn load_points(args: &PointArgs, n: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let pts = points::parse(&args.points, n)?;
    if !args.allow_near_boundary {
        if let Some(p) = pts.iter().find(|p| {
            let r = norm(p);
            r > ESCALATION_RADIUS && r < 1.0
        }) {
            return Err(Error::Domain(format!(
                "point {p:?} has |x| = {} > {ESCALATION_RADIUS}; pass --allow-near-boundary to evaluate it",
                norm(p)
            ))
            .into());
        }
    }
    Ok(pts)
}

fn axis_headers(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn run_solve(args: PointArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.problem, args.level)?;
    let pts = load_points(&args, problem.n())?;
    #[derive(Serialize)]
    struct Record<'a> {
        x: &'a [f64],
        f: Vec<f64>,
        level: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        warning: Option<String>,
    }
    let mut records = Vec::with_capacity(pts.len());
    for (x, r) in pts.iter().zip(solve_many(&problem, &pts)) {
        let e = r?;
        records.push(Record { x, f: e.value, level: e.level, warning: e.warning });
    }
    let warned = records.iter().any(|r| r.warning.is_some());
    let sink = Sink::new(args.output.out.as_deref());
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => sink.json(&records)?,
        Format::Csv => {
            let mut headers = axis_headers("x", problem.n());
            headers.extend(axis_headers("f", problem.m()));
            headers.extend(["level".into(), "warning".into()]);
            let mut t = Table::new(headers);
            for r in &records {
                let mut row: Vec<String> = r.x.iter().chain(&r.f).map(|v| v.to_string()).collect();
                row.push(r.level.to_string());
                row.push(r.warning.clone().unwrap_or_default());
                t.push(row);
            }
            sink.csv(&t)?
        }
    }
    for r in records.iter().filter(|r| r.warning.is_some()) {
        eprintln!("warning at {:?}: {}", r.x, r.warning.as_deref().unwrap_or(""));
    }
    Ok(if warned { WARNING } else { OK })
}

fn run_bound(args: PointArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.problem, args.level)?;
    let pts = load_points(&args, problem.n())?;
    let norms = SupNorms::estimate(&problem);
    let centre = CentreValues::compute(&problem)?;
    let reports = pts
        .iter()
        .map(|x| schwarz_check_with(&problem, x, &norms, &centre))
        .collect::<Result<Vec<_>, Error>>()?;
    let sink = Sink::new(args.output.out.as_deref());
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a, T> {
                norms: &'a SupNorms,
                reports: &'a [T],
            }
            sink.json(&Out { norms: &norms, reports: &reports })?
        }
        Format::Csv => {
            let mut headers = axis_headers("x", problem.n());
            headers.extend(["lhs", "rhs1", "rhs2", "rhs3", "rhs4", "rhs", "tolerance", "satisfied"].map(String::from));
            let mut t = Table::new(headers);
            for r in &reports {
                let mut row: Vec<String> = r.x.iter().map(|v| v.to_string()).collect();
                row.push(r.lhs.to_string());
                row.extend(r.rhs_terms.iter().map(|v| v.to_string()));
                row.push(r.rhs().to_string());
                row.push(r.tolerance.to_string());
                row.push(r.satisfied.to_string());
                t.push(row);
            }
            sink.csv(&t)?
        }
    }
    Ok(if reports.iter().all(|r| r.satisfied) { OK } else { CHECK_FAILED })
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let suite: Suite = args.suite.parse()?;
    let mut cfg = VerifyConfig { n: args.n, seed: args.seed, tolerance: args.tol, ..Default::default() };
    if let Some(l) = args.level {
        if l == 0 {
            return Err(input_error("level must be at least 1".into()));
        }
        cfg.level = l;
    }
    let report = run_suite(suite, &cfg)?;
    let sink = Sink::new(args.output.out.as_deref());
    match args.output.format {
        Some(Format::Json) => sink.json(&report)?,
        Some(Format::Csv) => {
            let mut t = Table::new(["name", "anchor", "error", "tolerance", "passed", "detail"].map(String::from).into());
            for c in &report.checks {
                t.push(vec![
                    c.name.clone(),
                    c.anchor.clone(),
                    c.error.to_string(),
                    c.tolerance.to_string(),
                    c.passed.to_string(),
                    c.detail.clone().unwrap_or_default(),
                ]);
            }
            sink.csv(&t)?
        }
        None => {
            let mut text: String = report.checks.iter().map(|c| c.line() + "\n").collect();
            let passed = report.checks.iter().filter(|c| c.passed).count();
            text.push_str(&format!("{passed}/{} checks passed\n", report.checks.len()));
            sink.text(&text)?
        }
    }
    Ok(if report.all_passed() { OK } else { CHECK_FAILED })
}

fn run_table(args: TableArgs) -> Result<u8, Failure> {
    if args.n < 2 {
        return Err(input_error(format!("n must be at least 2, got {}", args.n)));
    }
    let radii = match &args.radii {
        None => default_radii(),
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| input_error(format!("bad radius {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let level = args.level.unwrap_or(biball::solver::DEFAULT_LEVEL).max(1);
    let rows = table1_rows(args.n, &radii, level)?;
    let sink = Sink::new(args.output.out.as_deref());
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => sink.json(&rows)?,
        Format::Csv => {
            let headers = ["n", "r", "U_closed", "U_quad", "Ustar_closed", "Ustar_series", "Ustar_quad", "max_abs_disagreement"];
            let mut t = Table::new(headers.map(String::from).into());
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for r in &rows {
                t.push(vec![
                    r.n.to_string(),
                    r.r.to_string(),
                    opt(r.u_closed),
                    r.u_quad.to_string(),
                    opt(r.ustar_closed),
                    opt(r.ustar_series),
                    r.ustar_quad.to_string(),
                    r.max_abs_disagreement.to_string(),
                ]);
            }
            sink.csv(&t)?
        }
    }
    Ok(OK)
}

fn run_lipschitz(args: LipschitzArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.problem, args.level)?;
    let omega: Majorant = args.omega.parse()?;
    if args.pairs == 0 {
        return Err(input_error("pairs must be positive".into()));
    }
    let estimate = lipschitz_estimate(&problem, &omega, args.pairs)?;
    let bound = solution_bound(&problem, &omega)?;
    let satisfied = estimate <= bound.constant;
    #[derive(Serialize)]
    struct Components {
        k: f64,
        h: f64,
        g: f64,
        gradient_total: f64,
        l: f64,
        c: f64,
        omega_at_two: f64,
        constant: f64,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        problem: &'a biball::solver::ProblemSpec,
        omega: &'a Majorant,
        estimate: f64,
        bound_components: Components,
        satisfied: bool,
    }
    let out = Out {
        problem: problem.spec(),
        omega: &omega,
        estimate,
        bound_components: Components {
            k: bound.components.k,
            h: bound.components.h,
            g: bound.components.g,
            gradient_total: bound.components.total(),
            l: bound.l,
            c: bound.c,
            omega_at_two: bound.omega_at_two,
            constant: bound.constant,
        },
        satisfied,
    };
    let sink = Sink::new(args.output.out.as_deref());
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => sink.json(&out)?,
        Format::Csv => {
            let mut t = Table::new(["estimate", "k", "h", "g", "constant", "satisfied"].map(String::from).into());
            let b = &out.bound_components;
            t.push(vec![
                estimate.to_string(),
                b.k.to_string(),
                b.h.to_string(),
                b.g.to_string(),
                b.constant.to_string(),
                satisfied.to_string(),
            ]);
            sink.csv(&t)?
        }
    }
    Ok(if satisfied { OK } else { CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::Table1(a) => run_table(a),
        Command::Bound(a) => run_bound(a),
        Command::Lipschitz(a) => run_lipschitz(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
