//! Command-line front end. Every subcommand writes one JSON document (JSON
//! lines for `verify`) to stdout or `--output`.
//!
//! Exit codes: 0 on success, 1 when a check or precondition fails, 2 on
//! usage and parse errors.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{psi_eval, DualScalar, DualVector};
use crate::expr::{gradient, parse, ParseError, SmoothExpr};
use crate::hadamard::{
    axes_vanishing_factor, decompose, remainder_factors, taylor, two_point_factor, HadamardError,
    MultiIndex,
};
use crate::quadrature::{QuadratureSpec, DEFAULT_NODES};
use crate::space::{HVector, StarDomain};
use crate::verify::{self, CheckConfig, CheckReport};

#[derive(Debug, Parser)]
#[command(name = "hilbert-hadamard", version, about = "Hadamard factorizations of smooth functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f at a point.
    Eval(PointArgs),
    /// Symbolic gradient at a point.
    Grad(PointArgs),
    /// Evaluate f at x + εy.
    Dual(DualArgs),
    /// First-order factors g_k and the reconstruction f(a) + <g(x), x - a>.
    Hadamard(FactorArgs),
    /// Taylor coefficients, remainders and factored remainders.
    Taylor(TaylorArgs),
    /// f = Σ x_k x_j g_kj for f vanishing on every axis.
    FactorAxes(AxesArgs),
    /// f = Σ g_k h_k with g_k(y) = 0 = h_k(z).
    FactorTwoPoint(TwoPointArgs),
    /// Seeded property checks, one JSON report per line.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct FunctionArg {
    /// DSL expression, or @path to read it from a file.
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    function: String,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    f: FunctionArg,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Debug, Args)]
struct DualArgs {
    #[command(flatten)]
    f: FunctionArg,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, allow_hyphen_values = true)]
    tangent: String,
}

#[derive(Debug, Args)]
struct Sampling {
    /// Evaluation point; repeat for several. Without any, points are sampled.
    #[arg(long = "point", allow_hyphen_values = true)]
    points: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Accepted for symmetry with `verify`; sampled points span the
    /// coordinates the function reads.
    #[arg(long, default_value_t = 8)]
    dims: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Largest reconstruction residual accepted.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Args)]
struct FactorArgs {
    #[command(flatten)]
    f: FunctionArg,
    /// Anchor; `0` is the zero vector.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    anchor: String,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Debug, Args)]
struct TaylorArgs {
    #[command(flatten)]
    f: FunctionArg,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    anchor: String,
    #[arg(long)]
    order: usize,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Debug, Args)]
struct AxesArgs {
    #[command(flatten)]
    f: FunctionArg,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Debug, Args)]
struct TwoPointArgs {
    #[command(flatten)]
    f: FunctionArg,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[command(flatten)]
    sampling: Sampling,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Check one function instead of the built-in family.
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    function: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    anchor: String,
    /// Taylor order checked for a single function.
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = 8)]
    dims: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Absolute and relative tolerance of the identity checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug)]
enum CliError {
    Parse { source: String, err: ParseError },
    Vector { flag: &'static str, value: String },
    Usage(String),
    Io(String),
    /// The input is well-formed but does not satisfy a theorem hypothesis.
    Precondition(HadamardError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { source, err } => {
                writeln!(f, "cannot parse function: {err}")?;
                if let Some(line) = source.lines().nth(err.line.saturating_sub(1)) {
                    writeln!(f, "  {line}")?;
                    write!(f, "  {}^", " ".repeat(err.column.saturating_sub(1)))?;
                }
                Ok(())
            }
            CliError::Vector { flag, value } => {
                write!(f, "--{flag}: `{value}` is not a comma-separated list of finite numbers")
            }
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Precondition(e) => write!(f, "{e}"),
        }
    }
}

impl From<HadamardError> for CliError {
    fn from(e: HadamardError) -> Self {
        match e {
            HadamardError::AxesPrecondition { .. } | HadamardError::NotAZero { .. } => {
                CliError::Precondition(e)
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<verify::VerifyError> for CliError {
    fn from(e: verify::VerifyError) -> Self {
        match e {
            verify::VerifyError::Hadamard(h) => h.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// One evaluated point of a factored representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub x: HVector,
    pub f: f64,
    pub reconstructed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HadamardReport {
    pub function: String,
    pub anchor: HVector,
    pub nodes: usize,
    pub max_residual: f64,
    pub per_point: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorPoint {
    pub x: HVector,
    pub f: f64,
    pub partial_sum: f64,
    pub remainder: f64,
    /// `Σ_α (x-a)^α g_α(x)`, absent when the chain count exceeds the cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factored_remainder: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorReport {
    pub function: String,
    pub anchor: HVector,
    pub order: usize,
    pub nodes: usize,
    pub coefficients: Vec<(MultiIndex, f64)>,
    pub max_residual: f64,
    pub per_point: Vec<TaylorPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxesReport {
    pub function: String,
    pub nodes: usize,
    pub pairs: Vec<(usize, usize)>,
    pub max_residual: f64,
    pub per_point: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointReport {
    pub function: String,
    pub y: HVector,
    pub z: HVector,
    pub nodes: usize,
    pub terms: usize,
    pub w: HVector,
    pub max_g_at_y: f64,
    pub max_h_at_z: f64,
    pub max_residual: f64,
    pub per_point: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub function: String,
    pub point: HVector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradReport {
    pub function: String,
    pub point: HVector,
    pub gradient: HVector,
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn json(value: &impl Serialize, passed: bool) -> Self {
        let mut text = serde_json::to_string(value).expect("reports serialize");
        text.push('\n');
        Self {
            text,
            code: if passed { 0 } else { 1 },
        }
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.code();
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{}", outcome.text),
    }
    outcome.code
}

fn read_function(spec: &str) -> Result<SmoothExpr, CliError> {
    let source = match spec.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?
            .trim()
            .to_string(),
        None => spec.to_string(),
    };
    parse(&source).map_err(|err| CliError::Parse { source, err })
}

fn read_vector(flag: &'static str, value: &str) -> Result<HVector, CliError> {
    let bad = || CliError::Vector {
        flag,
        value: value.to_string(),
    };
    let coeffs = value
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    HVector::new(coeffs).map_err(|_| bad())
}

/// `0` expands to the zero vector over the coordinates `f` reads.
fn read_anchor(value: &str, f: &SmoothExpr) -> Result<HVector, CliError> {
    if value.trim() == "0" {
        return Ok(HVector::zeros(f.max_coord()));
    }
    read_vector("anchor", value)
}

fn quad(nodes: usize) -> Result<QuadratureSpec, CliError> {
    QuadratureSpec::new(nodes).map_err(|e| CliError::Usage(format!("--nodes: {e}")))
}

/// Explicit `--point`s, or `samples` seeded points in the radius-4 ball
/// about `center`.
fn points(s: &Sampling, center: &HVector, f: &SmoothExpr) -> Result<Vec<HVector>, CliError> {
    if !s.points.is_empty() {
        return s.points.iter().map(|p| read_vector("point", p)).collect();
    }
    if s.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let dim = f.max_coord().max(center.dim()).max(1);
    Ok((0..s.samples)
        .map(|_| verify::uniform_in_ball(&mut rng, center, verify::SAMPLE_RADIUS, dim))
        .collect())
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage("--tol must be a positive number".into()))
    }
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eval(args) => {
            let f = read_function(&args.f.function)?;
            let point = read_vector("point", &args.point)?;
            let value = f.eval(&point);
            Ok(Outcome::json(
                &EvalReport {
                    function: f.to_string(),
                    point,
                    value,
                },
                true,
            ))
        }
        Command::Grad(args) => {
            let f = read_function(&args.f.function)?;
            let point = read_vector("point", &args.point)?;
            let g = gradient(&f, &point).padded(point.dim().max(f.max_coord()));
            Ok(Outcome::json(
                &GradReport {
                    function: f.to_string(),
                    point,
                    gradient: g,
                },
                true,
            ))
        }
        Command::Dual(args) => {
            let f = read_function(&args.f.function)?;
            let point = read_vector("point", &args.point)?;
            let tangent = read_vector("tangent", &args.tangent)?;
            let out: DualScalar = psi_eval(&f, &DualVector::new(point, tangent));
            Ok(Outcome::json(&out, true))
        }
        Command::Hadamard(args) => hadamard(args),
        Command::Taylor(args) => taylor_cmd(args),
        Command::FactorAxes(args) => axes(args),
        Command::FactorTwoPoint(args) => two_point(args),
        Command::Verify(args) => verify_cmd(args),
    }
}

fn hadamard(args: &FactorArgs) -> Result<Outcome, CliError> {
    let f = read_function(&args.f.function)?;
    let a = read_anchor(&args.anchor, &f)?;
    check_tol(args.sampling.tol)?;
    let fact = decompose(&f, &a, &StarDomain::WholeSpace, quad(args.sampling.nodes)?)?;
    let mut max_residual: f64 = 0.0;
    let mut per_point = Vec::new();
    for x in points(&args.sampling, &a, &f)? {
        let fx = f.eval(&x);
        let reconstructed = fact.reconstruct(&x)?;
        let dim = x.dim().max(f.max_coord());
        let g = fact.eval_g(&x)?.padded(dim);
        max_residual = max_residual.max((reconstructed - fx).abs());
        per_point.push(PointReport {
            x,
            f: fx,
            reconstructed,
            g: Some(g.coeffs().to_vec()),
        });
    }
    let report = HadamardReport {
        function: f.to_string(),
        anchor: a,
        nodes: args.sampling.nodes,
        max_residual,
        per_point,
    };
    Ok(Outcome::json(&report, max_residual <= args.sampling.tol))
}

fn taylor_cmd(args: &TaylorArgs) -> Result<Outcome, CliError> {
    let f = read_function(&args.f.function)?;
    let a = read_anchor(&args.anchor, &f)?;
    check_tol(args.sampling.tol)?;
    let expansion = taylor(&f, &a, args.order);
    let factors = match remainder_factors(&f, &a, args.order, quad(args.sampling.nodes)?) {
        Ok(r) => Some(r),
        Err(HadamardError::ResourceLimit { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut max_residual: f64 = 0.0;
    let mut per_point = Vec::new();
    for x in points(&args.sampling, &a, &f)? {
        let remainder = expansion.remainder(&x);
        let factored_remainder = factors.as_ref().map(|r| r.reconstruct(&x));
        if let Some(fr) = factored_remainder {
            max_residual = max_residual.max((fr - remainder).abs());
        }
        per_point.push(TaylorPoint {
            f: f.eval(&x),
            partial_sum: expansion.partial_sum(&x),
            remainder,
            factored_remainder,
            x,
        });
    }
    let report = TaylorReport {
        function: f.to_string(),
        anchor: a,
        order: args.order,
        nodes: args.sampling.nodes,
        coefficients: expansion
            .coefficients()
            .iter()
            .map(|(alpha, c)| (alpha.clone(), *c))
            .collect(),
        max_residual,
        per_point,
    };
    Ok(Outcome::json(&report, max_residual <= args.sampling.tol))
}

fn axes(args: &AxesArgs) -> Result<Outcome, CliError> {
    let f = read_function(&args.f.function)?;
    check_tol(args.sampling.tol)?;
    let fact = axes_vanishing_factor(&f, quad(args.sampling.nodes)?)?;
    let origin = HVector::zeros(f.max_coord());
    let mut max_residual: f64 = 0.0;
    let mut per_point = Vec::new();
    for x in points(&args.sampling, &origin, &f)? {
        let fx = f.eval(&x);
        let reconstructed = fact.reconstruct(&x);
        max_residual = max_residual.max((reconstructed - fx).abs());
        per_point.push(PointReport {
            x,
            f: fx,
            reconstructed,
            g: None,
        });
    }
    let report = AxesReport {
        function: f.to_string(),
        nodes: args.sampling.nodes,
        pairs: fact.factors().keys().copied().collect(),
        max_residual,
        per_point,
    };
    Ok(Outcome::json(&report, max_residual <= args.sampling.tol))
}

fn two_point(args: &TwoPointArgs) -> Result<Outcome, CliError> {
    let f = read_function(&args.f.function)?;
    let y = read_vector("y", &args.y)?;
    let z = read_vector("z", &args.z)?;
    check_tol(args.sampling.tol)?;
    let tp = match two_point_factor(&f, &y, &z, quad(args.sampling.nodes)?) {
        Err(HadamardError::CoincidentPoints) => {
            return Err(CliError::Usage("--y and --z must differ".into()))
        }
        other => other?,
    };
    let (max_g_at_y, max_h_at_z) = tp.endpoint_residuals(&y, &z);
    let mut max_residual: f64 = 0.0;
    let mut per_point = Vec::new();
    for x in points(&args.sampling, &z, &f)? {
        let fx = f.eval(&x);
        let reconstructed = tp.reconstruct(&x);
        max_residual = max_residual.max((reconstructed - fx).abs());
        per_point.push(PointReport {
            x,
            f: fx,
            reconstructed,
            g: None,
        });
    }
    let passed = max_residual <= args.sampling.tol
        && max_g_at_y <= verify::ENDPOINT_TOL
        && max_h_at_z <= verify::ENDPOINT_TOL;
    let report = TwoPointReport {
        function: f.to_string(),
        y,
        z,
        nodes: args.sampling.nodes,
        terms: tp.len(),
        w: tp.w().clone(),
        max_g_at_y,
        max_h_at_z,
        max_residual,
        per_point,
    };
    Ok(Outcome::json(&report, passed))
}

fn verify_cmd(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let cfg = CheckConfig {
        seed: args.seed,
        samples: args.samples,
        abs_tol: args.tol,
        rel_tol: args.tol,
        dims: args.dims,
        nodes: args.nodes,
        ..CheckConfig::default()
    };
    let reports: Vec<CheckReport> = match &args.function {
        None => verify::run_suite(&cfg)?,
        Some(spec) => {
            let f = read_function(spec)?;
            let a = read_anchor(&args.anchor, &f)?;
            vec![
                verify::check_hadamard_identity(&f, &a, &StarDomain::WholeSpace, &cfg)?,
                verify::check_anchor_gradient(&f, &a, &cfg)?,
                verify::check_anchor_hessian(&f, &a, &cfg)?,
                verify::check_gateaux_frechet(&f, &cfg)?,
                verify::check_psi_consistency(&f, &cfg)?,
                verify::check_rules(&f, &f, &cfg)?,
                verify::check_psi_homomorphism(&f, &f, &cfg)?,
                verify::check_taylor_order(&f, &a, args.order, &cfg)?,
            ]
        }
    };
    Ok(Outcome {
        text: verify::to_json_lines(&reports),
        code: if verify::all_passed(&reports) { 0 } else { 1 },
    })
}
