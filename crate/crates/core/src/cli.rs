//! Command-line front end.
//!
//! Exit codes: 0 success, 2 infeasible, 3 inconclusive, 64 malformed input,
//! 65 points outside G under `--strict`, 70 numerical failure, 74 I/O error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Tolerances;
use crate::error::Error;
use crate::geometry::{membership, GPoint};
use crate::io::{
    self, CertificateFile, ColligationFile, GModelFile, PairFile, PointsFile, ProblemFile, SolveReport, VALUES_HEADER,
};
use crate::numerics::C64;
use crate::pick::PickProblem;
use crate::realize::{interpolate, random_schur, Outcome, RealizedFunction};
use crate::sampling::{interior_point, rng};
use crate::spectral::{discontinuity_demo, spectral_domain_check_with, DiagonalDefiningFunction, DEFAULT_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "symbidisc", version, about = "Pick interpolation and realization on the symmetrized bidisc")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Feasibility tolerance of the Pick solver
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Iteration budget of the Pick solver
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iter: Option<u64>,
    /// Number of circle points for spectral checks
    #[arg(long, global = true, default_value_t = DEFAULT_GRID, value_parser = positive_usize)]
    pub grid: usize,
    /// Number of random interior samples for the boundedness sweep
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Treat points outside G as an error in `eval`
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output directory (stdout when omitted, for commands that print)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a problem file and, if solvable, write certificate, model, colligation and report
    Solve { problem: PathBuf },
    /// Evaluate a colligation at the points of a JSON file, CSV output
    Eval { colligation: PathBuf, points: PathBuf },
    /// Draw a random Schur function and interpolation data sampled from it
    Generate {
        #[arg(long, value_parser = positive_usize)]
        dim: usize,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
    },
    /// Membership test, spectral-domain check or discontinuity demo
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CheckArgs {
    /// "s1,s2" with real coordinates or "s1_re,s1_im,s2_re,s2_im"
    #[arg(long, allow_hyphen_values = true)]
    pub membership: Option<String>,
    /// JSON file {"S1": [[...]], "S2": [[...]]}
    #[arg(long)]
    pub spectral: Option<PathBuf>,
    /// Radius r in (0, 1)
    #[arg(long)]
    pub demo_discontinuity: Option<f64>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s}")),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(x) if x > 0 => Ok(x),
        _ => Err(format!("expected a positive integer, got {s}")),
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::OutOfDomain(_) | Error::DuplicateNodes { .. } => EXIT_USAGE,
            _ => EXIT_SOFTWARE,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

impl Options {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(x) = self.tol {
            t.solver_tol = x;
        }
        if let Some(n) = self.max_iter {
            t.solver_max_iter = n as usize;
        }
        t
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    io::from_json(&text).map_err(|e| CliError::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Writes `name` into the output directory, or to stdout without one.
fn emit(opts: &Options, name: &str, contents: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let path = dir.join(name);
            io::write_atomic(&path, contents).map_err(|e| CliError::io(&path, e))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sample_points(n: usize, seed: u64) -> Vec<GPoint> {
    let mut r = rng(seed);
    (0..n).map(|_| interior_point(&mut r, 0.999)).collect()
}

pub fn cmd_solve(problem: &Path, opts: &Options) -> CliResult {
    let file: ProblemFile = read_json(problem)?;
    let p = file.to_problem();
    let tol = opts.tolerances();
    let outcome = interpolate(&p, &tol)?;
    let (report, code) = match outcome {
        Outcome::Infeasible { gap, iterations } => (
            SolveReport { status: "infeasible".into(), iterations, gap: Some(gap), ..Default::default() },
            EXIT_INFEASIBLE,
        ),
        Outcome::Inconclusive { gap, residual, iterations } => (
            SolveReport {
                status: "inconclusive".into(),
                iterations,
                gap: Some(gap),
                solver_residual: Some(residual),
                ..Default::default()
            },
            EXIT_INCONCLUSIVE,
        ),
        Outcome::Feasible(out) => {
            let bound = out.function.max_modulus(&sample_points(opts.samples, opts.seed))?;
            let report = SolveReport {
                status: "feasible".into(),
                iterations: out.iterations,
                certificate_residual: Some(out.certificate.residual),
                min_eig: Some(out.certificate.min_eig),
                gram_mismatch: Some(out.symmetrize.gram_mismatch),
                isometry_defect: Some(out.symmetrize.isometry_defect),
                unitarity_defect: Some(out.symmetrize.unitarity_defect),
                fiber_mismatch: Some(out.symmetrize.fiber_mismatch),
                gmodel_residual: Some(out.gmodel.residual),
                lsharp_norm: Some(out.realization.lsharp_norm),
                node_residual: Some(out.realization.node_residual),
                state_residual: Some(out.realization.state_residual),
                boundedness_max: Some(bound),
                samples: Some(opts.samples),
                ..Default::default()
            };
            if opts.out.is_some() {
                emit(opts, "certificate.json", &io::to_json(&CertificateFile::from_certificate(&out.certificate)))?;
                emit(opts, "gmodel.json", &io::to_json(&GModelFile::from_gmodel(&out.gmodel)))?;
                emit(opts, "colligation.json", &io::to_json(&ColligationFile::from_colligation(&out.colligation)))?;
            }
            (report, EXIT_OK)
        }
    };
    emit(opts, "report.json", &io::to_json(&report))?;
    Ok(code)
}

pub fn cmd_eval(colligation: &Path, points: &Path, opts: &Options) -> CliResult {
    let cf: ColligationFile = read_json(colligation)?;
    let c = cf.to_colligation().map_err(|e| CliError::new(EXIT_USAGE, e))?;
    let f = RealizedFunction::with_tolerances(c, opts.tolerances())?;
    let pts: PointsFile = read_json(points)?;
    let mut csv = String::from(VALUES_HEADER);
    csv.push('\n');
    let mut outside = 0usize;
    for (k, s) in pts.points().iter().enumerate() {
        let phi = match f.evaluate(s) {
            Ok(z) => Some(z),
            Err(e @ (Error::OutOfDomain(_) | Error::IllConditioned { .. })) => {
                eprintln!("warning: point {k}: {e}");
                outside += 1;
                None
            }
            Err(e) => return Err(e.into()),
        };
        csv.push_str(&io::values_row(s, phi));
        csv.push('\n');
    }
    emit(opts, "values.csv", &csv)?;
    Ok(if outside > 0 && opts.strict { EXIT_DATA } else { EXIT_OK })
}

/// Random problem with targets sampled from a random realized function, so
/// that it is solvable by construction.
pub fn generate_problem(dim: usize, n: usize, seed: u64) -> Result<(PickProblem, RealizedFunction), Error> {
    let f = random_schur(dim, seed)?;
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut nodes: Vec<GPoint> = Vec::with_capacity(n);
    while nodes.len() < n {
        let s = interior_point(&mut r, 0.9);
        if nodes.iter().all(|t| t.distance(&s) >= 1e-3) {
            nodes.push(s);
        }
    }
    let targets: Vec<C64> = nodes.iter().map(|s| f.evaluate(s)).collect::<Result<_, _>>()?;
    Ok((PickProblem { nodes, targets }, f))
}

pub fn cmd_generate(dim: usize, n: usize, opts: &Options) -> CliResult {
    let (p, f) = generate_problem(dim, n, opts.seed)?;
    match &opts.out {
        Some(_) => {
            emit(opts, "problem.json", &io::to_json(&ProblemFile::from_problem(&p)))?;
            emit(
                opts,
                "reference_colligation.json",
                &io::to_json(&ColligationFile::from_colligation(f.colligation())),
            )?;
        }
        None => emit(opts, "problem.json", &io::to_json(&ProblemFile::from_problem(&p)))?,
    }
    Ok(EXIT_OK)
}

fn parse_point(text: &str) -> Result<GPoint, CliError> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::new(EXIT_USAGE, format!("bad point {text:?}: {e}")))?;
    let p = match vals.as_slice() {
        [a, b] => GPoint::real(*a, *b),
        [a, b, c, d] => GPoint::new(C64::new(*a, *b), C64::new(*c, *d)),
        _ => return Err(CliError::new(EXIT_USAGE, format!("expected 2 or 4 numbers, got {text:?}"))),
    };
    if !p.is_finite() {
        return Err(CliError::new(EXIT_USAGE, format!("non-finite point {text:?}")));
    }
    Ok(p)
}

#[derive(serde::Serialize)]
struct MembershipReport {
    point: io::Point,
    region: crate::geometry::Region,
    rho: Option<f64>,
    fiber_radius: f64,
}

#[derive(serde::Serialize)]
struct SpectralReport {
    max_norm: f64,
    argmax: C64,
    grid: usize,
    commutator_norm: f64,
}

#[derive(serde::Serialize)]
struct DemoReport {
    r: f64,
    value: f64,
    direct: f64,
    closed_form: f64,
    agreement: f64,
    lambda_count: usize,
    sweep: Vec<(f64, f64)>,
}

pub fn cmd_check(args: &CheckArgs, opts: &Options) -> CliResult {
    if let Some(text) = &args.membership {
        let s = parse_point(text)?;
        let m = membership(&s);
        let rep = MembershipReport {
            point: io::point_to_wire(&s),
            region: m.region,
            rho: m.rho,
            fiber_radius: m.fiber_radius,
        };
        emit(opts, "membership.json", &io::to_json(&rep))?;
    } else if let Some(path) = &args.spectral {
        let pf: PairFile = read_json(path)?;
        let pair = pf.to_pair().map_err(|e| CliError::new(EXIT_USAGE, e))?;
        let c = spectral_domain_check_with(&pair, opts.grid, &opts.tolerances())?;
        let rep = SpectralReport {
            max_norm: c.max_norm,
            argmax: c.argmax,
            grid: c.grid,
            commutator_norm: pair.commutator_norm,
        };
        emit(opts, "spectral.json", &io::to_json(&rep))?;
    } else if let Some(r) = args.demo_discontinuity {
        if !(r > 0.0 && r < 1.0) {
            return Err(CliError::new(EXIT_USAGE, format!("r = {r} is not in (0, 1)")));
        }
        let omega = C64::new(1.0, 0.0);
        let d = DiagonalDefiningFunction::adaptive(omega, r)?;
        let rep = discontinuity_demo(&d, r)?;
        let mut rs: Vec<f64> = (1..=4).map(|k| 1.0 - 10f64.powi(-k)).collect();
        rs.push(r);
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        let mut sweep = Vec::with_capacity(rs.len());
        let mut csv = String::from("r,value\n");
        for &x in &rs {
            let v = discontinuity_demo(&DiagonalDefiningFunction::adaptive(omega, x)?, x)?.value();
            csv.push_str(&format!("{x},{v}\n"));
            sweep.push((x, v));
        }
        let out = DemoReport {
            r,
            value: rep.value(),
            direct: rep.direct,
            closed_form: rep.closed_form,
            agreement: rep.agreement(),
            lambda_count: d.lambda_seq.len(),
            sweep,
        };
        emit(opts, "discontinuity.json", &io::to_json(&out))?;
        if opts.out.is_some() {
            emit(opts, "discontinuity.csv", &csv)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses arguments and runs one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let res = match &cli.command {
        Command::Solve { problem } => cmd_solve(problem, &cli.opts),
        Command::Eval { colligation, points } => cmd_eval(colligation, points, &cli.opts),
        Command::Generate { dim, n } => cmd_generate(*dim, *n, &cli.opts),
        Command::Check(args) => cmd_check(args, &cli.opts),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
