//! The `opdop` command line.
//!
//! Exit codes: 0 success, 2 mathematical failure, 3 configuration error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance;
use crate::error::{Error, Result};
use crate::moments::{MeasureSpec, MomentSequence, OrthogonalFamily, DEFAULT_QUAD_TOL};
use crate::operator::{ExactlySolvableOperator, FactorizedOperator, OperatorSpec};
use crate::polar::{self, BernsteinSzegoMeasure};
use crate::poly::Polynomial;
use crate::scalar::{rational_from_str, Extended, Rational, RealScalar};
use crate::solver;
use crate::zeros;

pub const SCHEMA: &str = "opdop/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "opdop", version, about = "Orthogonal polynomials for exactly solvable differential operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for Q_n over an index range.
    Solve(RunArgs),
    /// Decide normality of each index.
    Normality(RunArgs),
    /// Generate the difference system of an operator; check a measure against it.
    Classify(RunArgs),
    /// Zero bound R = 3^M·d for a factorized operator.
    Zeros(RunArgs),
    /// Polar polynomials: roots, Chebyshev coefficients or strong asymptotics.
    Polar(RunArgs),
    /// Run the acceptance suite.
    Check(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Operator: a name (hermite, laguerre, legendre, identity), inline JSON or a file.
    #[arg(long)]
    pub op: Option<String>,
    /// Measure: a name (hermite, laguerre, legendre, chebyshev1), inline JSON or a file.
    #[arg(long)]
    pub measure: Option<String>,
    /// Inclusive index range A..B, or a single index.
    #[arg(long = "n")]
    pub n: Option<String>,
    /// Pole ζ of the polar polynomials (rational).
    #[arg(long, default_value = "2")]
    pub zeta: String,
    /// Comma-separated points: interpolation points, or evaluation points for asymptotics.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
    /// Quadrature tolerance for weight measures.
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Table emitted by `polar`.
    #[arg(long, value_enum, default_value_t = Table::Roots)]
    pub table: Table,
    /// Single acceptance criterion for `check`.
    #[arg(long)]
    pub criterion: Option<u8>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Exact,
    Double,
    Extended,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Roots,
    Coeffs,
    Asymptotics,
}

/// A rendered report: JSON payload, CSV table and a human-readable text form.
struct Report {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    text: Option<String>,
    ok: bool,
}

enum Moments {
    Exact(MomentSequence<Rational>),
    Double(MomentSequence<f64>),
    Extended(MomentSequence<Extended>),
}

macro_rules! dispatch {
    ($ms:expr, $f:ident ( $($arg:expr),* )) => {
        match $ms {
            Moments::Exact(m) => $f($($arg,)* &m),
            Moments::Double(m) => $f($($arg,)* &m),
            Moments::Extended(m) => $f($($arg,)* &m),
        }
    };
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("opdop: error: {e}");
            if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_MATH
            }
        }
    }
}

fn execute(cmd: &Command) -> Result<i32> {
    let (name, args, default_format) = match cmd {
        Command::Solve(a) => ("solve", a, Format::Json),
        Command::Normality(a) => ("normality", a, Format::Json),
        Command::Classify(a) => ("classify", a, Format::Text),
        Command::Zeros(a) => ("zeros", a, Format::Json),
        Command::Polar(a) => ("polar", a, Format::Json),
        Command::Check(a) => ("check", a, Format::Text),
    };
    let report = match cmd {
        Command::Solve(a) => cmd_solve(a)?,
        Command::Normality(a) => cmd_normality(a)?,
        Command::Classify(a) => cmd_classify(a)?,
        Command::Zeros(a) => cmd_zeros(a)?,
        Command::Polar(a) => cmd_polar(a)?,
        Command::Check(a) => cmd_check(a)?,
    };
    let format = args.format.unwrap_or(default_format);
    let body = render(name, &report, format)?;
    match &args.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(if report.ok { EXIT_OK } else { EXIT_MATH })
}

fn render(command: &str, report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("schema".into(), json!(SCHEMA));
            obj.insert("command".into(), json!(command));
            if let Value::Object(m) = &report.json {
                obj.extend(m.clone());
            }
            Ok(serde_json::to_string_pretty(&Value::Object(obj)).expect("json") + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header).map_err(csv_err)?;
            for r in &report.rows {
                w.write_record(r).map_err(csv_err)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error()))?).expect("utf8"))
        }
        Format::Text => match &report.text {
            Some(t) => Ok(t.clone()),
            None => Err(Error::Unsupported(format!("{command} has no text output; use json or csv"))),
        },
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("csv output: {e}"))
}

// ----- input parsing -----

fn read_spec(arg: &str) -> Result<String> {
    let t = arg.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(t.to_string());
    }
    let path = Path::new(t);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {t}: {e}")));
    }
    Err(Error::InvalidParameter(format!("{t:?} is neither a known name, inline JSON nor an existing file")))
}

fn parse_json<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn load_operator(arg: Option<&str>) -> Result<OperatorSpec> {
    let arg = arg.ok_or_else(|| Error::InvalidParameter("--op is required".into()))?;
    let zero = Rational::from_integer(0.into());
    let named = match arg.trim() {
        "hermite" => Some(ExactlySolvableOperator::hermite()),
        "laguerre" => Some(ExactlySolvableOperator::laguerre(&zero)),
        "legendre" => Some(ExactlySolvableOperator::jacobi(&zero, &zero)),
        "identity" => Some(ExactlySolvableOperator::identity()),
        _ => None,
    };
    match named {
        Some(op) => Ok(OperatorSpec::Plain(op)),
        None => parse_json(&read_spec(arg)?, "operator"),
    }
}

pub fn load_measure(arg: Option<&str>) -> Result<MeasureSpec> {
    let arg = arg.ok_or_else(|| Error::InvalidParameter("--measure is required".into()))?;
    let zero = || "0".to_string();
    Ok(match arg.trim() {
        "hermite" => MeasureSpec::Hermite,
        "laguerre" => MeasureSpec::Laguerre { alpha: zero() },
        "legendre" => MeasureSpec::Jacobi { alpha: zero(), beta: zero() },
        "chebyshev1" => MeasureSpec::Chebyshev1,
        _ => parse_json(&read_spec(arg)?, "measure")?,
    })
}

/// "A..B" (inclusive), "A..=B" or "A".
pub fn parse_range(s: Option<&str>, default: (usize, usize)) -> Result<(usize, usize)> {
    let Some(s) = s else { return Ok(default) };
    let num = |t: &str| {
        t.trim().parse::<usize>().map_err(|_| Error::InvalidParameter(format!("bad index {t:?} in range {s:?}")))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if b < a {
        return Err(Error::InvalidParameter("empty index range".into()));
    }
    Ok((a, b))
}

fn parse_points(s: Option<&str>) -> Result<Option<Vec<Rational>>> {
    s.map(|s| s.split(',').filter(|t| !t.trim().is_empty()).map(rational_from_str).collect()).transpose()
}

/// Parses "3", "-2.5", "2i", "-i", "1+2i", "1-0.5i".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: {s:?}"));
    let real = |u: &str| u.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else { return Ok(Complex64::new(real(&t)?, 0.0)) };
    let imag = |u: &str| match u {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(u),
    };
    // split at the last sign that is not at the start or after an exponent marker
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => Ok(Complex64::new(real(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn load_moments(args: &RunArgs, spec: &MeasureSpec, count: usize) -> Result<Moments> {
    let precision = args.precision.unwrap_or(if spec.is_rational() { Precision::Exact } else { Precision::Double });
    Ok(match precision {
        Precision::Exact => {
            if !spec.is_rational() {
                return Err(Error::InvalidParameter("--precision exact needs a measure with rational moments".into()));
            }
            Moments::Exact(spec.exact_moments(count)?)
        }
        Precision::Double => Moments::Double(spec.double_moments(count, args.tol)?),
        Precision::Extended => Moments::Extended(spec.extended_moments(count, args.tol)?),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

// ----- solve -----

fn cmd_solve(a: &RunArgs) -> Result<Report> {
    let op = load_operator(a.op.as_deref())?.operator()?;
    let spec = load_measure(a.measure.as_deref())?;
    let (lo, hi) = parse_range(a.n.as_deref(), (0, 10))?;
    let points = parse_points(a.points.as_deref())?;
    let ms = load_moments(a, &spec, 2 * hi + 2)?;
    dispatch!(ms, solve_t(&op, lo, hi, points.as_deref()))
}

fn solve_t<T: RealScalar>(
    op: &ExactlySolvableOperator,
    lo: usize,
    hi: usize,
    points: Option<&[Rational]>,
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for n in lo..=hi {
        let sol = solver::solve_index(op, ms, n)?;
        // constrained solution if points are given, else the member with zero
        // kernel coefficients, else the top kernel element
        let (q, unique) = match points {
            Some(p) if !sol.kernel_basis.is_empty() => {
                let pts: Vec<T> = p.iter().map(T::from_rational).collect();
                (Some(solver::unique_with_constraints(op, ms, n, &pts)?), true)
            }
            _ => (sol.particular.clone().or_else(|| sol.kernel_basis.last().cloned()), sol.dimension() == 1),
        };
        // no degree-n member at all is a mathematical failure
        let found = q.as_ref().is_some_and(|p| p.degree() == Some(n));
        ok &= found;
        let mut push = |role: String, p: &Polynomial<T>| {
            for (k, c) in p.coeffs().iter().enumerate() {
                rows.push(vec![
                    n.to_string(),
                    role.clone(),
                    k.to_string(),
                    c.to_json_string(),
                    format!("{:e}", sol.certificate),
                ]);
            }
        };
        if let Some(q) = &q {
            push("q".into(), q);
        }
        if let Some(p) = &sol.particular {
            push("particular".into(), p);
        }
        for (i, k) in sol.kernel_basis.iter().enumerate() {
            push(format!("kernel{i}"), k);
        }
        let mut v = to_value(&sol);
        v["q_n"] = q.as_ref().map_or(Value::Null, to_value);
        v["q_n_text"] = q.as_ref().map_or(Value::Null, |p| json!(p.to_string()));
        v["unique"] = json!(unique);
        v["degree_n"] = json!(found);
        results.push(v);
    }
    let text = results
        .iter()
        .map(|r| {
            let q = r["q_n_text"].as_str().unwrap_or("none");
            if r["degree_n"] != json!(true) {
                return format!("n = {}: no solution of degree n (lower-degree member {q})\n", r["n"]);
            }
            let note = if r["unique"] == json!(true) { "" } else { " (not unique)" };
            format!("n = {}: Q_n = {q}{note}\n", r["n"])
        })
        .collect();
    Ok(Report {
        json: json!({ "precision": T::MODE, "results": results }),
        header: vec!["n", "role", "k", "coeff", "certificate"],
        rows,
        text: Some(text),
        ok,
    })
}

// ----- normality -----

fn cmd_normality(a: &RunArgs) -> Result<Report> {
    let op = load_operator(a.op.as_deref())?.operator()?;
    let spec = load_measure(a.measure.as_deref())?;
    let (lo, hi) = parse_range(a.n.as_deref(), (0, 10))?;
    let ms = load_moments(a, &spec, 2 * hi + 2)?;
    dispatch!(ms, normality_t(&op, lo, hi))
}

fn normality_t<T: RealScalar>(
    op: &ExactlySolvableOperator,
    lo: usize,
    hi: usize,
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let reports = (lo..=hi).map(|n| solver::normality_report(op, ms, n)).collect::<Result<Vec<_>>>()?;
    let verdict = |v: &solver::Verdict| to_value(v).as_str().unwrap_or_default().to_string();
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                verdict(&r.verdict),
                to_value(&r.branch).as_str().unwrap_or_default().to_string(),
                verdict(&r.oracle_verdict),
                r.oracle_dimension.to_string(),
                r.moment_relative_gap.map_or(String::new(), |g| format!("{g:e}")),
            ]
        })
        .collect();
    let text = reports.iter().map(|r| format!("n = {}: {}\n", r.n, verdict(&r.verdict))).collect();
    Ok(Report {
        json: json!({ "precision": T::MODE, "reports": reports }),
        header: vec!["n", "verdict", "branch", "oracle_verdict", "oracle_dimension", "relative_gap"],
        rows,
        text: Some(text),
        ok: true,
    })
}

// ----- classify -----

fn cmd_classify(a: &RunArgs) -> Result<Report> {
    let op = load_operator(a.op.as_deref())?.operator()?;
    let ds = solver::generate_systq(&op);
    let mut text = ds.render();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let rows = ds.equations.iter().map(|e| vec![e.n_j.to_string(), e.text.clone()]).collect();
    let mut json = json!({ "system": ds, "text": text });
    let mut ok = true;
    if a.measure.is_some() {
        let spec = load_measure(a.measure.as_deref())?;
        let (_, horizon) = parse_range(a.n.as_deref(), (0, 40))?;
        let max_nj = ds.equations.iter().map(|e| e.n_j).max().unwrap_or(0);
        let ms = load_moments(a, &spec, (horizon + 3).max(2 * max_nj + 1))?;
        let rep = dispatch!(ms, membership_t(&ds, horizon))?;
        ok = rep.pass;
        text.push_str(&match (&rep.first_violation, rep.checked_up_to) {
            (Some(v), _) => {
                format!("membership: fail (equation from n_j = {}, n = {}, value {})\n", v.n_j, v.n, v.value)
            }
            (None, Some(k)) => format!("membership: pass (checked up to n = {k})\n"),
            (None, None) => "membership: pass (nothing checked)\n".into(),
        });
        json["text"] = json!(text);
        json["membership"] = to_value(&rep);
    }
    Ok(Report { json, header: vec!["n_j", "equation"], rows, text: Some(text), ok })
}

fn membership_t<T: RealScalar>(
    ds: &solver::DifferenceSystem,
    horizon: usize,
    ms: &MomentSequence<T>,
) -> Result<solver::MembershipReport> {
    solver::check_membership(ds, ms, horizon)
}

// ----- zeros -----

fn cmd_zeros(a: &RunArgs) -> Result<Report> {
    let fop = match load_operator(a.op.as_deref())? {
        OperatorSpec::Factorized(f) => f,
        OperatorSpec::Plain(_) => {
            return Err(Error::InvalidParameter("zeros needs a factorized operator ({\"stages\": ...})".into()))
        }
    };
    let spec = load_measure(a.measure.as_deref())?;
    let (lo, hi) = parse_range(a.n.as_deref(), (1, 30))?;
    let points = parse_points(a.points.as_deref())?;
    let ms = load_moments(a, &spec, 2 * hi + 2)?;
    dispatch!(ms, zeros_t(&fop, lo, hi, points.as_deref(), a.seed))
}

fn zeros_t<T: RealScalar>(
    fop: &FactorizedOperator,
    lo: usize,
    hi: usize,
    points: Option<&[Rational]>,
    seed: u64,
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let pts: Option<Vec<T>> = points.map(|p| p.iter().map(T::from_rational).collect());
    let rows_out = zeros::zero_bound_check(fop, ms, lo..=hi, &|_| pts.clone(), seed)?;
    let ok = rows_out.iter().all(|r| r.pass);
    let rows = rows_out
        .iter()
        .map(|r| vec![r.n.to_string(), format!("{:.17e}", r.max_modulus), r.r.to_string(), r.pass.to_string()])
        .collect();
    let text = rows_out
        .iter()
        .map(|r| format!("n = {}: max |z| = {:.6} <= R = {}: {}\n", r.n, r.max_modulus, r.r, r.pass))
        .collect();
    Ok(Report {
        json: json!({ "precision": T::MODE, "conditions": fop.conditions(), "rows": rows_out }),
        header: vec!["n", "max_modulus", "R", "pass"],
        rows,
        text: Some(text),
        ok,
    })
}

// ----- polar -----

fn cmd_polar(a: &RunArgs) -> Result<Report> {
    let spec = load_measure(a.measure.as_deref())?;
    let (lo, hi) = parse_range(a.n.as_deref(), (1, 20))?;
    let zeta = rational_from_str(&a.zeta)?;
    let ms = load_moments(a, &spec, 2 * hi + 2)?;
    match a.table {
        Table::Roots => {
            let e = polar::ellipse(Complex64::new(RealScalar::to_f64(&zeta), 0.0))?;
            let polish = matches!(ms, Moments::Extended(_));
            dispatch!(ms, polar_roots_t(&zeta, lo, hi, &e, polish, a.seed))
        }
        Table::Coeffs => {
            let model_rho = model_rho(&spec)?;
            dispatch!(ms, polar_coeffs_t(&model_rho, lo, hi))
        }
        Table::Asymptotics => {
            let model_rho = model_rho(&spec)?;
            let pts = match &a.points {
                Some(p) => p.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?,
                None => vec![Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0), Complex64::new(-2.5, 0.0)],
            };
            dispatch!(ms, polar_asymptotics_t(&model_rho, lo, hi, &pts))
        }
    }
}

/// ρ for dμ_T/ρ; Chebyshev is ρ = 1.
fn model_rho(spec: &MeasureSpec) -> Result<BernsteinSzegoMeasure> {
    match spec {
        MeasureSpec::Chebyshev1 => BernsteinSzegoMeasure::from_rho(Polynomial::one()),
        MeasureSpec::BernsteinSzego { rho } => BernsteinSzegoMeasure::from_rho(Polynomial::parse_strs(rho)?),
        _ => Err(Error::Unsupported("coefficient limits and asymptotics need chebyshev1 or bernstein_szego".into())),
    }
}

fn polar_roots_t<T: RealScalar>(
    zeta: &Rational,
    lo: usize,
    hi: usize,
    e: &polar::EllipseE,
    polish: bool,
    seed: u64,
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let fam = OrthogonalFamily::new(ms, hi)?;
    let z = T::from_rational(zeta);
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for n in lo.max(1)..=hi {
        let qn = polar::polar_from(fam.get(n)?, &z)?;
        let rs = if polish {
            zeros::polish(&qn, &zeros::roots(&qn, seed)?, zeros::POLISH_SWEEPS)
        } else {
            zeros::roots_robust(&qn, seed)?
        };
        let mut max_dist: f64 = 0.0;
        for r in &rs.roots {
            let d = polar::dist_to_e(*r, e);
            max_dist = max_dist.max(d);
            rows.push(vec![n.to_string(), format!("{:.17e}", r.re), format!("{:.17e}", r.im), format!("{d:.6e}")]);
        }
        per_n.push(json!({ "n": n, "roots": rs.roots, "converged": rs.converged, "max_dist_to_E": max_dist }));
    }
    let text = per_n
        .iter()
        .map(|v| format!("n = {}: max dist to E = {:.4e}\n", v["n"], v["max_dist_to_E"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    Ok(Report {
        json: json!({ "precision": T::MODE, "zeta": zeta.to_string(), "ellipse": e, "rows": per_n }),
        header: vec!["n", "re", "im", "dist_to_E"],
        rows,
        text: Some(text),
        ok: true,
    })
}

fn polar_coeffs_t<T: RealScalar>(
    bs: &BernsteinSzegoMeasure,
    lo: usize,
    hi: usize,
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let model = bs.model()?;
    let m = bs.m();
    let fam = OrthogonalFamily::new(ms, hi)?;
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for n in lo..=hi {
        let tail = polar::chebyshev_tail(fam.get(n)?, m)?;
        let mut entries = Vec::new();
        for (k, b) in tail.iter().enumerate() {
            let limit = model.limits.get(k).map_or(0.0, |l| l.re);
            let bf = b.to_f64();
            let diff = (bf - limit).abs();
            rows.push(vec![
                n.to_string(),
                (n - k).to_string(),
                b.to_json_string(),
                format!("{limit:.17e}"),
                format!("{diff:.6e}"),
            ]);
            entries.push(json!({ "k": n - k, "b": b.to_json_string(), "limit": limit, "abs_diff": diff }));
        }
        per_n.push(json!({ "n": n, "coefficients": entries }));
    }
    Ok(Report {
        json: json!({ "precision": T::MODE, "limits": model.limits, "rows": per_n }),
        header: vec!["n", "k", "b", "limit", "abs_diff"],
        rows,
        text: None,
        ok: true,
    })
}

fn polar_asymptotics_t<T: RealScalar>(
    bs: &BernsteinSzegoMeasure,
    lo: usize,
    hi: usize,
    pts: &[Complex64],
    ms: &MomentSequence<T>,
) -> Result<Report> {
    let model = bs.model()?;
    let fam = OrthogonalFamily::new(ms, hi)?;
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for n in lo.max(1)..=hi {
        let devs = polar::strong_asymptotics_check(&model, fam.get(n)?, pts)?;
        for (z, d) in pts.iter().zip(&devs) {
            rows.push(vec![n.to_string(), z.re.to_string(), z.im.to_string(), format!("{d:.6e}")]);
        }
        per_n.push(json!({ "n": n, "points": pts, "deviation": devs }));
    }
    Ok(Report {
        json: json!({ "precision": T::MODE, "model": model, "rows": per_n }),
        header: vec!["n", "re", "im", "deviation"],
        rows,
        text: None,
        ok: true,
    })
}

// ----- check -----

fn cmd_check(a: &RunArgs) -> Result<Report> {
    let results = match a.criterion {
        Some(id) => vec![acceptance::run(id, a.seed)
            .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}; expected 1..=10")))?],
        None => acceptance::run_all(a.seed),
    };
    let ok = results.iter().all(|r| r.pass);
    let mut text: String = results.iter().map(|r| r.line() + "\n").collect();
    text.push_str(&format!("{}/{} criteria passed\n", results.iter().filter(|r| r.pass).count(), results.len()));
    let rows = results
        .iter()
        .map(|r| vec![r.id.to_string(), r.name.clone(), r.pass.to_string(), r.elapsed_ms.to_string(), r.detail.clone()])
        .collect();
    Ok(Report {
        json: json!({ "results": results, "all_pass": ok }),
        header: vec!["id", "name", "pass", "elapsed_ms", "detail"],
        rows,
        text: Some(text),
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range(Some("0..10"), (0, 0)).unwrap(), (0, 10));
        assert_eq!(parse_range(Some("2..=4"), (0, 0)).unwrap(), (2, 4));
        assert_eq!(parse_range(Some("7"), (0, 0)).unwrap(), (7, 7));
        assert_eq!(parse_range(None, (1, 3)).unwrap(), (1, 3));
        assert_eq!(parse_range(Some("5..3"), (0, 0)), Err(Error::InvalidParameter("empty index range".into())));
        assert!(parse_range(Some("a..3"), (0, 0)).is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("-2.5").unwrap(), Complex64::new(-2.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1-0.5i").unwrap(), Complex64::new(1.0, -0.5));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn names_resolve() {
        assert_eq!(load_operator(Some("hermite")).unwrap(), OperatorSpec::Plain(ExactlySolvableOperator::hermite()));
        assert_eq!(load_measure(Some("chebyshev1")).unwrap(), MeasureSpec::Chebyshev1);
        assert!(load_measure(Some("/no/such/file")).unwrap_err().is_config_error());
    }
}
