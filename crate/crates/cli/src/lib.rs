//! Command-line surface of `packet-tunnel`: single evaluations, parameter
//! sweeps, steepest-descent ratio studies, density tables, the physical
//! parameter map and the self-check suite.
//!
//! [`run`] never exits the process; it returns the text for stdout and
//! stderr together with the exit code, so the binary stays a thin shim.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use packet_tunnel::physical::{kinematics, ParticleSpec};
use packet_tunnel::transmission::{
    evaluate, ln_t_from_table, ln_t_quadrature, ln_t_steepest, planewave_validity, BarrierQuery, Method,
    TransmissionResult,
};
use packet_tunnel::validation::{self, ValidationOptions};
use packet_tunnel::{DensityTable, Error};
use rayon::prelude::*;
use serde_json::{Map, Number, Value};

pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CONVERGENCE: u8 = 3;
    pub const UNWRITABLE: u8 = 4;
    pub const MALFORMED_INPUT: u8 = 5;
    pub const RELATIVISTIC: u8 = 6;
}

pub const SWEEP_HEADER: [&str; 8] = [
    "A",
    "B",
    "gamma",
    "method",
    "ln_T",
    "log10_T",
    "quad_error_ln",
    "planewave_ok",
];
pub const RATIO_HEADER: [&str; 6] = ["A", "B", "gamma", "ln_T_quad", "ln_T_star", "R"];

#[derive(Debug, Parser)]
#[command(name = "packet-tunnel", version, about = "Coulomb-barrier transmission of momentum wave packets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate ln T at one (A, B, gamma)
    Transmit(TransmitArgs),
    /// Evaluate ln T over a Cartesian grid and write CSV or JSON
    Sweep(SweepArgs),
    /// Compare steepest descent with quadrature, R = T*/T
    Ratio(RatioArgs),
    /// Evaluate ln T for a tabulated momentum density
    FromTable(FromTableArgs),
    /// Map a particle and energy onto the reduced barrier strength A
    Physical(PhysicalArgs),
    /// Run the acceptance checks and print a pass/fail table
    Validate(ValidateArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::from_str(s).map_err(|_| format!("unknown method `{s}` (expected quad, saddle, bessel or auto)"))
}

#[derive(Debug, Args)]
pub struct TransmitArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value = "auto", value_parser = parse_method)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Explicit B values; replaces the min/max/count grid
    #[arg(long = "B", value_delimiter = ',', num_args = 1.., conflicts_with_all = ["b_min", "b_max", "b_count"])]
    pub b: Vec<f64>,
    #[arg(long = "B-min", default_value_t = 1e-5)]
    pub b_min: f64,
    #[arg(long = "B-max", default_value_t = 10.0)]
    pub b_max: f64,
    #[arg(long = "B-count", default_value_t = 50)]
    pub b_count: usize,
    #[arg(long = "B-spacing", value_enum, default_value_t = Spacing::Log)]
    pub b_spacing: Spacing,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long = "A", value_delimiter = ',', num_args = 1.., required = true)]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub gamma: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long = "method", value_delimiter = ',', num_args = 1.., default_value = "quad", value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long = "A", default_value_t = 700.0)]
    pub a: f64,
    #[arg(long = "gamma", value_delimiter = ',', num_args = 1.., default_value = "1,1.5,2,3")]
    pub gammas: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FromTableArgs {
    /// CSV with header `y,density`
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long = "A")]
    pub a: f64,
}

#[derive(Debug, Args)]
pub struct PhysicalArgs {
    /// Product of the charge numbers
    #[arg(long = "Z")]
    pub z: f64,
    #[arg(long = "mass-amu")]
    pub mass_amu: f64,
    #[arg(long = "energy-eV")]
    pub energy_ev: f64,
    /// Use the reduced mass with a partner of `--partner-amu` (default: equal mass)
    #[arg(long = "reduced-mass")]
    pub reduced_mass: bool,
    #[arg(long = "partner-amu", requires = "reduced_mass")]
    pub partner_amu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Oracle table `A,B,gamma,ln_T`; the built-in copy when absent
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Scale β in the packet-identity checks (fault injection)
    #[arg(long, default_value_t = 1.0, hide = true)]
    pub beta_scale: f64,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// A command that could not complete: exit code and message for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(exit::USAGE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) | Error::Regime(_) => exit::USAGE,
            Error::Convergence { .. } => exit::CONVERGENCE,
            Error::Format(_) => exit::MALFORMED_INPUT,
        };
        let mut message = e.to_string();
        if let Error::Convergence { best_ln, error_ln, .. } = &e {
            let mut partial = Map::new();
            partial.insert("error".into(), Value::String(e.to_string()));
            partial.insert("ln_T_best".into(), best_ln.map_or(Value::Null, num));
            partial.insert("quad_error_ln".into(), error_ln.map_or(Value::Null, num));
            message = Value::Object(partial).to_string();
        }
        Failure { code, message }
    }
}

pub type Res<T> = std::result::Result<T, Failure>;

/// 12 significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_num(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// The single-result JSON object.
pub fn render_result(r: &TransmissionResult) -> Value {
    let mut m = Map::new();
    m.insert("ln_T".into(), num(r.ln_t()));
    m.insert("log10_T".into(), num(r.log10_t()));
    m.insert("G".into(), opt_num(r.g));
    m.insert("y_star_numeric".into(), opt_num(r.y_star_numeric));
    m.insert("y_star_approx".into(), opt_num(r.y_star_approx));
    m.insert("quad_error_ln".into(), opt_num(r.quad_error_ln));
    m.insert("planewave_ok".into(), Value::Bool(r.planewave_ok));
    m.insert("method_used".into(), Value::String(r.method_used.as_str().into()));
    m.insert("low_confidence".into(), Value::Bool(r.low_confidence));
    Value::Object(m)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Transmit(a) => cmd_transmit(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Ratio(a) => cmd_ratio(a),
        Command::FromTable(a) => cmd_from_table(a),
        Command::Physical(a) => cmd_physical(a),
        Command::Validate(a) => return cmd_validate(a),
    };
    match result {
        Ok(stdout) => Outcome {
            stdout,
            stderr: String::new(),
            code: exit::OK,
        },
        Err(f) => Outcome {
            stdout: String::new(),
            stderr: format!("{}\n", f.message),
            code: f.code,
        },
    }
}

fn cmd_transmit(args: &TransmitArgs) -> Res<String> {
    let q = BarrierQuery::new(args.a, args.b, args.gamma, args.method)?;
    Ok(pretty(&render_result(&evaluate(&q)?)))
}

fn cmd_from_table(args: &FromTableArgs) -> Res<String> {
    let file = File::open(&args.file)
        .map_err(|e| Failure::new(exit::MALFORMED_INPUT, format!("cannot read {}: {e}", args.file.display())))?;
    let table = DensityTable::from_csv(file).map_err(|e| {
        Failure::new(exit::MALFORMED_INPUT, format!("{}: {e}", args.file.display()))
    })?;
    Ok(pretty(&render_result(&ln_t_from_table(&table, args.a)?)))
}

fn cmd_physical(args: &PhysicalArgs) -> Res<String> {
    let mut spec = ParticleSpec::new(args.z, args.mass_amu, args.energy_ev)?;
    if args.reduced_mass {
        spec = spec.with_reduced_mass(args.partner_amu.unwrap_or(args.mass_amu))?;
    }
    let k = kinematics(&spec)?;
    let mut m = Map::new();
    m.insert("A".into(), num(k.big_a));
    m.insert("a_over_mc".into(), num(k.a_over_mc));
    m.insert("v0_over_c".into(), num(k.v0_over_c));
    m.insert("relativistic_flag".into(), Value::Bool(k.relativistic));
    let text = pretty(&Value::Object(m));
    if k.relativistic {
        return Err(Failure::new(
            exit::RELATIVISTIC,
            format!("v0/c = {:.4} exceeds 0.1; non-relativistic kinematics do not apply\n{}", k.v0_over_c, text.trim_end()),
        ));
    }
    Ok(text)
}

fn cmd_validate(args: &ValidateArgs) -> Outcome {
    let opts = ValidationOptions {
        beta_scale: args.beta_scale,
        oracle_path: args.oracle.clone(),
    };
    match validation::run(&opts) {
        Ok(report) => Outcome {
            stdout: format!("{report}\n"),
            stderr: String::new(),
            code: if report.all_passed() { exit::OK } else { exit::VALIDATION_FAILED },
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("validate: {e}\n"),
            code: exit::VALIDATION_FAILED,
        },
    }
}

/// How the B values of a sweep are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum BGrid {
    Range {
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
    },
    List(Vec<f64>),
}

impl BGrid {
    fn from_args(g: &GridArgs) -> Self {
        if g.b.is_empty() {
            BGrid::Range {
                min: g.b_min,
                max: g.b_max,
                count: g.b_count,
                spacing: g.b_spacing,
            }
        } else {
            BGrid::List(g.b.clone())
        }
    }

    /// Ascending B values.
    pub fn values(&self) -> Res<Vec<f64>> {
        let mut v = match *self {
            BGrid::List(ref v) => v.clone(),
            BGrid::Range {
                min,
                max,
                count,
                spacing,
            } => {
                if !(min > 0.0 && min < max && max.is_finite()) {
                    return Err(Failure::usage(format!("B grid needs 0 < min < max, got {min}..{max}")));
                }
                if count < 2 {
                    return Err(Failure::usage(format!("B grid needs at least 2 points, got {count}")));
                }
                let last = (count - 1) as f64;
                (0..count)
                    .map(|i| match (i, spacing) {
                        (0, _) => min,
                        (i, _) if i == count - 1 => max,
                        (i, Spacing::Log) => 10f64.powf(min.log10() + (max.log10() - min.log10()) * i as f64 / last),
                        (i, Spacing::Linear) => min + (max - min) * i as f64 / last,
                    })
                    .collect()
            }
        };
        if v.is_empty() {
            return Err(Failure::usage("B list is empty"));
        }
        if let Some(b) = v.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(Failure::usage(format!("B values must be positive and finite, got {b}")));
        }
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

fn check_list(name: &str, values: &[f64]) -> Res<()> {
    if values.is_empty() {
        return Err(Failure::usage(format!("{name} list is empty")));
    }
    Ok(())
}

impl SweepConfig {
    fn from_args(args: &SweepArgs) -> Res<Self> {
        check_list("A", &args.a)?;
        check_list("gamma", &args.gamma)?;
        let cfg = SweepConfig {
            a_values: args.a.clone(),
            b_values: BGrid::from_args(&args.grid).values()?,
            gamma_values: args.gamma.clone(),
            methods: args.methods.clone(),
            output_path: args.out.output.clone(),
            format: args.format,
        };
        // every (A, gamma, method) combination must be a valid query
        for &a in &cfg.a_values {
            for &g in &cfg.gamma_values {
                for &m in &cfg.methods {
                    BarrierQuery::new(a, cfg.b_values[0], g, m)?;
                }
            }
        }
        Ok(cfg)
    }

    /// Points in output order: A, then gamma, then ascending B, then method.
    pub fn points(&self) -> Vec<(f64, f64, f64, Method)> {
        let mut pts = Vec::new();
        for &a in &self.a_values {
            for &g in &self.gamma_values {
                for &b in &self.b_values {
                    for &m in &self.methods {
                        pts.push((a, b, g, m));
                    }
                }
            }
        }
        pts
    }
}

/// Map `f` over `items` on `threads` workers, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], threads: Option<usize>, f: impl Fn(&T) -> R + Sync + Send) -> Res<Vec<R>> {
    match threads {
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::usage(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
        None => Ok(items.par_iter().map(&f).collect()),
    }
}

/// Open the destination before any work so an unwritable path fails fast.
fn open_output(path: Option<&Path>) -> Res<Option<File>> {
    path.map(|p| {
        File::create(p).map_err(|e| Failure::new(exit::UNWRITABLE, format!("cannot write {}: {e}", p.display())))
    })
    .transpose()
}

fn emit(file: Option<File>, path: Option<&Path>, body: Vec<u8>) -> Res<String> {
    match file {
        None => Ok(String::from_utf8(body).expect("output is UTF-8")),
        Some(mut f) => {
            f.write_all(&body).and_then(|_| f.flush()).map_err(|e| {
                Failure::new(exit::UNWRITABLE, format!("cannot write {}: {e}", path.unwrap().display()))
            })?;
            Ok(String::new())
        }
    }
}

struct SweepPoint {
    a: f64,
    b: f64,
    gamma: f64,
    method: Method,
    result: std::result::Result<TransmissionResult, Error>,
}

fn one_line(e: &Error) -> String {
    e.to_string().replace(['\n', '\r'], " ")
}

/// One CSV record, LF-terminated.
fn csv_line<I, T>(fields: I) -> Vec<u8>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    w.into_inner().expect("in-memory write")
}

fn note_line(e: &Error) -> Vec<u8> {
    format!("# note: {}\n", one_line(e)).into_bytes()
}

fn sweep_csv(points: &[SweepPoint]) -> Vec<u8> {
    let mut buf = csv_line(SWEEP_HEADER);
    for p in points {
        let a = fmt_num(p.a);
        let b = fmt_num(p.b);
        let g = fmt_num(p.gamma);
        match &p.result {
            Ok(r) => {
                let err = r.quad_error_ln.map(fmt_num).unwrap_or_default();
                buf.extend(csv_line([
                    a.as_str(),
                    &b,
                    &g,
                    r.method_used.as_str(),
                    &fmt_num(r.ln_t()),
                    &fmt_num(r.log10_t()),
                    &err,
                    if r.planewave_ok { "true" } else { "false" },
                ]));
            }
            Err(e) => {
                let ok = planewave_validity(p.a, p.b).1;
                buf.extend(csv_line([
                    a.as_str(),
                    &b,
                    &g,
                    p.method.as_str(),
                    "",
                    "",
                    "",
                    if ok { "true" } else { "false" },
                ]));
                buf.extend(note_line(e));
            }
        }
    }
    buf
}

fn sweep_json(points: &[SweepPoint]) -> Vec<u8> {
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            let mut m = Map::new();
            m.insert("A".into(), num(p.a));
            m.insert("B".into(), num(p.b));
            m.insert("gamma".into(), num(p.gamma));
            match &p.result {
                Ok(r) => {
                    m.insert("method".into(), Value::String(r.method_used.as_str().into()));
                    if let Value::Object(rest) = render_result(r) {
                        m.extend(rest);
                    }
                }
                Err(e) => {
                    m.insert("method".into(), Value::String(p.method.as_str().into()));
                    m.insert("ln_T".into(), Value::Null);
                    m.insert("planewave_ok".into(), Value::Bool(planewave_validity(p.a, p.b).1));
                    m.insert("note".into(), Value::String(one_line(e)));
                }
            }
            Value::Object(m)
        })
        .collect();
    pretty(&Value::Array(rows)).into_bytes()
}

fn cmd_sweep(args: &SweepArgs) -> Res<String> {
    let cfg = SweepConfig::from_args(args)?;
    let path = cfg.output_path.as_deref();
    let file = open_output(path)?;
    let points = par_map(&cfg.points(), args.out.threads, |&(a, b, gamma, method)| SweepPoint {
        a,
        b,
        gamma,
        method,
        result: BarrierQuery::new(a, b, gamma, method).and_then(|q| evaluate(&q)),
    })?;
    let body = match cfg.format {
        Format::Csv => sweep_csv(&points),
        Format::Json => sweep_json(&points),
    };
    emit(file, path, body)
}

fn cmd_ratio(args: &RatioArgs) -> Res<String> {
    check_list("gamma", &args.gammas)?;
    let bs = BGrid::from_args(&args.grid).values()?;
    for &g in &args.gammas {
        BarrierQuery::new(args.a, bs[0], g, Method::Quadrature)?;
    }
    let path = args.out.output.as_deref();
    let file = open_output(path)?;
    let mut pts = Vec::new();
    for &g in &args.gammas {
        for &b in &bs {
            pts.push((b, g));
        }
    }
    let a = args.a;
    let rows = par_map(&pts, args.out.threads, |&(b, g)| {
        let quad = BarrierQuery::new(a, b, g, Method::Quadrature).and_then(|q| ln_t_quadrature(&q));
        let star = BarrierQuery::new(a, b, g, Method::SteepestDescent).and_then(|q| ln_t_steepest(&q));
        (b, g, quad.map(|r| r.ln_t()), star.map(|r| r.ln_t()))
    })?;

    let mut buf = csv_line(RATIO_HEADER);
    for (b, g, quad, star) in &rows {
        let cell = |x: &std::result::Result<f64, Error>| x.as_ref().map(|v| fmt_num(*v)).unwrap_or_default();
        let ratio = match (quad, star) {
            (Ok(q), Ok(s)) => fmt_num((s - q).exp()),
            _ => String::new(),
        };
        buf.extend(csv_line([fmt_num(a), fmt_num(*b), fmt_num(*g), cell(quad), cell(star), ratio]));
        if let Some(e) = quad.as_ref().err().or(star.as_ref().err()) {
            buf.extend(note_line(e));
        }
    }
    emit(file, path, buf)
}
