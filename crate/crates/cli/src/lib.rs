//! The `foxh` command surface: argument model, dispatch and artifact rendering.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foxh_core::oracle::{eval_f_with_err, mellin_numeric, MAX_ORACLE_KERNELS};
use foxh_core::{
    build_foxh, ep_report, generate_corpus, parse_params, parse_spec, reduce, spec_json, xi_value, Complex64,
    ConvolutionSpec, CorpusConfig, Derived, Error, EvalOptions, FoxHParams, HEvaluator, Num, ParamsDoc,
    ProductVariant,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Evaluation grid `min:max:count:log|lin`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { min: 1e-2, max: 1e2, count: 25, log: true }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let u = k as f64 / last;
                if self.log {
                    let (a, b) = (self.min.log10(), self.max.log10());
                    10f64.powf(a + (b - a) * u)
                } else {
                    self.min + (self.max - self.min) * u
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Grid, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("grid {s:?}: expected min:max:count:log|lin"));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid {s:?}: {x:?}: {e}"));
        let (min, max) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|e| format!("grid {s:?}: count: {e}"))?;
        let log = match parts[3].trim() {
            "log" => true,
            "lin" | "linear" => false,
            o => return Err(format!("grid {s:?}: spacing must be log or lin, got {o:?}")),
        };
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(format!("grid {s:?}: need finite min < max"));
        }
        if count == 0 {
            return Err(format!("grid {s:?}: count must be at least 1"));
        }
        if min <= 0.0 {
            return Err(format!("grid {s:?}: points must be positive"));
        }
        Ok(Grid { min, max, count, log })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.min, self.max, self.count, if self.log { "log" } else { "lin" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Reciprocal,
    PowerArg,
    PowerWeight,
    Laplace,
    Euler,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Direct,
    Reciprocal,
}

impl From<VariantArg> for ProductVariant {
    fn from(v: VariantArg) -> ProductVariant {
        match v {
            VariantArg::Direct => ProductVariant::Direct,
            VariantArg::Reciprocal => ProductVariant::Reciprocal,
        }
    }
}

/// Flags of `transform`. Numbers are kept as text so `1/3` stays exact.
#[derive(Clone, Debug, Default, Args)]
pub struct TransformArgs {
    /// Rewrite to apply.
    #[arg(long, value_enum, global = true)]
    pub op: Option<Op>,
    /// omega of power-arg, laplace and product; the exponent w of power-weight.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    /// Product variant, direct when absent.
    #[arg(long, value_enum, global = true)]
    pub variant: Option<VariantArg>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega2: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda2: Option<String>,
    /// Second factor of `product` (spec or params JSON).
    #[arg(long, global = true)]
    pub with: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Spec to params, with the e.p. report embedded.
    Build,
    /// e.p. report of a spec.
    Check,
    /// CSV of H on the grid (spec or params input).
    Eval,
    /// CSV of the convolution f on the grid by direct quadrature.
    Oracle,
    /// Compare H with the oracle and check positivity and the Mellin round trip.
    Verify,
    /// Apply one rewrite to a params document.
    Transform,
    /// Recognized special cases of a params document.
    Reduce,
    /// Seeded random e.p.-valid specs, each verified; CSV summary.
    Corpus,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "foxh", version, about = "Positive Fox H-functions from Mellin convolutions")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON; stdin when absent or `-`.
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent or `-`.
    #[arg(long = "out", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = Grid::default())]
    pub grid: Grid,
    /// Absolute tolerance of H evaluation and of the oracle quadrature.
    #[arg(long, global = true, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of corpus specs.
    #[arg(long, global = true, default_value_t = 20)]
    pub count: usize,
    #[command(flatten)]
    pub transform: TransformArgs,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            input: None,
            output: None,
            grid: Grid::default(),
            tol: 1e-10,
            seed: 0,
            count: 20,
            transform: TransformArgs::default(),
        }
    }
}

/// A failed run: exit code plus the error document written to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    fn usage(kind: &str, message: impl Into<String>) -> Failure {
        Failure { code: 1, kind: kind.into(), message: message.into() }
    }

    pub fn json(&self) -> Value {
        json!({ "error": self.kind, "message": self.message, "exit_code": self.code })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) | Error::InvalidParams(_) => 1,
            Error::NoConvergence(_) => 3,
            _ => 2,
        };
        Failure { code, kind: e.kind().into(), message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn read_text(path: Option<&Path>) -> Out<String> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::usage("Io", format!("{}: {e}", p.display()))),
    }
}

fn read_stdin() -> Out<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).map_err(|e| Failure::usage("Io", format!("stdin: {e}")))?;
    Ok(s)
}

/// Either input document.
enum Input {
    Spec(ConvolutionSpec),
    Params(ParamsDoc),
}

fn parse_input(text: &str) -> Out<Input> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
    let is_params = match v.get("schema").and_then(Value::as_str) {
        Some(s) => s == foxh_core::PARAMS_SCHEMA,
        None => v.get("m").is_some(),
    };
    Ok(if is_params { Input::Params(parse_params(text)?) } else { Input::Spec(parse_spec(text)?) })
}

fn spec_input(text: &str) -> Out<ConvolutionSpec> {
    match parse_input(text)? {
        Input::Spec(s) => Ok(s),
        Input::Params(_) => Err(Error::Parse("this command needs a foxh.spec.v1 document".into()).into()),
    }
}

/// Params with history; a spec becomes a certified origin when it passes e.p.
fn derived_input(text: &str) -> Out<Derived> {
    match parse_input(text)? {
        Input::Params(d) => Ok(d.derived()),
        Input::Spec(s) => Ok(Derived::from_spec(&s)?),
    }
}

fn params_input(text: &str) -> Out<FoxHParams> {
    match parse_input(text)? {
        Input::Params(d) => Ok(d.params),
        Input::Spec(s) => Ok(build_foxh(&s)?),
    }
}

fn num_flag(name: &str, v: &Option<String>) -> Out<Num> {
    let s = v.as_deref().ok_or_else(|| Failure::usage("MissingFlag", format!("--{name} is required")))?;
    s.parse::<Num>().map_err(|e| Failure::from(Error::Parse(format!("--{name} {s:?}: {e}"))))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn evaluator(h: &FoxHParams, tol: f64) -> Out<HEvaluator> {
    Ok(HEvaluator::new(h, EvalOptions::with_tol(tol))?)
}

/// Per-point results in grid order; the first failure wins.
fn on_grid<T: Send, F: Fn(f64) -> foxh_core::Result<T> + Sync>(grid: &[f64], f: F) -> Out<Vec<T>> {
    let r: Vec<foxh_core::Result<T>> = grid.par_iter().map(|&t| f(t)).collect();
    r.into_iter().map(|x| x.map_err(Failure::from)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    /// Largest `|H - f|` on the grid; absent when the oracle cannot handle the spec.
    pub max_abs_diff: Option<f64>,
    pub min_value: f64,
    pub positivity_ok: bool,
    pub mellin_roundtrip_max_rel_err: f64,
}

pub fn verify_spec(spec: &ConvolutionSpec, grid: &[f64], tol: f64) -> Out<VerifyReport> {
    let h = build_foxh(spec)?;
    let ev = evaluator(&h, tol)?;
    let hv: Vec<f64> = on_grid(grid, |t| Ok(ev.eval(t)?.value))?;
    let max_abs_diff = if spec.len() <= MAX_ORACLE_KERNELS {
        let fv: Vec<f64> = on_grid(grid, |t| Ok(eval_f_with_err(spec, t, tol)?.0))?;
        Some(hv.iter().zip(&fv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    let min_value = hv.iter().copied().fold(f64::INFINITY, f64::min);
    let positivity_ok = hv.iter().all(|&v| v > -tol.max(1e-8 * v.abs()));
    let pts = ev.mellin_strip().sample_points();
    let errs: Vec<f64> = on_grid(&pts, |s| {
        let s = Complex64::new(s, 0.0);
        let num = mellin_numeric(&ev, s, 1e-9)?.value.re;
        let exact = xi_value(&h, s)?.re;
        Ok((num - exact).abs() / exact.abs())
    })?;
    let mellin_roundtrip_max_rel_err = errs.into_iter().fold(0.0, f64::max);
    Ok(VerifyReport { max_abs_diff, min_value, positivity_ok, mellin_roundtrip_max_rel_err })
}

fn transform(cfg: &RunConfig, text: &str) -> Out<String> {
    let a = &cfg.transform;
    let op = a.op.ok_or_else(|| Failure::usage("MissingFlag", "--op is required"))?;
    let d = derived_input(text)?;
    let out = match op {
        Op::Reciprocal => d.reciprocal(),
        Op::PowerArg => d.power_arg(&num_flag("omega", &a.omega)?)?,
        Op::PowerWeight => d.power_weight(&num_flag("omega", &a.omega)?),
        Op::Laplace => d.laplace(&num_flag("omega", &a.omega)?, &num_flag("lambda", &a.lambda)?)?,
        Op::Euler => d.euler(
            &num_flag("omega1", &a.omega1)?,
            &num_flag("lambda1", &a.lambda1)?,
            &num_flag("omega2", &a.omega2)?,
            &num_flag("lambda2", &a.lambda2)?,
        )?,
        Op::Product => {
            let path = a.with.as_deref().ok_or_else(|| Failure::usage("MissingFlag", "--with is required"))?;
            let other = derived_input(&read_text(Some(path))?)?;
            let variant = a.variant.unwrap_or(VariantArg::Direct).into();
            d.product(&other, &num_flag("omega", &a.omega)?, &num_flag("lambda", &a.lambda)?, variant)?
        }
    };
    Ok(pretty(&ParamsDoc::from_derived(&out, None)))
}

fn corpus(cfg: &RunConfig) -> Out<String> {
    let specs = generate_corpus(CorpusConfig::new(cfg.seed, cfg.count));
    let grid = cfg.grid.points();
    let reports: Vec<Out<VerifyReport>> = specs.par_iter().map(|s| verify_spec(s, &grid, cfg.tol)).collect();
    let mut rows = Vec::with_capacity(specs.len());
    for (i, (s, r)) in specs.iter().zip(reports).enumerate() {
        let r = r?;
        rows.push(vec![
            i.to_string(),
            s.len().to_string(),
            s.chi_prime().to_string(),
            r.max_abs_diff.map(sci).unwrap_or_default(),
            sci(r.min_value),
            r.positivity_ok.to_string(),
            sci(r.mellin_roundtrip_max_rel_err),
            spec_json(s).to_string(),
        ]);
    }
    Ok(csv_text(
        &[
            "index",
            "kernels",
            "chi_prime",
            "max_abs_diff",
            "min_value",
            "positivity_ok",
            "mellin_roundtrip_max_rel_err",
            "spec",
        ],
        rows,
    ))
}

fn check_config(cfg: &RunConfig) -> Out<()> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Failure::usage("InvalidConfig", format!("--tol must be positive, got {}", cfg.tol)));
    }
    Ok(())
}

/// The artifact a command produces.
pub fn render(cfg: &RunConfig) -> Out<String> {
    check_config(cfg)?;
    if cfg.command == Command::Corpus {
        return corpus(cfg);
    }
    let text = read_text(cfg.input.as_deref())?;
    let grid = cfg.grid.points();
    match cfg.command {
        Command::Build => {
            let spec = spec_input(&text)?;
            let report = ep_report(&spec);
            let doc = if report.ok {
                ParamsDoc::from_derived(&Derived::from_spec(&spec)?, Some(report))
            } else {
                ParamsDoc { ep_report: Some(report), ..ParamsDoc::bare(build_foxh(&spec)?) }
            };
            Ok(pretty(&doc))
        }
        Command::Check => Ok(pretty(&ep_report(&spec_input(&text)?))),
        Command::Eval => {
            let ev = evaluator(&params_input(&text)?, cfg.tol)?;
            let rows = on_grid(&grid, |t| ev.eval(t))?
                .into_iter()
                .zip(&grid)
                .map(|(r, &t)| vec![sci(t), sci(r.value), sci(r.abs_err_est), sci(r.height_used), r.panels.to_string()])
                .collect();
            Ok(csv_text(&["t", "value", "abs_err_est", "height_used", "panels"], rows))
        }
        Command::Oracle => {
            let spec = spec_input(&text)?;
            let rows = on_grid(&grid, |t| eval_f_with_err(&spec, t, cfg.tol))?
                .into_iter()
                .zip(&grid)
                .map(|((v, e), &t)| vec![sci(t), sci(v), sci(e)])
                .collect();
            Ok(csv_text(&["t", "value", "abs_err_est"], rows))
        }
        Command::Verify => Ok(pretty(&verify_spec(&spec_input(&text)?, &grid, cfg.tol)?)),
        Command::Transform => transform(cfg, &text),
        Command::Reduce => Ok(pretty(&reduce(&params_input(&text)?))),
        Command::Corpus => unreachable!(),
    }
}

fn write_out(path: Option<&Path>, body: &str) -> Out<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, body).map_err(|e| Failure::usage("Io", format!("{}: {e}", p.display())))
        }
        _ => {
            let mut o = io::stdout().lock();
            o.write_all(body.as_bytes()).and_then(|_| o.flush()).map_err(|e| Failure::usage("Io", e.to_string()))
        }
    }
}

/// Runs one command; returns the process exit code. Errors go to stderr as JSON.
pub fn run(cfg: &RunConfig) -> i32 {
    match render(cfg).and_then(|body| write_out(cfg.output.as_deref(), &body)) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.json());
            f.code
        }
    }
}
