//! File-driven front end: problem JSON in, JSON reports and CSV grids out.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::characterize::{
    constant_sign_interval, hypothesis_status, necessary_interval, nonexistence_check, nonhomogeneous_interval, Bound,
    HypothesisStatus, SignCharacterization, TdMode, Trigger,
};
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::green::{build_green, classify_relaxed, classify_sign, pg_ng_bounds, GreenFunction, SignReport};
use crate::ode::{markov_decomposition, DEFAULT_STEPS};
use crate::problem::{
    adjoint_boundary_conditions, build_space, derive_indices, BoundaryFunctional, DerivedIndices, Endpoint, IndexSet,
    ProblemSpec, SpaceDescriptor, SpaceVariant,
};
use crate::spectral::{find_root, BoundaryProblem, Direction, Eigenvalue, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub lambda_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub refine_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_t: usize,
    pub n_s: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TdHypothesis {
    Assert,
    Check,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub order: usize,
    pub interval: [f64; 2],
    pub coefficients: Vec<String>,
    #[serde(default)]
    pub m_bar: f64,
    pub sigma: Vec<usize>,
    pub epsilon: Vec<usize>,
    pub search: Option<SearchSection>,
    pub grid: Option<GridSection>,
    pub td_hypothesis: Option<TdHypothesis>,
}

/// A validated problem file with every default filled in.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ProblemFile,
    pub spec: ProblemSpec,
    pub search: SearchConfig,
    pub grid: (usize, usize),
    pub td: TdMode,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("problem file: {e}")))
    }

    pub fn load(path: &Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        ProblemFile::parse(&text)
    }

    pub fn resolve(self) -> Result<Loaded> {
        if self.coefficients.len() != self.order {
            return Err(Error::Input(format!(
                "order is {} but {} coefficients were given",
                self.order,
                self.coefficients.len()
            )));
        }
        let p = self
            .coefficients
            .iter()
            .map(|c| parse_expr(c))
            .collect::<Result<Vec<_>>>()?;
        let sigma = IndexSet::strict(self.sigma.clone())?;
        let epsilon = IndexSet::strict(self.epsilon.clone())?;
        let [a, b] = self.interval;
        let spec = ProblemSpec::new(a, b, p, self.m_bar, sigma, epsilon)?;
        let mut search = SearchConfig::for_spec(&spec);
        if let Some(s) = &self.search {
            search.lambda_max = s.lambda_max.unwrap_or(search.lambda_max);
            search.grid_points = s.grid_points.unwrap_or(search.grid_points);
            search.refine_tol = s.refine_tol.unwrap_or(search.refine_tol);
        }
        search.validate()?;
        let grid = self.grid.as_ref().map_or((201, 201), |g| (g.n_t, g.n_s));
        if grid.0 < 3 || grid.1 < 3 {
            return Err(Error::Input("grid needs at least 3 points per axis".into()));
        }
        let td = match self.td_hypothesis {
            Some(TdHypothesis::Assert) => TdMode::Assert,
            _ => TdMode::Check,
        };
        Ok(Loaded {
            file: self,
            spec,
            search,
            grid,
            td,
        })
    }
}

/// JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("infinity".into())
    } else {
        Value::String("-infinity".into())
    }
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn set(s: &IndexSet) -> Value {
    json!(s.as_slice())
}

fn echo(l: &Loaded) -> Value {
    let f = &l.file;
    json!({
        "order": f.order,
        "interval": [num(f.interval[0]), num(f.interval[1])],
        "coefficients": f.coefficients,
        "m_bar": num(f.m_bar),
        "sigma": f.sigma,
        "epsilon": f.epsilon,
        "search": {
            "lambda_max": num(l.search.lambda_max),
            "grid_points": l.search.grid_points,
            "refine_tol": num(l.search.refine_tol),
            "steps": l.search.steps,
        },
        "grid": {"n_t": l.grid.0, "n_s": l.grid.1},
        "td_hypothesis": match l.td { TdMode::Assert => "assert", TdMode::Check => "check" },
    })
}

fn indices_json(d: &DerivedIndices) -> Value {
    json!({
        "alpha": d.alpha,
        "beta": d.beta,
        "eta": d.eta,
        "gamma": d.gamma,
        "tau": set(&d.tau),
        "delta": set(&d.delta),
        "alpha2": d.alpha2,
        "beta2": d.beta2,
        "mu": d.mu,
    })
}

fn functional_json(f: &BoundaryFunctional) -> Value {
    json!({
        "endpoint": match f.endpoint { Endpoint::A => "a", Endpoint::B => "b" },
        "leading_order": f.leading_order(),
        "coefficients": nums(&f.coefficients),
    })
}

fn space_json(s: &SpaceDescriptor) -> Value {
    json!({"label": s.to_string(), "sigma": set(&s.sigma), "epsilon": set(&s.epsilon)})
}

fn eigen_json(label: &str, n: usize, e: &Eigenvalue) -> Value {
    json!({
        "label": label,
        "lambda": num(e.lambda),
        "m": num(e.lambda.abs().powf(1.0 / n as f64)),
        "space": e.space.as_ref().map(space_json),
        "direction": e.direction.name(),
        "bracket": [num(e.bracket.0), num(e.bracket.1)],
        "residual": num(e.residual),
        "simple": e.simple,
        "warnings": e.warnings,
    })
}

fn hypothesis_json(h: &HypothesisStatus) -> Value {
    match h {
        HypothesisStatus::NotCertified { k, t } => json!({"status": h.name(), "wronskian": k, "t": num(*t)}),
        _ => json!({"status": h.name()}),
    }
}

fn bound_json(b: &Bound) -> Value {
    json!({"value": num(b.value), "closed": b.closed, "source": b.source})
}

fn notation(c: &SignCharacterization) -> String {
    let lo = if c.lower.value.is_finite() { fmt_f(c.lower.value) } else { "-infinity".into() };
    format!(
        "{}{lo}, {}{}",
        if c.lower.closed { '[' } else { '(' },
        fmt_f(c.upper.value),
        if c.upper.closed { ']' } else { ')' }
    )
}

fn sign_json(r: &SignReport) -> Value {
    json!({
        "classification": r.classification.short(),
        "interior_sign_ok": r.interior_sign_ok,
        "d_alpha_ok": r.d_alpha_ok,
        "d_beta_ok": r.d_beta_ok,
        "worst_violation": {"t": num(r.worst_violation.0), "s": num(r.worst_violation.1), "value": num(r.worst_violation.2)},
    })
}

/// An interior point of the interval where the sign is sampled.
fn sample_m(c: &SignCharacterization) -> f64 {
    if c.lower.value.is_finite() {
        0.5 * (c.lower.value + c.upper.value)
    } else {
        c.upper.value - c.upper.value.abs().max(1.0)
    }
}

fn characterization_json(
    l: &Loaded,
    c: &SignCharacterization,
    sample: bool,
    relaxed: Option<(&IndexSet, &IndexSet)>,
) -> Result<Value> {
    let n = l.spec.n;
    let mut out = json!({
        "classification": c.classification.short(),
        "necessary_only": c.necessary_only,
        "notation": notation(c),
        "lower": bound_json(&c.lower),
        "upper": bound_json(&c.upper),
        "eigenvalues": c.eigenvalues.iter().map(|(lab, e)| eigen_json(lab, n, e)).collect::<Vec<_>>(),
        "hypothesis": hypothesis_json(&c.hypothesis),
    });
    if sample {
        let m = sample_m(c);
        let report = match relaxed {
            None => classify_sign(&build_green(&l.spec, m, l.grid.0, l.grid.1)?, &derive_indices(&l.spec)),
            Some((s, e)) => classify_relaxed(&l.spec, m, s, e, l.grid.0, l.grid.1)?,
        };
        out["sign_report"] = json!({"M": num(m), "report": sign_json(&report)});
    }
    Ok(out)
}

fn base_report(command: &str, l: &Loaded) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("input".into(), echo(l));
    m.insert("indices".into(), indices_json(&derive_indices(&l.spec)));
    m.insert("na".into(), json!(l.spec.na()));
    m
}

fn trigger_name(t: Option<Trigger>) -> Value {
    match t {
        None => Value::Null,
        Some(Trigger::SigmaK) => json!("sigma_k = k-1"),
        Some(Trigger::EpsilonLast) => json!("epsilon_last = n-k-1"),
        Some(Trigger::Both) => json!("both"),
    }
}

fn nonexistence_json(spec: &ProblemSpec) -> Value {
    let f = nonexistence_check(spec);
    json!({
        "no_inverse_negative": f.no_inverse_negative,
        "no_inverse_positive": f.no_inverse_positive,
        "trigger": trigger_name(f.trigger),
    })
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, v: Map<String, Value>) -> Outcome {
        let mut stdout = serde_json::to_string_pretty(&Value::Object(v)).expect("report serializes");
        stdout.push('\n');
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NaFailed => EXIT_PROPERTY,
        Error::NotFound { .. }
        | Error::Singular { .. }
        | Error::NotEigenvalue { .. }
        | Error::Overflow { .. }
        | Error::Disconjugacy { .. } => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn error_outcome(command: &str, e: &Error) -> Outcome {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    let kind = match e {
        Error::NotFound { .. } => "not-found",
        Error::Singular { .. } => "singular",
        Error::NaFailed => "na-failed",
        _ if exit_code(e) == EXIT_INPUT => "input",
        _ => "numerical",
    };
    let mut err = json!({"kind": kind, "message": e.to_string()});
    match e {
        Error::NotFound { lo, hi } => err["searched"] = json!([num(*lo), num(*hi)]),
        Error::Singular { det } => err["det"] = num(*det),
        _ => {}
    }
    m.insert("error".into(), err);
    let mut o = Outcome::report(exit_code(e), m);
    o.stderr = format!("error: {e}\n");
    o
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SpaceArg {
    Base,
    DropSigmaAddBeta,
    AddAlphaDropEps,
    DropSigmaAddAlpha,
    DropEpsAddBeta,
}

impl SpaceArg {
    pub fn variant(self) -> SpaceVariant {
        match self {
            SpaceArg::Base => SpaceVariant::Base,
            SpaceArg::DropSigmaAddBeta => SpaceVariant::DropSigmaKAddBeta,
            SpaceArg::AddAlphaDropEps => SpaceVariant::AddAlphaDropEpsLast,
            SpaceArg::DropSigmaAddAlpha => SpaceVariant::DropSigmaKAddAlpha,
            SpaceArg::DropEpsAddBeta => SpaceVariant::DropEpsLastAddBeta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DirectionArg {
    LeastPositive,
    BiggestNegative,
}

#[derive(Debug, Parser)]
#[command(name = "greensign", about = "Constant-sign intervals for Green's functions of two-point BVPs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Property (N_a), derived indices and adjoint boundary conditions.
    Check { file: PathBuf },
    /// Eigenvalue closest to zero in one direction.
    Eigen {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "base")]
        space: SpaceArg,
        #[arg(long, value_enum, default_value = "least-positive")]
        direction: DirectionArg,
    },
    /// Exact interval of M with constant sign.
    Interval { file: PathBuf },
    /// Necessary interval for the opposite sign.
    Necessary { file: PathBuf },
    /// Interval with boundary conditions relaxed to sign conditions.
    Nonhomog {
        file: PathBuf,
        /// `{"sigma": [...], "epsilon": [...]}`
        #[arg(long)]
        subsets: String,
    },
    /// Sample the Green's function to CSV, with a JSON sidecar.
    Green {
        file: PathBuf,
        #[arg(long = "M", allow_hyphen_values = true)]
        m: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Markov decomposition and Wronskian positivity window.
    Decompose { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Eigen { .. } => "eigen",
            Command::Interval { .. } => "interval",
            Command::Necessary { .. } => "necessary",
            Command::Nonhomog { .. } => "nonhomog",
            Command::Green { .. } => "green",
            Command::Decompose { .. } => "decompose",
        }
    }

    fn file(&self) -> &Path {
        match self {
            Command::Check { file }
            | Command::Eigen { file, .. }
            | Command::Interval { file }
            | Command::Necessary { file }
            | Command::Nonhomog { file, .. }
            | Command::Green { file, .. }
            | Command::Decompose { file } => file,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Subsets {
    sigma: Vec<usize>,
    epsilon: Vec<usize>,
}

pub fn run(cmd: &Command) -> Outcome {
    let loaded = ProblemFile::load(cmd.file()).and_then(ProblemFile::resolve);
    match loaded.and_then(|l| dispatch(cmd, &l)) {
        Ok(o) => o,
        Err(e) => error_outcome(cmd.name(), &e),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn dispatch(cmd: &Command, l: &Loaded) -> Result<Outcome> {
    match cmd {
        Command::Check { .. } => cmd_check(l),
        Command::Eigen { space, direction, .. } => cmd_eigen(l, *space, *direction),
        Command::Interval { .. } => cmd_interval(l),
        Command::Necessary { .. } => cmd_necessary(l),
        Command::Nonhomog { subsets, .. } => cmd_nonhomog(l, subsets),
        Command::Green { m, out, .. } => cmd_green(l, m.unwrap_or(l.spec.m_bar), out),
        Command::Decompose { .. } => cmd_decompose(l),
    }
}

pub fn cmd_check(l: &Loaded) -> Result<Outcome> {
    let mut r = base_report("check", l);
    let mut warnings = Vec::<String>::new();
    match adjoint_boundary_conditions(&l.spec) {
        Ok(fs) => {
            r.insert("adjoint_conditions".into(), Value::Array(fs.iter().map(functional_json).collect()));
        }
        Err(e) => warnings.push(format!("adjoint conditions: {e}")),
    }
    r.insert("nonexistence".into(), nonexistence_json(&l.spec));
    r.insert("warnings".into(), json!(warnings));
    Ok(Outcome::report(if l.spec.na() { EXIT_OK } else { EXIT_PROPERTY }, r))
}

pub fn cmd_eigen(l: &Loaded, space: SpaceArg, direction: DirectionArg) -> Result<Outcome> {
    let desc = build_space(&l.spec, &space.variant())?;
    let dir = match direction {
        DirectionArg::LeastPositive => Direction::LeastPositive,
        DirectionArg::BiggestNegative => Direction::BiggestNegative,
    };
    let bvp = BoundaryProblem::for_space(&l.spec, &desc, l.search.steps)?;
    let mut ev = find_root(&bvp, l.spec.m_bar, dir, &l.search)?;
    ev.space = Some(desc);
    let mut r = base_report("eigen", l);
    r.insert("space".into(), json!(space.variant().name()));
    r.insert("eigenvalue".into(), eigen_json("lambda", l.spec.n, &ev));
    r.insert("warnings".into(), json!(ev.warnings));
    Ok(Outcome::report(EXIT_OK, r))
}

fn finish_characterization(
    mut r: Map<String, Value>,
    l: &Loaded,
    c: &SignCharacterization,
    relaxed: Option<(&IndexSet, &IndexSet)>,
) -> Result<Outcome> {
    r.insert("result".into(), characterization_json(l, c, !c.necessary_only, relaxed)?);
    r.insert("warnings".into(), json!(c.warnings));
    Ok(Outcome::report(EXIT_OK, r))
}

pub fn cmd_interval(l: &Loaded) -> Result<Outcome> {
    if !l.spec.na() {
        return Err(Error::NaFailed);
    }
    let c = constant_sign_interval(&l.spec, &l.search, l.td)?;
    let mut r = base_report("interval", l);
    r.insert("nonexistence".into(), nonexistence_json(&l.spec));
    finish_characterization(r, l, &c, None)
}

pub fn cmd_necessary(l: &Loaded) -> Result<Outcome> {
    if !l.spec.na() {
        return Err(Error::NaFailed);
    }
    let mut r = base_report("necessary", l);
    r.insert("nonexistence".into(), nonexistence_json(&l.spec));
    match necessary_interval(&l.spec, &l.search, l.td)? {
        Some(c) => finish_characterization(r, l, &c, None),
        None => {
            r.insert("result".into(), Value::Null);
            r.insert("warnings".into(), json!(["the opposite sign never occurs for these boundary conditions"]));
            Ok(Outcome::report(EXIT_OK, r))
        }
    }
}

pub fn cmd_nonhomog(l: &Loaded, subsets: &str) -> Result<Outcome> {
    let s: Subsets = serde_json::from_str(subsets).map_err(|e| Error::Input(format!("--subsets: {e}")))?;
    let sigma = IndexSet::strict(s.sigma)?;
    let epsilon = IndexSet::strict(s.epsilon)?;
    if !l.spec.na() {
        return Err(Error::NaFailed);
    }
    let c = nonhomogeneous_interval(&l.spec, &sigma, &epsilon, &l.search, l.td)?;
    let mut r = base_report("nonhomog", l);
    r.insert("subsets".into(), json!({"sigma": set(&sigma), "epsilon": set(&epsilon)}));
    finish_characterization(r, l, &c, Some((&sigma, &epsilon)))
}

pub fn green_csv(gf: &GreenFunction) -> String {
    let mut out = String::with_capacity(gf.values.len() * 72);
    out.push_str("t,s,g\n");
    for (i, &t) in gf.t_grid.iter().enumerate() {
        for (j, &s) in gf.s_grid.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", fmt_f(t), fmt_f(s), fmt_f(gf.value(i, j)));
        }
    }
    out
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        let mut s = out.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    } else {
        out.with_extension("json")
    }
}

pub fn cmd_green(l: &Loaded, m: f64, out: &Path) -> Result<Outcome> {
    let gf = build_green(&l.spec, m, l.grid.0, l.grid.1)?;
    let report = classify_sign(&gf, &derive_indices(&l.spec));
    let (k1, k2) = pg_ng_bounds(&gf);
    let sidecar = sidecar_path(out);
    let mut r = base_report("green", l);
    r.insert("M".into(), num(m));
    r.insert("csv".into(), json!(out.display().to_string()));
    r.insert("max_abs".into(), num(gf.max_abs()));
    r.insert("max_jump_residual".into(), num(gf.max_jump_residual));
    r.insert("max_bc_residual".into(), num(gf.max_bc_residual));
    r.insert("sign".into(), sign_json(&report));
    let mut side = r.clone();
    side.insert(
        "slices".into(),
        json!({
            "t": nums(&gf.t_grid),
            "s": nums(&gf.s_grid),
            "d_alpha_at_a": nums(&gf.d_alpha_at_a),
            "d_beta_at_b": nums(&gf.d_beta_at_b),
            "w": nums(&gf.d_eta_at_sa),
            "y": nums(&gf.d_gamma_at_sb),
            "k1": nums(&k1),
            "k2": nums(&k2),
        }),
    );
    let write = |p: &Path, text: &str| std::fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display())));
    write(out, &green_csv(&gf))?;
    let mut side_text = serde_json::to_string_pretty(&Value::Object(side)).expect("sidecar serializes");
    side_text.push('\n');
    write(&sidecar, &side_text)?;
    r.insert("sidecar".into(), json!(sidecar.display().to_string()));
    Ok(Outcome::report(EXIT_OK, r))
}

pub fn cmd_decompose(l: &Loaded) -> Result<Outcome> {
    let bvp = BoundaryProblem::for_space(&l.spec, &l.spec.base_space(), DEFAULT_STEPS)?;
    let fs = bvp.fundamental(l.spec.m_bar)?;
    let md = markov_decomposition(&fs);
    let stride = (md.t.len() / 64).max(1);
    let idx: Vec<usize> = (0..md.t.len()).step_by(stride).collect();
    let pick = |v: &[f64]| nums(&idx.iter().map(|&i| v[i]).collect::<Vec<_>>());
    let mut r = base_report("decompose", l);
    r.insert("M".into(), num(l.spec.m_bar));
    r.insert("covers_interval".into(), json!(md.covers_interval()));
    r.insert("window".into(), json!([num(md.window.0), num(md.window.1)]));
    r.insert(
        "failure".into(),
        md.failure.map_or(Value::Null, |(k, t)| json!({"wronskian": k, "t": num(t)})),
    );
    r.insert("t".into(), pick(&md.t));
    r.insert("v".into(), Value::Array(md.v.iter().map(|v| pick(v)).collect()));
    let status = hypothesis_status(&l.spec, TdMode::Check, DEFAULT_STEPS)?;
    r.insert("hypothesis".into(), hypothesis_json(&status));
    Ok(Outcome::report(if md.covers_interval() { EXIT_OK } else { EXIT_PROPERTY }, r))
}
