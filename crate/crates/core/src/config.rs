//! Experiment configuration: a flat JSON object, validated strictly.
//!
//! Every problem of the document is reported at once; unknown keys are
//! rejected by name. Physics parameters (`d`, `alpha`, `beta`) never get
//! defaults. The resolved document (with defaults filled in) is kept for
//! provenance and embedded verbatim in every report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ball::{BallForcing, SymmetryOptions};
use crate::error::{FujitaError, Result};
use crate::evolution::{OutcomeTag, ProblemSpec, RunControls};
use crate::nonlinearity::{NonlinearityKind, NonlinearitySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifySteady,
    Evolve,
    Dichotomy,
    FkCheck,
    Ball,
    Regime,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::VerifySteady,
        Command::Evolve,
        Command::Dichotomy,
        Command::FkCheck,
        Command::Ball,
        Command::Regime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifySteady => "verify-steady",
            Command::Evolve => "evolve",
            Command::Dichotomy => "dichotomy",
            Command::FkCheck => "fk-check",
            Command::Ball => "ball",
            Command::Regime => "regime",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command \"{s}\" (expected one of verify-steady, evolve, dichotomy, fk-check, ball, regime)"))
    }
}

/// Initial datum on the periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Datum {
    /// `amplitude · u_{0,1}`, the explicit steady state centred at 0 with `A = 1`.
    Steady { amplitude: f64 },
    /// `amplitude · exp(−|x|²/width²)`.
    Gaussian { amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadySettings {
    pub d: u32,
    pub alpha: f64,
    pub amplitude: f64,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub perturbation: f64,
    pub min_perturbed_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSettings {
    pub problem: ProblemSpec,
    pub datum: Datum,
    pub controls: RunControls,
    pub expect: Option<OutcomeTag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomySettings {
    pub problem: ProblemSpec,
    pub datum: Datum,
    pub controls: RunControls,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FkSettings {
    pub problem: ProblemSpec,
    pub datum: Datum,
    pub t: f64,
    pub x: Vec<f64>,
    pub record_dt: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub z_max: f64,
    pub control: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallAction {
    Solve,
    Symmetry,
    Boundary,
    Kernels,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryInput {
    /// The explicit steady profile restricted to the ball.
    RadialProfile,
    /// `max(0, 1 − 4‖x − (0.3, 0)‖²)`.
    ShiftedBump,
    /// A computed ball steady state (`d = 2`, radially extended).
    Solution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallSettings {
    pub action: BallAction,
    pub d: u32,
    pub alpha: f64,
    pub forcing: BallForcing,
    pub intervals: usize,
    pub solve_tol: f64,
    pub symmetry_tol: f64,
    pub exponent_tol: f64,
    pub input: SymmetryInput,
    pub direction: Vec<f64>,
    pub grid_n: usize,
    pub symmetry: SymmetryOptions,
    pub n_paths: usize,
    pub dist: f64,
    pub z_max: f64,
    pub normalization_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSettings {
    pub d: u32,
    pub alpha: f64,
    pub nonlinearity: NonlinearitySpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandSettings {
    VerifySteady(SteadySettings),
    Evolve(EvolveSettings),
    Dichotomy(DichotomySettings),
    FkCheck(FkSettings),
    Ball(BallSettings),
    Regime(RegimeSettings),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub settings: CommandSettings,
    /// The document with all defaults filled in.
    pub resolved: BTreeMap<String, Value>,
}

impl ExperimentConfig {
    /// Replaces the seed (command-line override); keeps `resolved` in sync.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.resolved.insert("seed".into(), Value::from(seed));
        self
    }

    pub fn with_output_dir(mut self, dir: PathBuf) -> Self {
        self.resolved.insert("output_dir".into(), Value::from(dir.display().to_string()));
        self.output_dir = Some(dir);
        self
    }
}

/// Parses a config document; the `command` key is required.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_for(text, None)
}

/// Parses a config document for `command`. A `command` key in the document,
/// if present, must agree.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| FujitaError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = value else {
        return Err(FujitaError::Config(vec!["config must be a JSON object".into()]));
    };
    let mut r = Reader::new(&map);

    let command = match (r.opt_str("command"), command) {
        (Some(s), given) => match s.parse::<Command>() {
            Ok(c) => {
                if let Some(g) = given.filter(|g| *g != c) {
                    r.error(format!("command: document says \"{c}\" but \"{g}\" was requested"));
                }
                Some(c)
            }
            Err(e) => {
                r.error(format!("command: {e}"));
                None
            }
        },
        (None, Some(g)) => {
            r.resolved.insert("command".into(), Value::from(g.name()));
            Some(g)
        }
        (None, None) => {
            r.error("command: missing required key".into());
            None
        }
    };
    let seed = r.u64_or("seed", 0);
    let output_dir = r.opt_str("output_dir").map(PathBuf::from);

    let settings = command.map(|c| match c {
        Command::VerifySteady => CommandSettings::VerifySteady(steady_settings(&mut r)),
        Command::Evolve => {
            let problem = problem(&mut r);
            let datum = datum(&mut r, problem.as_ref().map(|p| p.d));
            let controls = controls(&mut r);
            let expect = r.opt_enum::<OutcomeTag>("expect", "BlewUp, Extinct, Undecided");
            CommandSettings::Evolve(EvolveSettings {
                problem: problem.unwrap_or_else(placeholder_problem),
                datum,
                controls,
                expect,
            })
        }
        Command::Dichotomy => {
            let problem = problem(&mut r);
            let datum = datum(&mut r, problem.as_ref().map(|p| p.d));
            let controls = controls(&mut r);
            let eps = r.f64_req("eps", |v| v > 0.0 && v < 1.0, "(0,1)");
            CommandSettings::Dichotomy(DichotomySettings {
                problem: problem.unwrap_or_else(placeholder_problem),
                datum,
                controls,
                eps,
            })
        }
        Command::FkCheck => CommandSettings::FkCheck(fk_settings(&mut r)),
        Command::Ball => CommandSettings::Ball(ball_settings(&mut r)),
        Command::Regime => {
            let d = r.u32_req("d", |v| (1..=16).contains(&v), "[1,16]");
            let alpha = alpha(&mut r);
            let nonlinearity = nonlinearity(&mut r);
            CommandSettings::Regime(RegimeSettings {
                d,
                alpha,
                nonlinearity: nonlinearity.unwrap_or(PLACEHOLDER_G),
            })
        }
    });

    if command.is_none() {
        // Without a command the remaining keys cannot be judged.
        r.used.extend(map.keys().cloned());
    }
    let resolved = r.finish()?;
    Ok(ExperimentConfig {
        command: command.expect("errors are reported before this point"),
        seed,
        output_dir,
        settings: settings.expect("errors are reported before this point"),
        resolved,
    })
}

const PLACEHOLDER_G: NonlinearitySpec = NonlinearitySpec {
    kind: NonlinearityKind::PowerLaw,
    beta: 1.0,
    c: 1.0,
    theta: 1.0,
};

fn placeholder_problem() -> ProblemSpec {
    ProblemSpec {
        d: 1,
        alpha: 1.0,
        nonlinearity: PLACEHOLDER_G,
        l: 1.0,
        n: 8,
    }
}

fn alpha(r: &mut Reader) -> f64 {
    r.f64_req("alpha", |v| v > 0.0 && v <= 2.0, "(0,2]")
}

fn nonlinearity(r: &mut Reader) -> Option<NonlinearitySpec> {
    let beta = r.f64_req("beta", |v| v > 0.0, "(0,inf)");
    let kind = r
        .opt_enum::<NonlinearityKind>("nonlinearity", "power_law, scaled_power_law")
        .unwrap_or(NonlinearityKind::PowerLaw);
    r.resolved.insert("nonlinearity".into(), serde_json::to_value(kind).expect("enum serializes"));
    let c = r.f64_or("c", 1.0, |v| v > 0.0, "(0,inf)");
    let theta = r.f64_or("theta", 1.0, |v| v > 0.0, "(0,inf)");
    let spec = NonlinearitySpec { kind, beta, c, theta };
    if beta.is_finite() && beta > 0.0 {
        if let Err(e) = spec.validate() {
            r.error(format!("nonlinearity: {e}"));
        }
    }
    Some(spec)
}

fn problem(r: &mut Reader) -> Option<ProblemSpec> {
    let d = r.u32_req("d", |v| (1..=3).contains(&v), "[1,3]") as usize;
    let alpha = alpha(r);
    let nonlinearity = nonlinearity(r)?;
    let l = r.f64_req("L", |v| v > 0.0, "(0,inf)");
    let n = r.usize_req("N", |v| v >= 8 && v.is_power_of_two(), "powers of two >= 8");
    Some(ProblemSpec {
        d,
        alpha,
        nonlinearity,
        l,
        n,
    })
}

fn datum(r: &mut Reader, d: Option<usize>) -> Datum {
    let kind = r.str_or("datum", "steady");
    let amplitude = r.f64_req("amplitude", |v| v > 0.0, "(0,inf)");
    match kind.as_str() {
        "steady" => {
            let alpha = r.map.get("alpha").and_then(Value::as_f64);
            if let (Some(d), Some(alpha)) = (d, alpha) {
                if !(d as f64 > alpha) {
                    r.error(format!("datum: the steady profile needs d > alpha (d = {d}, alpha = {alpha})"));
                }
            }
            Datum::Steady { amplitude }
        }
        "gaussian" => {
            let width = r.f64_or("width", 1.0, |v| v > 0.0, "(0,inf)");
            Datum::Gaussian { amplitude, width }
        }
        other => {
            r.error(format!("datum: unknown kind \"{other}\" (expected steady, gaussian)"));
            Datum::Steady { amplitude }
        }
    }
}

fn controls(r: &mut Reader) -> RunControls {
    let dflt = RunControls::default();
    RunControls {
        t_max: r.f64_or("t_max", dflt.t_max, |v| v > 0.0, "(0,inf)"),
        dt_max: r.f64_or("dt_max", dflt.dt_max, |v| v > 0.0, "(0,inf)"),
        safety: r.f64_or("safety", dflt.safety, |v| v > 0.0 && v <= 1.0, "(0,1]"),
        m_max: r.f64_or("m_max", dflt.m_max, |v| v > 1.0, "(1,inf)"),
        contraction: r.f64_or("contraction", dflt.contraction, |v| v > 1.0, "(1,inf)"),
        delta_ext: r.f64_or("delta_ext", dflt.delta_ext, |v| v > 0.0 && v < 1.0, "(0,1)"),
        final_window: r.f64_or("final_window", dflt.final_window, |v| v > 0.0 && v < 1.0, "(0,1)"),
        max_steps: r.usize_or("max_steps", dflt.max_steps, |v| v > 0, "[1,inf)"),
        checkpoints: Vec::new(),
    }
}

fn steady_settings(r: &mut Reader) -> SteadySettings {
    let d = r.u32_req("d", |v| (1..=16).contains(&v), "[1,16]");
    let alpha = alpha(r);
    let amplitude = r.f64_req("amplitude", |v| v > 0.0, "(0,inf)");
    if f64::from(d) <= alpha && alpha.is_finite() {
        r.error(format!("d: steady states need d > alpha (d = {d}, alpha = {alpha})"));
    }
    if let Some(beta) = r.opt_f64("beta") {
        let p = (f64::from(d) + alpha) / (f64::from(d) - alpha);
        if ((1.0 + beta) - p).abs() > 1e-12 * p {
            r.error(format!("beta: the steady family needs 1 + beta = (d+alpha)/(d-alpha) = {p}, got beta = {beta}"));
        }
    }
    let r_max = r.f64_or("r_max", 5.0, |v| v >= 0.0, "[0,inf)");
    let r_step = r.f64_or("r_step", 0.1, |v| v > 0.0, "(0,inf)");
    let count = if r_step > 0.0 && r_max >= 0.0 { (r_max / r_step + 1e-9).floor() as usize + 1 } else { 1 };
    SteadySettings {
        d,
        alpha,
        amplitude,
        radii: (0..count).map(|k| k as f64 * r_step).collect(),
        tolerance: r.f64_or("tolerance", 1e-3, |v| v > 0.0, "(0,inf)"),
        perturbation: r.f64_or("perturbation", 1.1, |v| v > 0.0 && v != 1.0, "(0,inf) minus {1}"),
        min_perturbed_residual: r.f64_or("min_perturbed_residual", 0.01, |v| v >= 0.0, "[0,inf)"),
    }
}

fn fk_settings(r: &mut Reader) -> FkSettings {
    let problem = problem(r);
    let datum = datum(r, problem.as_ref().map(|p| p.d));
    let t = r.f64_req("t", |v| v > 0.0, "(0,inf)");
    let x = r.vec_f64_or("x", vec![0.0; problem.as_ref().map_or(1, |p| p.d)]);
    if let Some(p) = &problem {
        if x.len() != p.d {
            r.error(format!("x: expected {} coordinates, got {}", p.d, x.len()));
        }
    }
    FkSettings {
        problem: problem.unwrap_or_else(placeholder_problem),
        datum,
        t,
        x,
        record_dt: r.f64_or("record_dt", 5e-4, |v| v > 0.0, "(0,inf)"),
        n_paths: r.usize_or("n_paths", 100_000, |v| v >= 2, "[2,inf)"),
        n_steps: r.usize_or("n_steps", 200, |v| v >= 2 && v % 2 == 0, "even integers >= 2"),
        z_max: r.f64_or("z_max", 3.0, |v| v > 0.0, "(0,inf)"),
        control: r.bool_or("control", true),
    }
}

fn ball_settings(r: &mut Reader) -> BallSettings {
    let action = r.opt_enum::<BallAction>("action", "solve, symmetry, boundary, kernels");
    if action.is_none() && !r.has_error_for("action") {
        r.error("action: missing required key".into());
    }
    let d = r.u32_req("d", |v| v == 1 || v == 2, "{1,2}");
    let alpha = alpha(r);
    let forcing_kind = r.str_or("forcing", "tanh");
    let a = r.f64_or("forcing_a", 0.2, f64::is_finite, "finite reals");
    let b = r.f64_or("forcing_b", 0.3, |v| v > 0.0, "(0,inf)");
    let forcing = match forcing_kind.as_str() {
        "affine" => BallForcing::Affine { a, b },
        "tanh" => BallForcing::Tanh { a, b },
        other => {
            r.error(format!("forcing: unknown kind \"{other}\" (expected affine, tanh)"));
            BallForcing::Tanh { a, b }
        }
    };
    let input = r.opt_enum::<SymmetryInput>("input", "radial_profile, shifted_bump, solution").unwrap_or(SymmetryInput::Solution);
    r.resolved.insert("input".into(), serde_json::to_value(input).expect("enum serializes"));
    let direction = r.vec_f64_or("direction", if d == 1 { vec![1.0] } else { vec![-1.0, 0.0] });
    if direction.len() != d as usize || direction.iter().all(|c| *c == 0.0) {
        r.error(format!("direction: expected a non-zero vector with {d} components"));
    }
    let dflt = SymmetryOptions::default();
    BallSettings {
        action: action.unwrap_or(BallAction::Solve),
        d,
        alpha,
        forcing,
        intervals: r.usize_or("intervals", 64, |v| v >= 4, "[4,inf)"),
        solve_tol: r.f64_or("solve_tol", 1e-10, |v| v > 0.0, "(0,inf)"),
        symmetry_tol: r.f64_or("symmetry_tol", 1e-6, |v| v > 0.0, "(0,inf)"),
        exponent_tol: r.f64_or("exponent_tol", 0.1, |v| v > 0.0, "(0,inf)"),
        input,
        direction,
        grid_n: r.usize_or("grid_n", 121, |v| v >= 5, "[5,inf)"),
        symmetry: SymmetryOptions {
            lambda_steps: r.usize_or("lambda_steps", dflt.lambda_steps, |v| v >= 1, "[1,inf)"),
            tol_factor: r.f64_or("tol_factor", dflt.tol_factor, |v| v >= 0.0, "[0,inf)"),
            max_violations_per_lambda: dflt.max_violations_per_lambda,
        },
        n_paths: r.usize_or("n_paths", 100_000, |v| v >= 2, "[2,inf)"),
        dist: r.f64_or("dist", 0.0, |v| (0.0..1.0).contains(&v), "[0,1)"),
        z_max: r.f64_or("z_max", 3.0, |v| v > 0.0, "(0,inf)"),
        normalization_tol: r.f64_or("normalization_tol", 1e-6, |v| v > 0.0, "(0,inf)"),
    }
}

/// Reads keys from the document, recording defaults and collecting errors.
struct Reader<'a> {
    map: &'a Map<String, Value>,
    used: BTreeSet<String>,
    errors: Vec<String>,
    resolved: BTreeMap<String, Value>,
}

impl<'a> Reader<'a> {
    fn new(map: &'a Map<String, Value>) -> Self {
        Self {
            map,
            used: BTreeSet::new(),
            errors: Vec::new(),
            resolved: BTreeMap::new(),
        }
    }

    fn error(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn has_error_for(&self, key: &str) -> bool {
        self.errors.iter().any(|e| e.starts_with(&format!("{key}:")))
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_string());
        let v = self.map.get(key)?;
        self.resolved.insert(key.to_string(), v.clone());
        Some(v)
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        match self.take(key)? {
            Value::Number(n) => n.as_f64(),
            other => {
                self.error(format!("{key}: expected a number, got {other}"));
                None
            }
        }
    }

    fn opt_f64(&mut self, key: &str) -> Option<f64> {
        self.number(key)
    }

    fn check_f64(&mut self, key: &str, v: f64, ok: impl Fn(f64) -> bool, range: &str) -> f64 {
        if !(v.is_finite() && ok(v)) {
            self.error(format!("{key}: {key} out of {range} (got {v})"));
        }
        v
    }

    fn f64_req(&mut self, key: &str, ok: impl Fn(f64) -> bool, range: &str) -> f64 {
        let present = self.map.contains_key(key);
        match self.number(key) {
            Some(v) => self.check_f64(key, v, ok, range),
            None => {
                if !present {
                    self.error(format!("{key}: missing required key"));
                }
                f64::NAN
            }
        }
    }

    fn f64_or(&mut self, key: &str, default: f64, ok: impl Fn(f64) -> bool, range: &str) -> f64 {
        match self.number(key) {
            Some(v) => self.check_f64(key, v, ok, range),
            None => {
                if !self.map.contains_key(key) {
                    self.resolved.insert(key.to_string(), Value::from(default));
                }
                default
            }
        }
    }

    fn integer(&mut self, key: &str) -> Option<u64> {
        match self.take(key)? {
            Value::Number(n) if n.as_u64().is_some() => n.as_u64(),
            other => {
                self.error(format!("{key}: expected a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn usize_req(&mut self, key: &str, ok: impl Fn(usize) -> bool, range: &str) -> usize {
        let present = self.map.contains_key(key);
        match self.integer(key) {
            Some(v) => {
                let v = v as usize;
                if !ok(v) {
                    self.error(format!("{key}: {key} out of {range} (got {v})"));
                }
                v
            }
            None => {
                if !present {
                    self.error(format!("{key}: missing required key"));
                }
                0
            }
        }
    }

    fn usize_or(&mut self, key: &str, default: usize, ok: impl Fn(usize) -> bool, range: &str) -> usize {
        if !self.map.contains_key(key) {
            self.used.insert(key.to_string());
            self.resolved.insert(key.to_string(), Value::from(default));
            return default;
        }
        self.usize_req(key, ok, range)
    }

    fn u32_req(&mut self, key: &str, ok: impl Fn(u32) -> bool, range: &str) -> u32 {
        let v = self.usize_req(key, |v| u32::try_from(v).is_ok_and(&ok), range);
        u32::try_from(v).unwrap_or(0)
    }

    fn u64_or(&mut self, key: &str, default: u64) -> u64 {
        match self.integer(key) {
            Some(v) => v,
            None => {
                if !self.map.contains_key(key) {
                    self.resolved.insert(key.to_string(), Value::from(default));
                }
                default
            }
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> bool {
        match self.take(key) {
            Some(Value::Bool(b)) => *b,
            Some(other) => {
                self.error(format!("{key}: expected true or false, got {other}"));
                default
            }
            None => {
                self.resolved.insert(key.to_string(), Value::from(default));
                default
            }
        }
    }

    fn opt_str(&mut self, key: &str) -> Option<String> {
        match self.take(key)? {
            Value::String(s) => Some(s.clone()),
            other => {
                self.error(format!("{key}: expected a string, got {other}"));
                None
            }
        }
    }

    fn str_or(&mut self, key: &str, default: &str) -> String {
        match self.opt_str(key) {
            Some(s) => s,
            None => {
                if !self.map.contains_key(key) {
                    self.resolved.insert(key.to_string(), Value::from(default));
                }
                default.to_string()
            }
        }
    }

    fn opt_enum<T: for<'de> Deserialize<'de>>(&mut self, key: &str, expected: &str) -> Option<T> {
        let s = self.opt_str(key)?;
        match serde_json::from_value(Value::String(s.clone())) {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(format!("{key}: unknown value \"{s}\" (expected one of {expected})"));
                None
            }
        }
    }

    fn vec_f64_or(&mut self, key: &str, default: Vec<f64>) -> Vec<f64> {
        match self.take(key) {
            Some(Value::Array(items)) => {
                let parsed: Option<Vec<f64>> = items.iter().map(Value::as_f64).collect();
                parsed.unwrap_or_else(|| {
                    self.error(format!("{key}: expected an array of numbers"));
                    default
                })
            }
            Some(other) => {
                self.error(format!("{key}: expected an array of numbers, got {other}"));
                default
            }
            None => {
                self.resolved.insert(key.to_string(), Value::from(default.clone()));
                default
            }
        }
    }

    fn finish(mut self) -> Result<BTreeMap<String, Value>> {
        let unknown: Vec<String> = self.map.keys().filter(|k| !self.used.contains(*k)).cloned().collect();
        for key in unknown {
            self.errors.push(format!("{key}: unknown key \"{key}\""));
        }
        if self.errors.is_empty() {
            Ok(self.resolved)
        } else {
            Err(FujitaError::Config(self.errors))
        }
    }
}
