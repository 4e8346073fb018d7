//! Executes a parsed [`ExperimentConfig`] and writes its artifacts.
//!
//! Every run produces `report.json`; plot data goes to CSV files next to it.
//! The report is a deterministic function of the config (no timestamps).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball::{
    boundary_exponent, exit_time_check, solve_ball_steady, symmetry_diagnostic, BallGrid, BallKernelParams, BallMesh, BallSolution, SolveControls,
};
use crate::config::{BallAction, BallSettings, CommandSettings, Datum, ExperimentConfig, SymmetryInput};
use crate::error::{FujitaError, Result};
use crate::evolution::{dichotomy_experiment, run, semigroup_apply, OutcomeTag, ProblemSpec};
use crate::feynman_kac::{fk_compare, fk_estimate_with, FkParams, SolutionTrace};
use crate::grid::GridField;
use crate::nonlinearity::{p_crit, regime};
use crate::steady::{riesz_residual, SteadyStateParams};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_OUTPUT_DIR: &str = "fujita-out";

/// Most rows written to a profile CSV; longer profiles are subsampled evenly.
const MAX_PROFILE_ROWS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub value: Value,
    pub expected: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, value: impl Into<Value>, expected: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            value: value.into(),
            expected: expected.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    /// All assertions passed and no error occurred.
    pub passed: bool,
    /// The experiment stopped with an error; `results` and artifacts are incomplete.
    pub partial: bool,
    pub error: Option<String>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Default)]
struct Outputs {
    results: Value,
    assertions: Vec<Assertion>,
    csv: Vec<(String, String)>,
}

/// Runs the experiment and writes `report.json` plus CSV artifacts to the
/// configured output directory. Returns the report; `report.passed` decides
/// the process exit status.
pub fn execute(config: &ExperimentConfig) -> Result<Report> {
    let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    fs::create_dir_all(&dir)?;
    let report = compute(config, |name, body| write_artifact(&dir, name, body))?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| FujitaError::Io(e.to_string()))?;
    fs::write(dir.join("report.json"), text + "\n")?;
    Ok(report)
}

/// Runs the experiment without touching the file system.
pub fn execute_in_memory(config: &ExperimentConfig) -> Result<(Report, Vec<(String, String)>)> {
    let mut files = Vec::new();
    let report = compute(config, |name, body| {
        files.push((name.to_string(), body.to_string()));
        Ok(())
    })?;
    Ok((report, files))
}

fn write_artifact(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn compute(config: &ExperimentConfig, mut sink: impl FnMut(&str, &str) -> Result<()>) -> Result<Report> {
    let outcome = match &config.settings {
        CommandSettings::VerifySteady(s) => verify_steady(s),
        CommandSettings::Evolve(s) => evolve(s),
        CommandSettings::Dichotomy(s) => dichotomy(s),
        CommandSettings::FkCheck(s) => fk_check(s, config.seed),
        CommandSettings::Ball(s) => ball(s, config.seed),
        CommandSettings::Regime(s) => regime_report(s),
    };
    let mut report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        command: config.command.name().to_string(),
        seed: config.seed,
        config: Value::Object(config.resolved.clone().into_iter().collect()),
        results: Value::Null,
        assertions: Vec::new(),
        passed: false,
        partial: false,
        error: None,
        artifacts: Vec::new(),
    };
    match outcome {
        Ok(out) => {
            for (name, body) in &out.csv {
                sink(name, body)?;
                report.artifacts.push(name.clone());
            }
            report.passed = out.assertions.iter().all(|a| a.passed);
            report.results = out.results;
            report.assertions = out.assertions;
        }
        Err(e) => {
            report.partial = true;
            report.error = Some(e.to_string());
        }
    }
    Ok(report)
}

fn datum_field(problem: &ProblemSpec, datum: &Datum) -> Result<GridField> {
    match *datum {
        Datum::Steady { amplitude } => {
            let base = SteadyStateParams::centered(1.0, problem.d as u32, problem.alpha)?;
            GridField::from_fn(problem.d, problem.l, problem.n, |x| amplitude * base.radial(norm(x)))
        }
        Datum::Gaussian { amplitude, width } => {
            GridField::from_fn(problem.d, problem.l, problem.n, |x| amplitude * (-(norm(x) / width).powi(2)).exp())
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn trace_csv(trace: &[(f64, f64)]) -> String {
    csv("t,sup_norm", trace.iter().map(|(t, s)| vec![*t, *s]))
}

/// `(r, u)` along the first axis through the grid center.
fn profile_csv(field: &GridField) -> String {
    let center = field.center_index();
    let stride = field.n.pow(field.d as u32 - 1);
    let mid = center % stride;
    let step = field.n.div_ceil(MAX_PROFILE_ROWS).max(1);
    csv(
        "r,u",
        (0..field.n).step_by(step).map(|j| vec![field.node(j), field.values[j * stride + mid]]),
    )
}

fn tag_name(tag: OutcomeTag) -> Value {
    serde_json::to_value(tag).expect("enum serializes")
}

fn verify_steady(s: &crate::config::SteadySettings) -> Result<Outputs> {
    let params = SteadyStateParams::centered(s.amplitude, s.d, s.alpha)?;
    let p = params.exponent();
    let scale = 1.0 / params.a_scale();
    let rep = riesz_residual(&|r| params.radial(r), s.d, s.alpha, p, &s.radii, scale)?;
    let k = s.perturbation;
    let perturbed = riesz_residual(&|r| k * params.radial(r), s.d, s.alpha, p, &[0.0], scale)?;
    let r0 = perturbed.residuals[0].abs();
    Ok(Outputs {
        results: json!({
            "p": p,
            "a_scale": params.a_scale(),
            "max_normalized_residual": rep.max_normalized,
            "radii": rep.radii,
            "residuals": rep.residuals,
            "perturbed_residual_at_0": r0,
        }),
        assertions: vec![
            Assertion::new("max_normalized_residual", rep.max_normalized <= s.tolerance, rep.max_normalized, format!("<= {:e}", s.tolerance)),
            Assertion::new(
                "perturbed_residual_at_0",
                r0 >= s.min_perturbed_residual,
                r0,
                format!(">= {:e}", s.min_perturbed_residual),
            ),
        ],
        csv: vec![(
            "profile.csv".into(),
            csv("r,u", rep.radii.iter().map(|r| vec![*r, params.radial(*r)])),
        )],
    })
}

fn evolve(s: &crate::config::EvolveSettings) -> Result<Outputs> {
    let phi = datum_field(&s.problem, &s.datum)?;
    let out = run(&s.problem, &phi, &s.controls)?;
    let mut assertions = vec![Assertion::new("non_negative", out.min_value >= 0.0, out.min_value, ">= 0")];
    if let Some(expect) = s.expect {
        assertions.push(Assertion::new("outcome", out.tag == expect, tag_name(out.tag), format!("{expect:?}")));
    }
    let mut csv_files = vec![("trace.csv".to_string(), trace_csv(&out.supnorm_trace))];
    if let Some(last) = &out.final_field {
        csv_files.push(("profile.csv".into(), profile_csv(last)));
    }
    Ok(Outputs {
        results: json!({
            "initial_sup": phi.sup_norm(),
            "outcome": outcome_json(&out),
        }),
        assertions,
        csv: csv_files,
    })
}

fn outcome_json(out: &crate::evolution::SimOutcome) -> Value {
    json!({
        "tag": tag_name(out.tag),
        "t_blow_estimate": out.t_blow_estimate,
        "decay_rate_estimate": out.decay_rate_estimate,
        "final_sup": out.final_sup(),
        "t_final": out.t_final,
        "steps": out.steps,
        "min_value": out.min_value,
    })
}

fn dichotomy(s: &crate::config::DichotomySettings) -> Result<Outputs> {
    let base = datum_field(&s.problem, &s.datum)?;
    let res = dichotomy_experiment(&s.problem, &base, s.eps, &s.controls)?;
    let ordering_tol = 1e-10 * base.sup_norm();
    Ok(Outputs {
        results: json!({
            "eps": s.eps,
            "lower": outcome_json(&res.lower),
            "upper": outcome_json(&res.upper),
            "ordering_violation": res.ordering_violation,
        }),
        assertions: vec![
            Assertion::new("lower", res.lower.tag == OutcomeTag::Extinct, tag_name(res.lower.tag), "Extinct"),
            Assertion::new("upper", res.upper.tag == OutcomeTag::BlewUp, tag_name(res.upper.tag), "BlewUp"),
            Assertion::new(
                "ordering",
                res.ordering_violation <= ordering_tol,
                res.ordering_violation,
                format!("<= {ordering_tol:e}"),
            ),
        ],
        csv: vec![
            ("trace_lower.csv".into(), trace_csv(&res.lower.supnorm_trace)),
            ("trace_upper.csv".into(), trace_csv(&res.upper.supnorm_trace)),
        ],
    })
}

fn fk_check(s: &crate::config::FkSettings, seed: u64) -> Result<Outputs> {
    let phi = datum_field(&s.problem, &s.datum)?;
    let trace = SolutionTrace::record(&s.problem, &phi, s.t, s.record_dt)?;
    let cmp = fk_compare(&trace, s.t, &s.x, s.n_paths, s.n_steps, seed)?;
    let mut results = json!({
        "t": s.t,
        "x": s.x,
        "estimate": cmp.estimate,
        "stderr": cmp.stderr,
        "step_bias": cmp.step_bias,
        "grid_value": cmp.grid_value,
        "z_score": cmp.z_score,
    });
    let mut assertions = vec![Assertion::new("z_score", cmp.z_score.abs() <= s.z_max, cmp.z_score, format!("|z| <= {}", s.z_max))];
    if s.control {
        let est = fk_estimate_with(
            &trace,
            s.t,
            &s.x,
            FkParams {
                n_paths: s.n_paths,
                n_steps: s.n_steps,
                seed: seed.wrapping_add(1),
                potential_scale: 0.0,
            },
        )?;
        let reference = semigroup_apply(&phi, s.problem.alpha, s.t)?.interpolate(&s.x);
        let z = (est.estimate - reference) / est.stderr;
        results["control"] = json!({"estimate": est.estimate, "stderr": est.stderr, "semigroup": reference, "z_score": z});
        assertions.push(Assertion::new("control_z_score", z.abs() <= s.z_max, z, format!("|z| <= {}", s.z_max)));
    }
    let sup: Vec<(f64, f64)> = trace.times.iter().zip(&trace.fields).map(|(t, f)| (*t, f.sup_norm())).collect();
    Ok(Outputs {
        results,
        assertions,
        csv: vec![("trace.csv".into(), trace_csv(&sup)), ("profile.csv".into(), profile_csv(&trace.fields[trace.fields.len() - 1]))],
    })
}

fn regime_report(s: &crate::config::RegimeSettings) -> Result<Outputs> {
    let r = regime(s.d, s.alpha, &s.nonlinearity)?;
    let d = f64::from(s.d);
    Ok(Outputs {
        results: json!({
            "regime": r,
            "fujita_exponent": 1.0 + s.alpha / d,
            "p": 1.0 + s.nonlinearity.beta,
            "alpha_over_beta": s.alpha / s.nonlinearity.beta,
            "steady_exponent": p_crit(s.d, s.alpha).ok(),
        }),
        assertions: Vec::new(),
        csv: Vec::new(),
    })
}

fn solve(s: &BallSettings) -> Result<BallSolution> {
    let mesh = BallMesh::graded(s.d, s.intervals)?;
    solve_ball_steady(
        s.forcing,
        s.alpha,
        &mesh,
        SolveControls {
            tol: s.solve_tol,
            ..SolveControls::default()
        },
    )
}

fn solution_csv(sol: &BallSolution) -> String {
    csv("r,u", sol.radial_grid.iter().zip(&sol.values).map(|(r, u)| vec![*r, *u]))
}

fn ball(s: &BallSettings, seed: u64) -> Result<Outputs> {
    match s.action {
        BallAction::Solve => {
            let sol = solve(s)?;
            let min = sol.min_interior(1.0 - 1e-12);
            Ok(Outputs {
                results: json!({
                    "symmetry_defect": sol.symmetry_defect,
                    "boundary_exponent": sol.boundary_exponent,
                    "iterations": sol.iterations,
                    "contraction_factor": sol.contraction_factor,
                    "monotone_iteration": sol.monotone_iteration,
                    "min_interior": min,
                }),
                assertions: vec![
                    Assertion::new("symmetry_defect", sol.symmetry_defect <= s.symmetry_tol, sol.symmetry_defect, format!("<= {:e}", s.symmetry_tol)),
                    Assertion::new("positive_interior", min > 0.0, min, "> 0"),
                    Assertion::new("monotone_iteration", sol.monotone_iteration, sol.monotone_iteration, "true"),
                ],
                csv: vec![("profile.csv".into(), solution_csv(&sol))],
            })
        }
        BallAction::Boundary => {
            let sol = solve(s)?;
            let fit = boundary_exponent(&sol)?;
            let target = 0.5 * s.alpha;
            Ok(Outputs {
                results: json!({
                    "slope": fit.slope,
                    "target": target,
                    "slope_diverges": fit.slope_diverges,
                    "eps": fit.eps,
                    "values": fit.values,
                    "one_sided_slopes": fit.one_sided_slopes,
                }),
                assertions: vec![
                    Assertion::new(
                        "boundary_exponent",
                        (fit.slope - target).abs() <= s.exponent_tol,
                        fit.slope,
                        format!("{target} ± {}", s.exponent_tol),
                    ),
                    Assertion::new("one_sided_slope_diverges", fit.slope_diverges, fit.slope_diverges, "true"),
                ],
                csv: vec![(
                    "profile.csv".into(),
                    csv("r,u", fit.eps.iter().zip(&fit.values).rev().map(|(e, u)| vec![1.0 - e, *u])),
                )],
            })
        }
        BallAction::Symmetry => {
            let d = s.d as usize;
            let grid = match s.input {
                SymmetryInput::RadialProfile => {
                    let p = SteadyStateParams::centered(1.0, s.d, s.alpha)?;
                    BallGrid::from_fn(d, s.grid_n, |x| p.radial(norm(x)))?
                }
                SymmetryInput::ShiftedBump => BallGrid::from_fn(d, s.grid_n, |x| {
                    let mut q = (x[0] - 0.3).powi(2);
                    if d == 2 {
                        q += x[1] * x[1];
                    }
                    (1.0 - 4.0 * q).max(0.0)
                })?,
                SymmetryInput::Solution => {
                    let sol = solve(s)?;
                    let values = std::sync::Mutex::new(Vec::new());
                    let g = BallGrid::from_fn(d, s.grid_n, |x| {
                        let coord = if d == 1 { x[0] } else { norm(x) };
                        match sol.eval(coord.min(1.0)) {
                            Ok(v) => v.max(0.0),
                            Err(e) => {
                                values.lock().expect("not poisoned").push(e);
                                0.0
                            }
                        }
                    })?;
                    if let Some(e) = values.into_inner().expect("not poisoned").pop() {
                        return Err(e);
                    }
                    g
                }
            };
            let rep = symmetry_diagnostic(&grid, &s.direction, s.symmetry)?;
            let assertion = match s.input {
                SymmetryInput::ShiftedBump => Assertion::new(
                    "asymmetry_flagged",
                    rep.lambda_sup < 0.0 && !rep.violations.is_empty(),
                    rep.lambda_sup,
                    "lambda_sup < 0 with violations",
                ),
                _ => Assertion::new(
                    "lambda_sup",
                    rep.lambda_sup.abs() <= rep.lambda_resolution,
                    rep.lambda_sup,
                    format!("0 ± {}", rep.lambda_resolution),
                ),
            };
            Ok(Outputs {
                results: json!({
                    "input": s.input,
                    "direction": rep.direction,
                    "lambda_sup": rep.lambda_sup,
                    "lambda_resolution": rep.lambda_resolution,
                    "tolerance": rep.tolerance,
                    "violation_count": rep.violations.len(),
                    "violations": rep.violations,
                }),
                assertions: vec![assertion],
                csv: vec![(
                    "symmetry.csv".into(),
                    csv("lambda,min_w", rep.sweep.iter().map(|row| vec![row.lambda, row.min_w])),
                )],
            })
        }
        BallAction::Kernels => {
            let params = BallKernelParams::unit(s.alpha, s.d)?;
            let dists = [0.0, 0.2, 0.4, 0.6, 0.8];
            let masses = dists.iter().map(|&r| params.poisson_mass(r)).collect::<Result<Vec<f64>>>()?;
            let worst = masses.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
            let check = exit_time_check(&params, s.dist, s.n_paths, seed)?;
            Ok(Outputs {
                results: json!({
                    "c_poisson": params.c_poisson,
                    "c_green": params.c_green,
                    "poisson_mass": dists.iter().zip(&masses).map(|(r, m)| json!({"dist": r, "mass": m})).collect::<Vec<_>>(),
                    "exit_time": check,
                }),
                assertions: vec![
                    Assertion::new("poisson_normalization", worst <= s.normalization_tol, worst, format!("<= {:e}", s.normalization_tol)),
                    Assertion::new("exit_time_z_score", check.z_score.abs() <= s.z_max, check.z_score, format!("|z| <= {}", s.z_max)),
                ],
                csv: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn regime_report_is_deterministic_and_embeds_config() {
        let cfg = parse_config(r#"{"command": "regime", "d": 1, "alpha": 0.5, "beta": 0.25, "seed": 3}"#).unwrap();
        let (a, _) = execute_in_memory(&cfg).unwrap();
        let (b, _) = execute_in_memory(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.passed);
        assert_eq!(a.results["regime"], json!("blow_up_for_all"));
        assert_eq!(a.config["c"], json!(1.0));
        assert_eq!(a.seed, 3);
    }

    #[test]
    fn module_errors_give_partial_reports() {
        // alpha = 2 is a valid config value but has no steady family in d = 2.
        let cfg = parse_config(r#"{"command": "ball", "action": "symmetry", "input": "radial_profile", "d": 2, "alpha": 2}"#).unwrap();
        let (rep, files) = execute_in_memory(&cfg).unwrap();
        assert!(rep.partial && !rep.passed);
        assert!(rep.error.unwrap().contains("d > alpha"));
        assert!(files.is_empty());
    }

    #[test]
    fn profile_csv_follows_the_first_axis() {
        let f = GridField::from_fn(2, 4.0, 8, |x| x[0] + 10.0 * x[1]).unwrap();
        let text = profile_csv(&f);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "r,u");
        assert_eq!(rows.len(), 9);
        for row in &rows[1..] {
            let v: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert!((v[1] - v[0]).abs() < 1e-12, "{row}");
        }
    }
}
