//! Monte Carlo Feynman–Kac estimates of the evolution solution, used as an
//! independent check on the grid solver.
//!
//! Forward form: `u(t,x) = E_x[φ(X_t) exp ∫₀^t V(t-s, X_s) ds]` with
//! `V = G(u)/u` read from a recorded solution trace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::evolution::{ProblemSpec, Propagator};
use crate::grid::GridField;
use crate::stable::{sample_increment_into, stream_rng};

/// Solution snapshots on an increasing time grid, interpolated multilinearly
/// in space and linearly in time.
#[derive(Debug, Clone)]
pub struct SolutionTrace {
    pub spec: ProblemSpec,
    pub times: Vec<f64>,
    pub fields: Vec<GridField>,
}

impl SolutionTrace {
    pub fn new(spec: ProblemSpec, times: Vec<f64>, fields: Vec<GridField>) -> Result<Self> {
        spec.validate()?;
        if times.is_empty() || times.len() != fields.len() {
            return Err(FujitaError::validation(format!(
                "need matching non-empty times/fields, got {} and {}",
                times.len(),
                fields.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FujitaError::validation("trace times must be strictly increasing"));
        }
        if fields.iter().any(|f| f.d != spec.d || f.n != spec.n || f.l != spec.l) {
            return Err(FujitaError::validation("trace snapshot grid does not match the problem grid"));
        }
        Ok(Self { spec, times, fields })
    }

    /// Integrates from `phi` with a fixed step and stores every step.
    pub fn record(spec: &ProblemSpec, phi: &GridField, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && t_end > 0.0) {
            return Err(FujitaError::domain("record needs positive dt and t_end"));
        }
        let steps = (t_end / dt).round().max(1.0) as usize;
        let h = t_end / steps as f64;
        let mut prop = Propagator::new(spec)?;
        let mut times = Vec::with_capacity(steps + 1);
        let mut fields = Vec::with_capacity(steps + 1);
        let mut u = phi.values.clone();
        times.push(0.0);
        fields.push(phi.clone());
        for k in 1..=steps {
            prop.step(&mut u, h);
            times.push(k as f64 * h);
            fields.push(GridField { values: u.clone(), ..phi.clone() });
        }
        Self::new(spec.clone(), times, fields)
    }

    pub fn initial(&self) -> &GridField {
        &self.fields[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// `u(t, x)` with periodic wrapping of `x`.
    pub fn value(&self, t: f64, x: &[f64]) -> f64 {
        let k = self.times.partition_point(|s| *s <= t);
        if k == 0 {
            return self.fields[0].interpolate(x);
        }
        if k >= self.times.len() {
            return self.fields[self.times.len() - 1].interpolate(x);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        let a = self.fields[k - 1].interpolate(x);
        if w == 0.0 {
            return a;
        }
        (1.0 - w) * a + w * self.fields[k].interpolate(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkParams {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Multiplies the potential `V`; 1 is the true equation, 0 gives `P_t φ`.
    pub potential_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkEstimate {
    pub estimate: f64,
    pub stderr: f64,
    /// Same paths, midpoint rule with `n_steps / 2` steps (even `n_steps` only).
    pub coarse_estimate: Option<f64>,
    pub n_paths: usize,
    pub n_steps: usize,
}

pub fn fk_estimate(trace: &SolutionTrace, t: f64, x: &[f64], n_paths: usize, n_steps: usize, seed: u64) -> Result<FkEstimate> {
    fk_estimate_with(
        trace,
        t,
        x,
        FkParams {
            n_paths,
            n_steps,
            seed,
            potential_scale: 1.0,
        },
    )
}

pub fn fk_estimate_with(trace: &SolutionTrace, t: f64, x: &[f64], params: FkParams) -> Result<FkEstimate> {
    if !(t >= 0.0 && t <= trace.t_end() * (1.0 + 1e-12)) {
        return Err(FujitaError::Range(format!("t = {t} outside the trace range [0, {}]", trace.t_end())));
    }
    if x.len() != trace.spec.d {
        return Err(FujitaError::domain(format!("query point has {} coordinates, expected {}", x.len(), trace.spec.d)));
    }
    if params.n_paths < 2 || params.n_steps == 0 {
        return Err(FujitaError::validation("need at least 2 paths and 1 step"));
    }
    if !(params.potential_scale >= 0.0) {
        return Err(FujitaError::validation("potential_scale must be non-negative"));
    }
    let spec = &trace.spec;
    let alpha = spec.alpha;
    let d = spec.d;
    let h = t / params.n_steps as f64;
    let g = &spec.nonlinearity;

    // Paths are sampled on a half-step lattice: odd nodes are the fine
    // midpoints, nodes 2 (mod 4) the midpoints of the doubled-step rule.
    let coarse = params.n_steps.is_multiple_of(2);
    let weights: Vec<std::result::Result<(f64, f64), String>> = (0..params.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(params.seed, path as u64);
            let mut pos = x.to_vec();
            let mut inc = vec![0.0; d];
            let mut fine_exp = 0.0;
            let mut coarse_exp = 0.0;
            if t > 0.0 {
                for node in 1..=2 * params.n_steps {
                    sample_increment_into(alpha, 0.5 * h, &mut inc, &mut rng);
                    for (p, i) in pos.iter_mut().zip(&inc) {
                        *p += i;
                    }
                    let fine_mid = node % 2 == 1;
                    let coarse_mid = coarse && node % 4 == 2;
                    if !(fine_mid || coarse_mid) {
                        continue;
                    }
                    let s = node as f64 * 0.5 * h;
                    let u = trace.value(t - s, &pos);
                    if !(u > 0.0) {
                        return Err(format!("u = {u} at s = {s}, x = {pos:?}"));
                    }
                    let v = g.ratio_unchecked(u);
                    if fine_mid {
                        fine_exp += h * v;
                    } else {
                        coarse_exp += 2.0 * h * v;
                    }
                }
            }
            let end = trace.initial().interpolate(&pos);
            let k = params.potential_scale;
            Ok((end * (k * fine_exp).exp(), end * (k * coarse_exp).exp()))
        })
        .collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_coarse = 0.0;
    for w in weights {
        let (w, wc) = w.map_err(|e| FujitaError::validation(format!("non-positive solution value on a path: {e}")))?;
        sum += w;
        sum_sq += w * w;
        sum_coarse += wc;
    }
    let n = params.n_paths as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(FkEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
        coarse_estimate: (coarse && t > 0.0).then_some(sum_coarse / n),
        n_paths: params.n_paths,
        n_steps: params.n_steps,
    })
}

/// Outcome of comparing the estimator with the grid value at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkComparison {
    pub estimate: f64,
    pub stderr: f64,
    /// `|estimate(n_steps) - estimate(n_steps/2)|` on the same paths.
    pub step_bias: f64,
    pub grid_value: f64,
    pub z_score: f64,
}

/// The step-halving difference bounds the time-quadrature bias and enters
/// the z-score denominator next to the standard error.
pub fn fk_compare(trace: &SolutionTrace, t: f64, x: &[f64], n_paths: usize, n_steps: usize, seed: u64) -> Result<FkComparison> {
    if !n_steps.is_multiple_of(2) {
        return Err(FujitaError::validation(format!("n_steps must be even for the bias check, got {n_steps}")));
    }
    let fine = fk_estimate(trace, t, x, n_paths, n_steps, seed)?;
    let bias = fine.coarse_estimate.map_or(0.0, |c| (fine.estimate - c).abs());
    let grid_value = trace.value(t, x);
    let z = (fine.estimate - grid_value) / (fine.stderr * fine.stderr + bias * bias).sqrt();
    Ok(FkComparison {
        estimate: fine.estimate,
        stderr: fine.stderr,
        step_bias: bias,
        grid_value,
        z_score: z,
    })
}
