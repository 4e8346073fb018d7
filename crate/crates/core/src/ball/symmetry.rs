//! Moving-planes diagnostic: sweeps hyperplanes `T_λ = {x₁ = λ}` from the
//! left pole toward the origin and records where `u(x^λ) ≥ u(x)` on
//! `Σ_λ = {x₁ < λ}` and `∂₁u > 0` on `T_λ` stop holding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};

/// Samples of `u` on the uniform lattice of `[-1, 1]^d`, `n` nodes per axis.
/// Values outside the closed unit ball are forced to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallGrid {
    pub d: usize,
    pub n: usize,
    pub values: Vec<f64>,
}

impl BallGrid {
    pub fn from_fn(d: usize, n: usize, u: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(FujitaError::domain(format!("ball grids support d = 1, 2; got {d}")));
        }
        if n < 5 {
            return Err(FujitaError::validation(format!("need at least 5 nodes per axis, got {n}")));
        }
        let h = 2.0 / (n - 1) as f64;
        let total = n.pow(d as u32);
        let values = (0..total)
            .into_par_iter()
            .map(|idx| {
                let x: Vec<f64> = (0..d).map(|k| -1.0 + h * ((idx / n.pow(k as u32)) % n) as f64).collect();
                if x.iter().map(|c| c * c).sum::<f64>() > 1.0 {
                    0.0
                } else {
                    u(&x)
                }
            })
            .collect::<Vec<_>>();
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(FujitaError::validation(format!("grid values must be finite and non-negative, found {v}")));
        }
        Ok(Self { d, n, values })
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i + self.n * j]
    }

    fn cell(&self, c: f64) -> (usize, f64) {
        let s = ((c + 1.0) / self.spacing()).clamp(0.0, (self.n - 1) as f64);
        let i = (s.floor() as usize).min(self.n - 2);
        (i, s - i as f64)
    }

    /// Linear (`d = 1`) or bilinear (`d = 2`) interpolation; 0 outside the square.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if x.iter().any(|c| c.abs() > 1.0) {
            return 0.0;
        }
        let (i, s) = self.cell(x[0]);
        if self.d == 1 {
            return (1.0 - s) * self.values[i] + s * self.values[i + 1];
        }
        let (j, t) = self.cell(x[1]);
        (1.0 - s) * (1.0 - t) * self.at(i, j) + s * (1.0 - t) * self.at(i + 1, j) + (1.0 - s) * t * self.at(i, j + 1) + s * t * self.at(i + 1, j + 1)
    }

    /// Whether every node of the interpolation stencil at `x` lies strictly
    /// inside the ball (so no zero-extension enters the value).
    fn stencil_inside(&self, x: &[f64]) -> bool {
        if x.iter().any(|c| c.abs() > 1.0) {
            return false;
        }
        let h = self.spacing();
        let (i, _) = self.cell(x[0]);
        let xs = [-1.0 + h * i as f64, -1.0 + h * (i + 1) as f64];
        if self.d == 1 {
            return xs.iter().all(|c| c.abs() < 1.0);
        }
        let (j, _) = self.cell(x[1]);
        let ys = [-1.0 + h * j as f64, -1.0 + h * (j + 1) as f64];
        xs.iter().all(|a| ys.iter().all(|b| a * a + b * b < 1.0))
    }

    /// Largest finite-difference gradient norm over cells inside the ball.
    pub fn max_gradient(&self) -> f64 {
        let h = self.spacing();
        let n = self.n;
        let node = |i: usize| -1.0 + h * i as f64;
        let mut best = 0.0f64;
        if self.d == 1 {
            for i in 0..n - 1 {
                if node(i).abs() < 1.0 && node(i + 1).abs() < 1.0 {
                    best = best.max(((self.values[i + 1] - self.values[i]) / h).abs());
                }
            }
            return best;
        }
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                let inside = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                    .iter()
                    .all(|&(a, b)| node(a).powi(2) + node(b).powi(2) < 1.0);
                if inside {
                    let gx = (self.at(i + 1, j) - self.at(i, j)) / h;
                    let gy = (self.at(i, j + 1) - self.at(i, j)) / h;
                    best = best.max(gx.hypot(gy));
                }
            }
        }
        best
    }
}

/// `x^λ = (2λ − x₁, x₂, …)`.
pub fn reflect(x: &[f64], lambda: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[0] = 2.0 * lambda - x[0];
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryOptions {
    /// Number of planes in the sweep; `λ_k = −1 + k/steps`, `k = 1..=steps`.
    pub lambda_steps: usize,
    /// Multiplier on the grid tolerance `h · max|∇u|`.
    pub tol_factor: f64,
    /// Cap on the number of violating points stored per plane.
    pub max_violations_per_lambda: usize,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        Self {
            lambda_steps: 100,
            tol_factor: 1.0,
            max_violations_per_lambda: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `u(x^λ) − u(x) < −tol` at a point of `Σ_λ`.
    Reflection,
    /// `∂₁u < −tol` at a point of `T_λ`.
    Derivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub lambda: f64,
    pub kind: ViolationKind,
    /// Point in the original (unrotated) coordinates.
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub min_w: f64,
    pub min_derivative: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub direction: Vec<f64>,
    /// Largest swept `λ` such that it and every plane before it pass.
    pub lambda_sup: f64,
    /// Resolution of `lambda_sup`: the spacing of the sweep.
    pub lambda_resolution: f64,
    pub tolerance: f64,
    pub sweep: Vec<SweepRow>,
    pub violations: Vec<Violation>,
}

pub fn symmetry_diagnostic(u: &BallGrid, direction: &[f64], options: SymmetryOptions) -> Result<SymmetryReport> {
    if direction.len() != u.d {
        return Err(FujitaError::validation(format!("direction has {} components, grid is {}-dimensional", direction.len(), u.d)));
    }
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(FujitaError::validation("direction must be a non-zero finite vector"));
    }
    if options.lambda_steps == 0 || !(options.tol_factor >= 0.0) {
        return Err(FujitaError::validation("lambda_steps must be positive and tol_factor non-negative"));
    }
    let e: Vec<f64> = direction.iter().map(|c| c / norm).collect();
    // Rotation taking the first axis to `e`: x = z₁ e + z₂ e^⊥.
    let to_x = |z: &[f64]| -> Vec<f64> {
        if u.d == 1 {
            vec![z[0] * e[0]]
        } else {
            vec![z[0] * e[0] - z[1] * e[1], z[0] * e[1] + z[1] * e[0]]
        }
    };
    let h = u.spacing();
    let tol = options.tol_factor * h * u.max_gradient();
    let samples: Vec<Vec<f64>> = if u.d == 1 {
        (0..u.n).map(|i| vec![-1.0 + h * i as f64]).collect()
    } else {
        (0..u.n * u.n)
            .map(|k| vec![-1.0 + h * (k % u.n) as f64, -1.0 + h * (k / u.n) as f64])
            .filter(|z| z[0] * z[0] + z[1] * z[1] < 1.0)
            .collect()
    };
    let transverse: Vec<f64> = if u.d == 1 { vec![0.0] } else { (0..u.n).map(|j| -1.0 + h * j as f64).collect() };

    let lambdas: Vec<f64> = (1..=options.lambda_steps).map(|k| -1.0 + k as f64 / options.lambda_steps as f64).collect();
    let rows: Vec<(SweepRow, Vec<Violation>)> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut min_w = f64::INFINITY;
            let mut min_der = f64::INFINITY;
            let mut violations = Vec::new();
            let push = |kind, point: Vec<f64>, value: f64, list: &mut Vec<Violation>| {
                if list.len() < options.max_violations_per_lambda {
                    list.push(Violation { lambda, kind, point, value });
                }
            };
            let mut failed = false;
            for z in samples.iter().filter(|z| z[0] < lambda) {
                let zr = reflect(z, lambda);
                let (x, xr) = (to_x(z), to_x(&zr));
                if !(u.stencil_inside(&x) && u.stencil_inside(&xr)) {
                    continue;
                }
                let w = u.eval(&xr) - u.eval(&x);
                min_w = min_w.min(w);
                if w < -tol {
                    failed = true;
                    push(ViolationKind::Reflection, x, w, &mut violations);
                }
            }
            if lambda < 0.0 {
                for &t in &transverse {
                    let z = if u.d == 1 { vec![lambda] } else { vec![lambda, t] };
                    let (zp, zm) = (reflect(&z, lambda + 0.5 * h), reflect(&z, lambda - 0.5 * h));
                    let (xp, xm) = (to_x(&zp), to_x(&zm));
                    if !(u.stencil_inside(&xp) && u.stencil_inside(&xm)) {
                        continue;
                    }
                    let der = (u.eval(&xp) - u.eval(&xm)) / (2.0 * h);
                    min_der = min_der.min(der);
                    if der < -tol {
                        failed = true;
                        push(ViolationKind::Derivative, to_x(&z), der, &mut violations);
                    }
                }
            }
            (
                SweepRow {
                    lambda,
                    min_w,
                    min_derivative: min_der,
                    passed: !failed,
                },
                violations,
            )
        })
        .collect();

    let mut lambda_sup = -1.0;
    for (row, _) in &rows {
        if !row.passed {
            break;
        }
        lambda_sup = row.lambda;
    }
    let (sweep, violations): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(SymmetryReport {
        direction: e,
        lambda_sup,
        lambda_resolution: 1.0 / options.lambda_steps as f64,
        tolerance: tol,
        sweep,
        violations: violations.into_iter().flatten().collect(),
    })
}
