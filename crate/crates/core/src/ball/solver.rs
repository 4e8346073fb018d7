//! Steady states of the ball problem via the fixed point
//! `u(x) = ∫_B G(x,y) F(u(y)) dy`, discretized by Nyström product
//! integration against piecewise-linear hat functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernels::{BallKernelParams, GreenInner};
use crate::error::{FujitaError, Result};
use crate::evolution::linear_fit;
use crate::quadrature::{gauss_legendre, tanh_sinh};

/// Non-decreasing forcing term `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BallForcing {
    /// `F(u) = a + b u`.
    Affine { a: f64, b: f64 },
    /// `F(u) = a + b tanh(u)`.
    Tanh { a: f64, b: f64 },
}

impl BallForcing {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = match *self {
            BallForcing::Affine { a, b } | BallForcing::Tanh { a, b } => (a, b),
        };
        if !(a.is_finite() && b.is_finite()) {
            return Err(FujitaError::validation("forcing coefficients must be finite"));
        }
        if !(b > 0.0) {
            return Err(FujitaError::validation(format!(
                "forcing must be non-decreasing and not constant (b > 0), got b = {b}"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            BallForcing::Affine { a, b } => a + b * u,
            BallForcing::Tanh { a, b } => a + b * u.tanh(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            BallForcing::Affine { b, .. } | BallForcing::Tanh { b, .. } => b,
        }
    }
}

/// Nodes of the discretization: coordinates in `[-1, 1]` for `d = 1`,
/// radii in `[0, 1]` for `d = 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMesh {
    pub d: u32,
    pub nodes: Vec<f64>,
}

impl BallMesh {
    pub fn new(d: u32, nodes: Vec<f64>) -> Result<Self> {
        let (lo, hi) = match d {
            1 => (-1.0, 1.0),
            2 => (0.0, 1.0),
            _ => return Err(FujitaError::domain(format!("the ball solver supports d = 1, 2; got {d}"))),
        };
        if nodes.len() < 3 || nodes.first() != Some(&lo) || nodes.last() != Some(&hi) {
            return Err(FujitaError::validation(format!("mesh must start at {lo}, end at {hi} and have at least 3 nodes")));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FujitaError::validation("mesh nodes must be strictly increasing"));
        }
        Ok(Self { d, nodes })
    }

    /// Cosine-graded nodes, clustered at the sphere where `u ~ dist^{α/2}`.
    pub fn graded(d: u32, intervals: usize) -> Result<Self> {
        let m = intervals.max(2) as f64;
        let nodes = match d {
            1 => (0..=intervals)
                .map(|j| {
                    let x = -(PI * j as f64 / m).cos();
                    // Exact endpoints and exact mirror symmetry.
                    if j == 0 {
                        -1.0
                    } else if j == intervals {
                        1.0
                    } else if 2 * j == intervals {
                        0.0
                    } else {
                        x
                    }
                })
                .collect::<Vec<_>>(),
            2 => (0..=intervals)
                .map(|j| if j == intervals { 1.0 } else { (0.5 * PI * j as f64 / m).sin() })
                .collect(),
            _ => return Err(FujitaError::domain(format!("the ball solver supports d = 1, 2; got {d}"))),
        };
        let mut mesh = Self::new(d, nodes)?;
        if d == 1 {
            let n = mesh.nodes.len();
            for j in 0..n / 2 {
                mesh.nodes[j] = -mesh.nodes[n - 1 - j];
            }
        }
        Ok(mesh)
    }

    fn is_boundary(&self, x: f64) -> bool {
        x.abs() >= 1.0
    }
}

/// Kernel of the one-dimensional reduction: `G(x,y)` for `d = 1`,
/// `ρ ∫_0^{2π} G(r e₁, ρ e_θ) dθ` for `d = 2`.
struct ReducedKernel<'a> {
    params: &'a BallKernelParams,
    inner: GreenInner,
}

impl<'a> ReducedKernel<'a> {
    fn new(params: &'a BallKernelParams) -> Result<Self> {
        Ok(Self {
            params,
            inner: GreenInner::new(params.alpha, params.d)?,
        })
    }

    /// Kernel at evaluation point `x` and integration point `y = x + offset`
    /// (offset passed separately so the separation is exact).
    fn eval(&self, x: f64, y: f64, sep: f64) -> f64 {
        let gx = (1.0 - x) * (1.0 + x);
        let gy = (1.0 - y) * (1.0 + y);
        if gx <= 0.0 || gy <= 0.0 || sep <= 1e-150 {
            return 0.0;
        }
        match self.params.d {
            1 => self.params.green_unchecked(&self.inner, sep, gx, gy),
            _ => {
                let (r, rho) = (x, y);
                if r == 0.0 {
                    return rho * 2.0 * PI * self.params.green_unchecked(&self.inner, rho, gx, gy);
                }
                let q = tanh_sinh(
                    |_, theta, _| {
                        let s = (0.5 * theta).sin();
                        let dist = (sep * sep + 4.0 * r * rho * s * s).sqrt();
                        if dist <= 1e-150 {
                            return 0.0;
                        }
                        self.params.green_unchecked(&self.inner, dist, gx, gy)
                    },
                    0.0,
                    PI,
                    1e-10,
                );
                rho * 2.0 * q.map(|q| q.value).unwrap_or(f64::NAN)
            }
        }
    }
}

/// Product-integration weights `W_j(x) = ∫ k(x,y) φ_j(y) dy`.
fn nystrom_weights(kernel: &ReducedKernel, mesh: &BallMesh, x: f64, gl: &(Vec<f64>, Vec<f64>)) -> Vec<f64> {
    let nodes = &mesh.nodes;
    let mut w = vec![0.0; nodes.len()];
    if mesh.is_boundary(x) {
        return w;
    }
    let (gx, gw) = gl;
    let singular = |e: f64| e == x || e.abs() >= 1.0;
    for k in 0..nodes.len() - 1 {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let h = b - a;
        let mut pieces = vec![a];
        if x > a && x < b {
            pieces.push(x);
        }
        pieces.push(b);
        for seg in pieces.windows(2) {
            let (p, q) = (seg[0], seg[1]);
            let mid = 0.5 * (p + q);
            // Each half is graded (y = e + (m - e) s²) toward its endpoint e
            // when e carries a singularity.
            for &(e, m) in &[(p, mid), (q, mid)] {
                let graded = singular(e);
                let len = m - e;
                for (t, wt) in gx.iter().zip(gw) {
                    let s = 0.5 * (t + 1.0);
                    let (offset, jac) = if graded { (len * s * s, 2.0 * len * s) } else { (len * s, len) };
                    let y = e + offset;
                    let sep = if e == x { offset.abs() } else { (y - x).abs() };
                    let f = kernel.eval(x, y, sep) * jac.abs() * 0.5 * wt;
                    let right = (y - a) / h;
                    w[k] += f * (1.0 - right);
                    w[k + 1] += f * right;
                }
            }
        }
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveControls {
    pub tol: f64,
    pub max_iter: usize,
    pub gauss_points: usize,
}

impl Default for SolveControls {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            gauss_points: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallSolution {
    pub alpha: f64,
    pub d: u32,
    pub radial_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub forcing: BallForcing,
    pub symmetry_defect: f64,
    pub boundary_exponent: Option<f64>,
    pub iterations: usize,
    /// `Lip(F) · max_x ∫ G(x,y) dy` as measured on the mesh.
    pub contraction_factor: f64,
    pub monotone_iteration: bool,
    #[serde(skip)]
    params: Option<BallKernelParams>,
    #[serde(skip)]
    gauss_points: usize,
}

impl BallSolution {
    fn params(&self) -> Result<BallKernelParams> {
        match &self.params {
            Some(p) => Ok(p.clone()),
            None => BallKernelParams::unit(self.alpha, self.d),
        }
    }

    /// Nyström interpolant `u(x) = Σ_j W_j(x) F(u_j)` at an arbitrary point
    /// (coordinate for `d = 1`, radius for `d = 2`).
    pub fn eval(&self, x: f64) -> Result<f64> {
        let lo = if self.d == 1 { -1.0 } else { 0.0 };
        if !(x >= lo && x <= 1.0) {
            return Err(FujitaError::domain(format!("evaluation point {x} outside [{lo}, 1]")));
        }
        let params = self.params()?;
        let kernel = ReducedKernel::new(&params)?;
        let mesh = BallMesh {
            d: self.d,
            nodes: self.radial_grid.clone(),
        };
        let gl = gauss_legendre(self.gauss_points.max(4));
        let w = nystrom_weights(&kernel, &mesh, x, &gl);
        Ok(w.iter().zip(&self.values).map(|(wj, uj)| wj * self.forcing.eval(*uj)).sum())
    }

    pub fn min_interior(&self, max_radius: f64) -> f64 {
        self.radial_grid
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() <= max_radius)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn solve_ball_steady(forcing: BallForcing, alpha: f64, mesh: &BallMesh, controls: SolveControls) -> Result<BallSolution> {
    forcing.validate()?;
    let params = BallKernelParams::unit(alpha, mesh.d)?;
    let kernel = ReducedKernel::new(&params)?;
    let gl = gauss_legendre(controls.gauss_points.max(4));
    let n = mesh.nodes.len();
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        mesh.nodes.par_iter().map(|&x| nystrom_weights(&kernel, mesh, x, &gl)).collect()
    };
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(FujitaError::numerical("non-finite Nyström weight", format!("alpha={alpha}, d={}", mesh.d)));
    }
    let sup_mass = rows.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let contraction = forcing.lipschitz() * sup_mass;
    if contraction >= 1.0 {
        return Err(FujitaError::validation(format!(
            "contraction condition violated: Lip(F) * sup_x ∫G(x,y)dy = {contraction:.6} >= 1"
        )));
    }

    let mut u = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut monotone = true;
    let mut iterations = 0;
    loop {
        for (fj, uj) in f.iter_mut().zip(&u) {
            *fj = forcing.eval(*uj);
        }
        let next: Vec<f64> = rows.iter().map(|r| r.iter().zip(&f).map(|(a, b)| a * b).sum()).collect();
        let change = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if next.iter().zip(&u).any(|(a, b)| *a < *b - 1e-13 * b.abs().max(1.0)) {
            monotone = false;
        }
        u = next;
        iterations += 1;
        if change < controls.tol {
            break;
        }
        if iterations >= controls.max_iter {
            return Err(FujitaError::numerical(
                "fixed-point iteration did not converge",
                format!("last sup-change {change:e} after {iterations} iterations"),
            ));
        }
    }

    let mut sol = BallSolution {
        alpha,
        d: mesh.d,
        radial_grid: mesh.nodes.clone(),
        values: u,
        forcing,
        symmetry_defect: 0.0,
        boundary_exponent: None,
        iterations,
        contraction_factor: contraction,
        monotone_iteration: monotone,
        params: Some(params),
        gauss_points: controls.gauss_points,
    };
    sol.symmetry_defect = symmetry_defect(&sol)?;
    sol.boundary_exponent = boundary_exponent(&sol).ok().map(|fit| fit.slope);
    Ok(sol)
}

/// Largest gap between `u(x)` and `u(-x)` over the nodes (`d = 1`).
///
/// The `d = 2` solver works with the radial reduction, so its solutions
/// are rotation invariant by construction and the defect is 0.
fn symmetry_defect(sol: &BallSolution) -> Result<f64> {
    if sol.d != 1 {
        return Ok(0.0);
    }
    let nodes = &sol.radial_grid;
    let n = nodes.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let mirror = nodes[n - 1 - j];
        let other = if mirror == -nodes[j] { sol.values[n - 1 - j] } else { sol.eval(-nodes[j])? };
        worst = worst.max((sol.values[j] - other).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    pub slope: f64,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// `(u(1) - u(1-ε)) / ε` along the sweep.
    pub one_sided_slopes: Vec<f64>,
    /// Magnitude of the one-sided slope grows strictly as `ε` decreases.
    pub slope_diverges: bool,
}

/// Log–log fit of `u(1-ε)` against `ε` over `ε ∈ [1e-3, 1e-1]`.
pub fn boundary_exponent(sol: &BallSolution) -> Result<BoundaryFit> {
    let count = 13;
    let eps: Vec<f64> = (0..count).map(|k| 10f64.powf(-1.0 - 2.0 * k as f64 / (count - 1) as f64)).collect();
    let values = eps.iter().map(|e| sol.eval(1.0 - e)).collect::<Result<Vec<f64>>>()?;
    if let Some((e, v)) = eps.iter().zip(&values).find(|(_, v)| !(**v > 0.0)) {
        return Err(FujitaError::validation(format!("non-positive value {v} at distance {e} from the boundary")));
    }
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, _) = linear_fit(&lx, &ly).ok_or_else(|| FujitaError::numerical("boundary fit failed", "degenerate data"))?;
    let one_sided: Vec<f64> = eps.iter().zip(&values).map(|(e, v)| -v / e).collect();
    let diverges = one_sided.windows(2).all(|w| w[1].abs() > w[0].abs());
    Ok(BoundaryFit {
        slope,
        eps,
        values,
        one_sided_slopes: one_sided,
        slope_diverges: diverges,
    })
}
