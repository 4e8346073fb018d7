//! Poisson and Green kernels of `Δ_α` for a ball.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::fraclap::sphere_area;
use crate::quadrature::{integrate, tanh_sinh, QuadOptions};
use crate::special::gamma_fn;

fn check_ball_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(FujitaError::domain(format!("ball kernels need alpha in (0,2), got {alpha}")));
    }
    Ok(())
}

/// `Γ(d/2) sin(πα/2) / π^{d/2+1}`.
pub fn poisson_constant_closed_form(alpha: f64, d: u32) -> Result<f64> {
    check_ball_alpha(alpha)?;
    let h = 0.5 * f64::from(d);
    Ok(gamma_fn(h)? * (0.5 * PI * alpha).sin() / PI.powf(h + 1.0))
}

/// `Γ(d/2) / (2^α π^{d/2} Γ(α/2)²)`.
pub fn green_constant_closed_form(alpha: f64, d: u32) -> Result<f64> {
    check_ball_alpha(alpha)?;
    let h = 0.5 * f64::from(d);
    let g = gamma_fn(0.5 * alpha)?;
    Ok(gamma_fn(h)? / (2f64.powf(alpha) * PI.powf(h) * g * g))
}

/// Mean exit time from the ball, `E_x τ = Γ(d/2) (R² - |x-c|²)^{α/2} / (2^α Γ(1+α/2) Γ((d+α)/2))`.
pub fn expected_exit_time(alpha: f64, d: u32, radius: f64, dist_from_center: f64) -> Result<f64> {
    check_ball_alpha(alpha)?;
    if !(dist_from_center >= 0.0 && dist_from_center < radius) {
        return Err(FujitaError::domain("point must lie inside the ball"));
    }
    let h = 0.5 * f64::from(d);
    let gap = (radius - dist_from_center) * (radius + dist_from_center);
    Ok(gamma_fn(h)? * gap.powf(0.5 * alpha) / (2f64.powf(alpha) * gamma_fn(1.0 + 0.5 * alpha)? * gamma_fn(h + 0.5 * alpha)?))
}

/// `I(w) = ∫₀^w r^{a-1} (1+r)^{-b} dr` with `a = α/2`, `b = d/2`.
///
/// Binomial series in `w` for `w ≤ ½`, in `1/w` for `w ≥ 2`, adaptive
/// quadrature in between.
#[derive(Debug, Clone)]
pub struct GreenInner {
    a: f64,
    b: f64,
    at_half: f64,
    at_two: f64,
}

impl GreenInner {
    pub fn new(alpha: f64, d: u32) -> Result<Self> {
        check_ball_alpha(alpha)?;
        let a = 0.5 * alpha;
        let b = 0.5 * f64::from(d);
        let mut me = Self { a, b, at_half: 0.0, at_two: 0.0 };
        me.at_half = me.small(0.5);
        me.at_two = me.at_half + me.middle(2.0)?;
        Ok(me)
    }

    fn small(&self, w: f64) -> f64 {
        let mut coef = 1.0;
        let mut pow = w.powf(self.a);
        let mut sum = pow / self.a;
        for k in 1..200 {
            coef *= -(self.b + k as f64 - 1.0) / k as f64;
            pow *= w;
            let term = coef * pow / (k as f64 + self.a);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    }

    fn middle(&self, w: f64) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        Ok(integrate(|r| r.powf(a - 1.0) * (1.0 + r).powf(-b), 0.5, w, QuadOptions::tol(1e-16, 1e-14))?.value)
    }

    /// `∫_{s}^{1/2} σ^{b-a-1} (1+σ)^{-b} dσ` for `s ≤ ½`.
    fn large_tail(&self, s: f64) -> f64 {
        let e0 = self.b - self.a;
        let antider = |k: usize, x: f64| {
            let e = k as f64 + e0;
            if e.abs() < 1e-14 {
                x.ln()
            } else {
                x.powf(e) / e
            }
        };
        let mut coef = 1.0;
        let mut sum = antider(0, 0.5) - antider(0, s);
        for k in 1..200 {
            coef *= -(self.b + k as f64 - 1.0) / k as f64;
            let term = coef * (antider(k, 0.5) - antider(k, s));
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    pub fn eval(&self, w: f64) -> f64 {
        if w <= 0.0 {
            0.0
        } else if w <= 0.5 {
            self.small(w)
        } else if w < 2.0 {
            self.at_half + self.middle(w).unwrap_or(f64::NAN)
        } else if w.is_infinite() {
            if self.b > self.a {
                self.at_two + self.large_tail(0.0)
            } else {
                f64::INFINITY
            }
        } else {
            self.at_two + self.large_tail(1.0 / w)
        }
    }
}

/// Kernel parameters for the ball `B_radius(center)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallKernelParams {
    pub alpha: f64,
    pub d: u32,
    pub radius: f64,
    pub center: Vec<f64>,
    pub c_poisson: f64,
    pub c_green: f64,
    #[serde(skip)]
    inner: Option<GreenInner>,
}

impl PartialEq for BallKernelParams {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
            && self.d == other.d
            && self.radius == other.radius
            && self.center == other.center
            && self.c_poisson == other.c_poisson
            && self.c_green == other.c_green
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl BallKernelParams {
    /// Calibrates `c_poisson` by normalizing the exit law at the center and
    /// fixes `c_green` at its closed form (cross-checked against the mean
    /// exit time by Monte Carlo in the test-suite).
    pub fn new(alpha: f64, d: u32, radius: f64, center: Vec<f64>) -> Result<Self> {
        check_ball_alpha(alpha)?;
        if !(1..=3).contains(&d) {
            return Err(FujitaError::domain(format!("ball kernels support d in 1..=3, got {d}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FujitaError::domain(format!("radius must be positive, got {radius}")));
        }
        if center.len() != d as usize {
            return Err(FujitaError::domain(format!("center has {} coordinates, expected {d}", center.len())));
        }
        // ∫_{|y|>R} [R²/(|y|²-R²)]^{α/2} |y|^{-d} dy = |S^{d-1}| · ½ ∫₀¹ v^{-α/2} (1-v)^{α/2-1} dv.
        let half = 0.5 * alpha;
        let beta = tanh_sinh(|_, v, one_minus_v| v.powf(-half) * one_minus_v.powf(half - 1.0), 0.0, 1.0, 1e-14)?.value;
        let c_poisson = 1.0 / (sphere_area(d as usize) * 0.5 * beta);
        Ok(Self {
            alpha,
            d,
            radius,
            center,
            c_poisson,
            c_green: green_constant_closed_form(alpha, d)?,
            inner: Some(GreenInner::new(alpha, d)?),
        })
    }

    pub fn unit(alpha: f64, d: u32) -> Result<Self> {
        Self::new(alpha, d, 1.0, vec![0.0; d as usize])
    }

    fn inner(&self) -> GreenInner {
        self.inner.clone().unwrap_or_else(|| GreenInner::new(self.alpha, self.d).expect("validated"))
    }

    /// `(R - |x-c|)(R + |x-c|)`, positive inside.
    fn gap(&self, x: &[f64]) -> f64 {
        let r = dist(x, &self.center);
        (self.radius - r) * (self.radius + r)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d as usize {
            return Err(FujitaError::domain(format!("point has {} coordinates, expected {}", x.len(), self.d)));
        }
        Ok(())
    }

    pub fn poisson_kernel(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let gx = self.gap(x);
        let gy = -self.gap(y);
        if !(gx > 0.0 && gy > 0.0) {
            return Err(FujitaError::domain("poisson_kernel needs x inside and y outside the ball"));
        }
        Ok(self.c_poisson * (gx / gy).powf(0.5 * self.alpha) * dist(x, y).powi(-(self.d as i32)))
    }

    pub fn green_function(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let (gx, gy) = (self.gap(x), self.gap(y));
        if !(gx > 0.0 && gy > 0.0) {
            return Err(FujitaError::domain("green_function needs both points strictly inside the ball"));
        }
        Ok(self.green_unchecked(&self.inner(), dist(x, y), gx, gy))
    }

    /// `G` from the separation `r = |x-y|` and the two boundary gaps.
    pub(crate) fn green_unchecked(&self, inner: &GreenInner, r: f64, gx: f64, gy: f64) -> f64 {
        let df = f64::from(self.d);
        // Dimensionless: the 1/R² keeps G_R(x,y) = R^{α-d} G_1(x/R, y/R).
        let w = gx * gy / (r * r * self.radius * self.radius);
        if r == 0.0 || w.is_infinite() {
            if df >= self.alpha {
                return f64::INFINITY;
            }
            // |x-y|^{α-d} I(w) → gap^{α-d} / (a - b) along the diagonal.
            let g = gx / self.radius;
            return self.c_green * g.powf(self.alpha - df) / (0.5 * (self.alpha - df));
        }
        self.c_green * r.powf(self.alpha - df) * inner.eval(w)
    }

    /// `G` with a cached inner-integral evaluator for hot loops.
    pub fn green_evaluator(&self) -> impl Fn(&[f64], &[f64]) -> f64 + Sync + '_ {
        let inner = self.inner();
        move |x: &[f64], y: &[f64]| {
            let (gx, gy) = (self.gap(x), self.gap(y));
            if gx <= 0.0 || gy <= 0.0 {
                return 0.0;
            }
            self.green_unchecked(&inner, dist(x, y), gx, gy)
        }
    }

    /// `G` along a ray from `x`: `y = x + s·dir` with `|dir| = 1`, keeping
    /// the separation `s` exact so that quadrature nodes near `x` stay
    /// resolvable.
    pub(crate) fn green_ray<'a>(&'a self, x: &'a [f64]) -> impl Fn(&[f64], f64) -> f64 + 'a {
        let inner = self.inner();
        let gx = self.gap(x);
        move |dir: &[f64], s: f64| {
            let y: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + s * b).collect();
            let gy = self.gap(&y);
            // Below this separation the (integrable) diagonal singularity
            // contributes nothing representable in f64.
            if gx <= 0.0 || gy <= 0.0 || s <= 1e-150 * self.radius {
                return 0.0;
            }
            self.green_unchecked(&inner, s, gx, gy)
        }
    }

    /// `∫_{|y-c|>R} P(x, y) dy` by quadrature; `x` is taken on the first axis.
    pub fn poisson_mass(&self, dist_from_center: f64) -> Result<f64> {
        let r0 = dist_from_center;
        if !(r0 >= 0.0 && r0 < self.radius) {
            return Err(FujitaError::domain("point must lie inside the ball"));
        }
        let radius = self.radius;
        let mut x = self.center.clone();
        x[0] += r0;
        let gx = (radius - r0) * (radius + r0);
        let half = 0.5 * self.alpha;
        let d = self.d;
        // Radial integrand at |y - c| = ρ = R + t/(1-t) after angular averaging.
        let angular = |rho: f64, gy: f64| -> f64 {
            let factor = (gx / gy).powf(half);
            match d {
                1 => factor * ((rho - r0).recip() + (rho + r0).recip()),
                2 => {
                    let m = 256;
                    let mut acc = 0.0;
                    for k in 0..m {
                        let th = 2.0 * PI * k as f64 / m as f64;
                        acc += (rho * rho + r0 * r0 - 2.0 * rho * r0 * th.cos()).recip();
                    }
                    factor * acc * 2.0 * PI / m as f64 * rho
                }
                // ρ² ∫_{S²} |ρω - x|^{-3} dω = 4πρ / (ρ² - r0²).
                _ => factor * 4.0 * PI * rho / ((rho - r0) * (rho + r0)),
            }
        };
        let q = tanh_sinh(
            |_, t, one_minus_t| {
                let excess = t / one_minus_t;
                let rho = radius + excess;
                let gy = excess * (rho + radius);
                let v = angular(rho, gy) / (one_minus_t * one_minus_t);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
            1e-13,
        )?;
        Ok(self.c_poisson * q.value)
    }

    /// `∫_B G(x, y) dy`, `x = c + dist·e₁` (d = 1 or 2).
    pub fn green_mass(&self, dist_from_center: f64) -> Result<f64> {
        let r0 = dist_from_center;
        if !(r0 >= 0.0 && r0 < self.radius) {
            return Err(FujitaError::domain("point must lie inside the ball"));
        }
        let mut x = self.center.clone();
        x[0] += r0;
        let g = self.green_ray(&x);
        let radius = self.radius;
        match self.d {
            1 => {
                let left = tanh_sinh(|_, s, _| g(&[-1.0], s), 0.0, radius + r0, 1e-12)?.value;
                let right = tanh_sinh(|_, s, _| g(&[1.0], s), 0.0, radius - r0, 1e-12)?.value;
                Ok(left + right)
            }
            2 => {
                // Polar coordinates about x: ray length to the circle is s_max(θ).
                let m = 128;
                let mut acc = 0.0;
                for k in 0..m {
                    let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                    let (cs, sn) = (th.cos(), th.sin());
                    let s_max = -r0 * cs + (radius * radius - r0 * r0 * sn * sn).sqrt();
                    let q = tanh_sinh(
                        |_, s, _| g(&[cs, sn], s) * s,
                        0.0,
                        s_max,
                        1e-11,
                    )?;
                    acc += q.value;
                }
                Ok(acc * 2.0 * PI / m as f64)
            }
            d => Err(FujitaError::domain(format!("green_mass supports d = 1, 2; got {d}"))),
        }
    }
}
