//! The reaction term `G` and its standing assumptions.
//!
//! Only parametric families are accepted so that the small-`z` behaviour
//! `G(z) ~ c z^{1+β}` and the integrability of `1/G` at infinity can be
//! checked mechanically.

use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `G(z) = c z^{1+β}`
    PowerLaw,
    /// `G(z) = c z^{1+β} (1 + z)`
    ScaledPowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub beta: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_c() -> f64 {
    1.0
}

fn default_theta() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BlowUpForAll,
    GlobalRegime,
}

impl NonlinearitySpec {
    pub fn power_law(c: f64, beta: f64) -> Result<Self> {
        Self::new(NonlinearityKind::PowerLaw, beta, c, 1.0)
    }

    pub fn new(kind: NonlinearityKind, beta: f64, c: f64, theta: f64) -> Result<Self> {
        let spec = Self { kind, beta, c, theta };
        spec.validate()?;
        Ok(spec)
    }

    /// Rejects parameters for which (G1) or (G2) would fail.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(FujitaError::validation(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(FujitaError::validation(format!("c must be positive, got {}", self.c)));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(FujitaError::validation(format!("theta must be positive, got {}", self.theta)));
        }
        Ok(())
    }

    pub fn is_exact_power_law(&self) -> bool {
        self.kind == NonlinearityKind::PowerLaw
    }

    /// `G(z)`.
    pub fn evaluate(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(FujitaError::domain(format!("G is defined on z >= 0, got {z}")));
        }
        Ok(self.eval_unchecked(z))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, z: f64) -> f64 {
        let base = self.c * z.powf(1.0 + self.beta);
        match self.kind {
            NonlinearityKind::PowerLaw => base,
            NonlinearityKind::ScaledPowerLaw => base * (1.0 + z),
        }
    }

    /// `G(z)/z`, with the value 0 at `z = 0`.
    pub fn ratio(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(FujitaError::domain(format!("G(z)/z is defined on z >= 0, got {z}")));
        }
        Ok(self.ratio_unchecked(z))
    }

    #[inline]
    pub(crate) fn ratio_unchecked(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        let base = self.c * z.powf(self.beta);
        match self.kind {
            NonlinearityKind::PowerLaw => base,
            NonlinearityKind::ScaledPowerLaw => base * (1.0 + z),
        }
    }

    /// `G'(z)`.
    pub fn derivative(&self, z: f64) -> f64 {
        let z = z.max(0.0);
        let b = self.beta;
        match self.kind {
            NonlinearityKind::PowerLaw => self.c * (1.0 + b) * z.powf(b),
            NonlinearityKind::ScaledPowerLaw => self.c * ((1.0 + b) * z.powf(b) + (2.0 + b) * z.powf(1.0 + b)),
        }
    }

    /// `G^{-1}(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(FujitaError::domain(format!("G^-1 is defined on y >= 0, got {y}")));
        }
        let guess = (y / self.c).powf(1.0 / (1.0 + self.beta));
        if self.is_exact_power_law() || y == 0.0 {
            return Ok(guess);
        }
        // G is increasing; bisection on [0, guess] since G(z) >= c z^{1+β}.
        let (mut lo, mut hi) = (0.0, guess);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval_unchecked(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Midpoint convexity `G((a+b)/2) ≤ (G(a)+G(b))/2` on an `n`-point grid of `[0, z_max]`.
    pub fn check_convexity(&self, z_max: f64, n: usize) -> bool {
        let pts: Vec<f64> = (0..n).map(|i| z_max * i as f64 / (n - 1) as f64).collect();
        pts.iter().all(|&a| {
            pts.iter().all(|&b| {
                let mid = self.eval_unchecked(0.5 * (a + b));
                mid <= 0.5 * (self.eval_unchecked(a) + self.eval_unchecked(b)) * (1.0 + 1e-12) + 1e-300
            })
        })
    }

    /// `∫_θ^{upper} dz / G(z)`.
    pub fn tail_integral(&self, upper: f64) -> Result<f64> {
        if upper <= self.theta {
            return Ok(0.0);
        }
        // Integrate in log z to flatten the power-law decay.
        let (lo, hi) = (self.theta.ln(), upper.ln());
        let q = integrate(
            |s| {
                let z = s.exp();
                z / self.eval_unchecked(z)
            },
            lo,
            hi,
            QuadOptions::tol(1e-14, 1e-12),
        )?;
        Ok(q.value)
    }

    /// Cauchy check of (G2): the tail integral over doubling upper limits up
    /// to `z_max` must settle, with increments shrinking geometrically.
    pub fn check_tail_integrability(&self, z_max: f64) -> Result<bool> {
        let mut upper = 2.0 * self.theta;
        let mut increments = Vec::new();
        let mut prev = 0.0;
        while upper <= z_max {
            let v = self.tail_integral(upper)?;
            increments.push(v - prev);
            prev = v;
            upper *= 2.0;
        }
        if increments.len() < 4 {
            return Ok(true);
        }
        let tail = &increments[increments.len() / 2..];
        // Geometric decay of the increments implies a finite limit.
        let ratio = tail.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
        Ok(ratio < 0.99 && prev.is_finite())
    }
}

/// Returns an `ε' > 0` with `G((1+ε)z) / ((1+ε)z) > (1+ε') G(z)/z` on `(0, M]`.
pub fn convexity_gap(spec: &NonlinearitySpec, eps: f64, m: f64) -> Result<f64> {
    spec.validate()?;
    if !(eps > 0.0) || !(m > 0.0) {
        return Err(FujitaError::domain(format!("convexity_gap needs eps > 0 and M > 0, got {eps}, {m}")));
    }
    let exact = (1.0 + eps).powf(spec.beta) - 1.0;
    if spec.is_exact_power_law() {
        return Ok(exact);
    }
    const SAFETY: f64 = 0.9;
    let n = 2000;
    let log_lo = (m * 1e-12).ln();
    let log_hi = m.ln();
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let z = (log_lo + (log_hi - log_lo) * i as f64 / (n - 1) as f64).exp();
        let lifted = spec.ratio_unchecked((1.0 + eps) * z);
        let base = spec.ratio_unchecked(z);
        worst = worst.min(lifted / base - 1.0);
    }
    if !(worst > 0.0) {
        return Err(FujitaError::validation(format!(
            "no positive convexity gap found on (0, {m}] for eps = {eps}"
        )));
    }
    Ok(SAFETY * worst)
}

/// `BlowUpForAll` iff `d ≤ α/β`.
pub fn regime(d: u32, alpha: f64, spec: &NonlinearitySpec) -> Result<Regime> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FujitaError::domain(format!("alpha out of (0,2]: {alpha}")));
    }
    if d == 0 {
        return Err(FujitaError::domain("dimension must be at least 1"));
    }
    spec.validate()?;
    Ok(if f64::from(d) <= alpha / spec.beta {
        Regime::BlowUpForAll
    } else {
        Regime::GlobalRegime
    })
}

/// Critical exponent `(d + α)/(d − α)` of the explicit steady states.
pub fn p_crit(d: u32, alpha: f64) -> Result<f64> {
    let df = f64::from(d);
    if !(df > alpha) {
        return Err(FujitaError::domain(format!("p_crit requires d > alpha, got d={d}, alpha={alpha}")));
    }
    Ok((df + alpha) / (df - alpha))
}
