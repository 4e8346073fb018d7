//! Gamma, Macdonald (modified Bessel, second kind) and the `B_w` kernel.
//!
//! `K_ν` is evaluated straight from its integral representation
//! `K_ν(z) = ½ (z/2)^ν ∫₀^∞ r^{-ν-1} exp(-r - z²/4r) dr`. After `r = e^s` the
//! integrand decays double-exponentially in both directions, so a trapezoidal
//! rule with step halving converges geometrically and is its own error check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::quadrature::trapezoid_decaying;

/// Gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FujitaError::domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `ln Γ(x)` for positive real arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FujitaError::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln ∫₀^∞ r^{p-1} exp(-r - c/r) dr` for `c > 0` (any real `p`).
fn ln_exp_integral(p: f64, c: f64) -> Result<f64> {
    // phi(s) = p s - e^s - c e^{-s} is strictly concave; its maximum sits at
    // e^s = (p + sqrt(p^2 + 4c)) / 2.
    let phi = |s: f64| p * s - s.exp() - c * (-s).exp();
    let x_star = if p >= 0.0 {
        0.5 * (p + (p * p + 4.0 * c).sqrt())
    } else {
        // Same root, written to avoid cancellation when p < 0.
        2.0 * c / ((p * p + 4.0 * c).sqrt() - p)
    };
    let s_star = x_star.ln();
    let peak = phi(s_star);
    // Curvature at the peak sets the natural step for bracketing.
    let width = 1.0 / (x_star + c / x_star).sqrt();
    let cutoff = 60.0;
    let mut lo = s_star - width;
    let mut step = width;
    while peak - phi(lo) < cutoff {
        lo -= step;
        step *= 2.0;
    }
    let mut hi = s_star + width;
    step = width;
    while peak - phi(hi) < cutoff {
        hi += step;
        step *= 2.0;
    }
    let q = trapezoid_decaying(|s| (phi(s) - peak).exp(), lo, hi, 1e-15)
        .or_else(|_| trapezoid_decaying(|s| (phi(s) - peak).exp(), lo, hi, 1e-12))
        .map_err(|e| FujitaError::numerical("exponential integral", format!("p={p}, c={c}: {e}")))?;
    Ok(peak + q.value.ln())
}

/// Macdonald function `K_ν(z)` for real order and `z > 0`.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(FujitaError::domain(format!("bessel_k requires z > 0, got {z}")));
    }
    if !nu.is_finite() {
        return Err(FujitaError::domain(format!("bessel_k requires finite order, got {nu}")));
    }
    let ln_i = ln_exp_integral(-nu, 0.25 * z * z)?;
    Ok((0.5f64.ln() + nu * (0.5 * z).ln() + ln_i).exp())
}

/// The `B_w` kernel at radius `r = ‖x‖` in dimension `d`, through its Macdonald form.
pub fn b_kernel(w: f64, d: u32, r: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(FujitaError::domain(format!("b_kernel requires w > 0, got {w}")));
    }
    if !(r > 0.0) {
        return Err(FujitaError::domain(format!("b_kernel requires r > 0, got {r}")));
    }
    let d = f64::from(d);
    let nu = 0.5 * (d - w);
    let prefactor = 2f64.powf(nu + 1.0) / (gamma_fn(0.5 * w)? * (4.0 * PI).powf(0.5 * d));
    Ok(prefactor * r.powf(-nu) * bessel_k(nu, r)?)
}

/// The constant `𝒜(d, α)` of the Riesz potential `𝒜(d,α) ‖x‖^{-(d-α)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszConstant {
    pub d: u32,
    pub alpha: f64,
    pub value: f64,
}

pub fn riesz_constant(d: u32, alpha: f64) -> Result<RieszConstant> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(FujitaError::domain(format!("alpha out of (0,2]: {alpha}")));
    }
    let df = f64::from(d);
    if d == 0 || df <= alpha {
        return Err(FujitaError::domain(format!(
            "Riesz constant requires d > alpha (recurrent regime otherwise), got d={d}, alpha={alpha}"
        )));
    }
    let value = gamma_fn(0.5 * (df - alpha))? / (gamma_fn(0.5 * alpha)? * 2f64.powf(alpha) * PI.powf(0.5 * df));
    Ok(RieszConstant { d, alpha, value })
}

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (q + k)^{-s}` for `s > 1`, `q > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return Err(FujitaError::domain(format!("hurwitz_zeta requires s > 1, q > 0; got s={s}, q={q}")));
    }
    // B_{2j} / (2j)!
    const B2J_OVER_FACT: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    let n = 12;
    let mut sum: f64 = (0..n).map(|k| (q + k as f64).powf(-s)).sum();
    let a = q + n as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Rising factorial s (s+1) ... (s+2j-2) times a^{-s-2j+1}.
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, coeff) in B2J_OVER_FACT.iter().enumerate() {
        let term = coeff * rising * power;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= a * a;
    }
    Ok(sum)
}
