//! Explicit stationary solutions of `Δ_α u + u^p = 0` at the critical
//! exponent `p = (d+α)/(d-α)`, the Kelvin transform, and two independent
//! verification routes: the real-space Riesz identity
//! `u(x) = 𝒜(d,α) ∫ u^p(y) ‖y-x‖^{α-d} dy` and its Fourier-side counterpart.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::nonlinearity::p_crit;
use crate::quadrature::{integrate, integrate_panels, integrate_to_infinity, QuadOptions};
use crate::special::{b_kernel, bessel_k, gamma_fn, riesz_constant};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// One member `u_{c,A}` of the explicit family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateParams {
    pub center: Vec<f64>,
    pub amplitude: f64,
    pub d: u32,
    pub alpha: f64,
}

impl SteadyStateParams {
    pub fn new(center: Vec<f64>, amplitude: f64, d: u32, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(FujitaError::domain(format!("alpha out of (0,2]: {alpha}")));
        }
        if !(f64::from(d) > alpha) {
            return Err(FujitaError::domain(format!("steady states need d > alpha, got d={d}, alpha={alpha}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(FujitaError::domain(format!("amplitude must be positive, got {amplitude}")));
        }
        if center.len() != d as usize {
            return Err(FujitaError::domain(format!("center has {} coordinates, expected {d}", center.len())));
        }
        Ok(Self {
            center,
            amplitude,
            d,
            alpha,
        })
    }

    /// Centred at the origin.
    pub fn centered(amplitude: f64, d: u32, alpha: f64) -> Result<Self> {
        Self::new(vec![0.0; d as usize], amplitude, d, alpha)
    }

    fn gap(&self) -> f64 {
        f64::from(self.d) - self.alpha
    }

    /// Coefficient of `‖x - c‖` inside the profile.
    pub fn a_scale(&self) -> f64 {
        let d = f64::from(self.d);
        let ratio = gamma_fn(0.5 * (d + self.alpha)).expect("positive") / gamma_fn(0.5 * (d - self.alpha)).expect("positive");
        self.amplitude.powf(2.0 / self.gap()) * 0.5 * ratio.powf(-1.0 / self.alpha)
    }

    pub fn exponent(&self) -> f64 {
        p_crit(self.d, self.alpha).expect("validated d > alpha")
    }

    /// `u_{c,A}` as a function of the distance to the center.
    pub fn radial(&self, r: f64) -> f64 {
        let s = self.a_scale() * r;
        self.amplitude / (1.0 + s * s).powf(0.5 * self.gap())
    }
}

pub fn eval_family(params: &SteadyStateParams, x: &[f64]) -> f64 {
    params.radial(dist(x, &params.center))
}

/// Coefficient of `‖x‖^{-(d-α)/2}` in the singular solution.
pub fn singular_coefficient(d: u32, alpha: f64) -> Result<f64> {
    let p = p_crit(d, alpha)?;
    let df = f64::from(d);
    let ratio = gamma_fn(0.25 * (df + alpha))? / gamma_fn(0.25 * (df - alpha))?;
    Ok((2f64.powf(alpha) * ratio * ratio).powf(1.0 / (p - 1.0)))
}

pub fn eval_singular(d: u32, alpha: f64, x: &[f64]) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(FujitaError::domain("the singular solution is undefined at the origin"));
    }
    Ok(singular_coefficient(d, alpha)? * r.powf(-0.5 * (f64::from(d) - alpha)))
}

/// Kelvin transform `‖x-c‖^{-(d-α)} u(c + (x-c)/‖x-c‖²)`.
pub fn kelvin(u: &dyn Fn(&[f64]) -> f64, center: &[f64], d: u32, alpha: f64, x: &[f64]) -> Result<f64> {
    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    if r2 == 0.0 {
        return Err(FujitaError::domain("Kelvin transform is undefined at its center"));
    }
    let image: Vec<f64> = x.iter().zip(center).map(|(a, c)| c + (a - c) / r2).collect();
    Ok(r2.powf(-0.5 * (f64::from(d) - alpha)) * u(&image))
}

/// Family member obtained by Kelvin-transforming `params` about its own center.
pub fn kelvin_partner(params: &SteadyStateParams) -> SteadyStateParams {
    let gap = f64::from(params.d) - params.alpha;
    SteadyStateParams {
        amplitude: params.amplitude * params.a_scale().powf(-gap),
        ..params.clone()
    }
}

/// Residuals of the Riesz identity at each sample radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `max |R| / u(0)`.
    pub max_normalized: f64,
}

/// Spherical average kernel `∫_{S^{d-1}} ‖r e₁ - ρ ω‖^{α-d} dω`.
fn shell_kernel(d: u32, alpha: f64, r: f64, rho: f64) -> Result<f64> {
    let df = f64::from(d);
    if r == 0.0 {
        let sphere = 2.0 * PI.powf(0.5 * df) / gamma_fn(0.5 * df)?;
        return Ok(sphere * rho.powf(alpha - df));
    }
    match d {
        3 => {
            let (sum, diff) = (r + rho, (r - rho).abs());
            if (alpha - 1.0).abs() < 1e-12 {
                Ok(2.0 * PI / (r * rho) * (sum / diff).ln())
            } else {
                Ok(2.0 * PI * (sum.powf(alpha - 1.0) - diff.powf(alpha - 1.0)) / (r * rho * (alpha - 1.0)))
            }
        }
        2 => {
            let q = integrate(
                |phi| (r * r + rho * rho - 2.0 * r * rho * phi.cos()).powf(0.5 * (alpha - 2.0)),
                0.0,
                PI,
                QuadOptions::tol(1e-14, 1e-11),
            )?;
            Ok(2.0 * q.value)
        }
        _ => Err(FujitaError::domain(format!("radial Riesz reduction supports d in 1..=3, got {d}"))),
    }
}

/// `𝒜(d,α) ∫ g(‖y‖) ‖y - x‖^{α-d} dy` at `‖x‖ = r` for radial `g`.
fn riesz_potential(g: &dyn Fn(f64) -> f64, d: u32, alpha: f64, r: f64, scale: f64) -> Result<f64> {
    let constant = riesz_constant(d, alpha)?.value;
    let opts = QuadOptions::tol(1e-13, 1e-10);
    if d == 1 {
        // ∫₀^∞ h(t) t^{α-1} dt with h(t) = g(|r+t|) + g(|r-t|); the
        // singular factor is integrated exactly over [0, δ].
        let h = |t: f64| g((r + t).abs()) + g((r - t).abs());
        let delta = 0.25 * scale;
        let h0 = h(0.0);
        let near = integrate(|t| (h(t) - h0) * t.powf(alpha - 1.0), 0.0, delta, opts)?.value
            + h0 * delta.powf(alpha) / alpha;
        let mut breaks = vec![delta];
        if r > delta {
            breaks.push(r);
        }
        let top = breaks.last().copied().unwrap_or(delta).max(delta) * 2.0 + 4.0 * scale;
        breaks.push(top);
        let mid = integrate_panels(|t| h(t) * t.powf(alpha - 1.0), &breaks, opts)?.value;
        let far = integrate_to_infinity(|t| h(t) * t.powf(alpha - 1.0), top, opts)?.value;
        return Ok(constant * (near + mid + far));
    }
    let df = f64::from(d);
    let mut err = None;
    let mut integrand = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        match shell_kernel(d, alpha, r, rho) {
            Ok(k) => g(rho) * rho.powf(df - 1.0) * k,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let mut breaks = vec![0.0];
    if r > 0.0 {
        breaks.push(r);
    }
    let top = 2.0 * r + 4.0 * scale;
    breaks.push(top);
    let near = integrate_panels(&mut integrand, &breaks, opts)?.value;
    let far = integrate_to_infinity(&mut integrand, top, opts)?.value;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(constant * (near + far))
}

/// Residual `R(r) = u(r) - 𝒜 ∫ u^p(y) ‖y-x‖^{α-d} dy` at the requested radii.
///
/// `scale` is a characteristic length of `u` used to place quadrature breakpoints.
pub fn riesz_residual(
    u: &dyn Fn(f64) -> f64,
    d: u32,
    alpha: f64,
    p: f64,
    radii: &[f64],
    scale: f64,
) -> Result<ResidualReport> {
    let df = f64::from(d);
    if !(p > 1.0) {
        return Err(FujitaError::validation(format!("exponent p must exceed 1, got {p}")));
    }
    // u^p must decay faster than ‖y‖^{-α} for the potential to converge.
    if p * (df - alpha) <= alpha {
        return Err(FujitaError::validation(format!(
            "u^p with tail exponent {} is not Riesz-integrable for alpha={alpha}",
            p * (df - alpha)
        )));
    }
    let g = |s: f64| u(s).max(0.0).powf(p);
    let mut residuals = Vec::with_capacity(radii.len());
    for &r in radii {
        let potential = riesz_potential(&g, d, alpha, r, scale)?;
        residuals.push(u(r) - potential);
    }
    let peak = u(0.0).abs();
    let worst = residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_normalized = if worst == 0.0 { 0.0 } else { worst / peak };
    Ok(ResidualReport {
        radii: radii.to_vec(),
        residuals,
        max_normalized,
    })
}

/// Both sides of the Fourier-transformed Riesz identity at `‖ξ‖ = radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierPair {
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn fourier_side_check(amplitude: f64, d: u32, alpha: f64, radii: &[f64]) -> Result<Vec<FourierPair>> {
    let params = SteadyStateParams::centered(amplitude, d, alpha)?;
    let p = params.exponent();
    let a = 1.0 / params.a_scale();
    let df = f64::from(d);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(FujitaError::domain("the frequency-side identity is singular at radius 0"));
        }
        let z = 2.0 * PI * a * r;
        let lhs = amplitude * a.powf(df - 0.5 * alpha) * PI.powf(0.5 * (df - alpha)) * 2.0
            / gamma_fn(0.5 * (df - alpha))?
            * r.powf(-0.5 * alpha)
            * bessel_k(0.5 * alpha, z)?;
        let rhs = (2.0 * PI * r).powf(-alpha) * (2.0 * PI * a).powf(df) * amplitude.powf(p) * b_kernel(df + alpha, d, z)?;
        out.push(FourierPair { radius: r, lhs, rhs });
    }
    Ok(out)
}

/// `‖x‖^{d-α} u_{0,A}(‖x‖)` along `‖x‖ = 2^k`, `k = 0..levels`.
pub fn tail_profile(params: &SteadyStateParams, levels: u32) -> Vec<(f64, f64)> {
    let gap = f64::from(params.d) - params.alpha;
    (0..levels)
        .map(|k| {
            let r = 2f64.powi(k as i32);
            (r, r.powf(gap) * params.radial(r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn peak_and_validation() {
        let p = SteadyStateParams::new(vec![0.3], 2.0, 1, 0.5).unwrap();
        assert_eq!(eval_family(&p, &[0.3]), 2.0);
        assert!(SteadyStateParams::centered(1.0, 1, 1.0).is_err());
        assert!(SteadyStateParams::centered(-1.0, 3, 1.0).is_err());
        assert!(SteadyStateParams::new(vec![0.0], 1.0, 3, 1.0).is_err());
    }

    #[test]
    fn laplacian_case_matches_classical_bubble() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d: u32 = rng.gen_range(3..=5);
            let amp: f64 = rng.gen_range(0.1..5.0);
            let r: f64 = rng.gen_range(0.0..10.0);
            let df = f64::from(d);
            let p = SteadyStateParams::centered(amp, d, 2.0).unwrap();
            let mut x = vec![0.0; d as usize];
            x[0] = r;
            let ours = eval_family(&p, &x);
            let k = df * (df - 2.0);
            let s = amp.powf(2.0 / (df - 2.0)) * r;
            let classic = amp * k.powf(0.5 * (df - 2.0)) / (k + s * s).powf(0.5 * (df - 2.0));
            assert!(((ours - classic) / classic).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_constant_settles() {
        let p = SteadyStateParams::centered(1.0, 1, 0.5).unwrap();
        let prof = tail_profile(&p, 30);
        let last = prof.last().unwrap().1;
        assert!(last > 0.0);
        // Cauchy: successive differences shrink.
        let diffs: Vec<f64> = prof.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
        assert!(diffs[25] < 1e-12 * last.max(1.0) + diffs[5] * 1e-6);
    }

    #[test]
    fn singular_solution_scaling_and_domain() {
        for &(d, alpha) in &[(1u32, 0.5), (3, 1.0), (3, 2.0)] {
            let x = vec![0.7; d as usize];
            let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            let a = eval_singular(d, alpha, &x).unwrap();
            let b = eval_singular(d, alpha, &x2).unwrap();
            let expect = 2f64.powf(-0.5 * (f64::from(d) - alpha));
            assert!((b / a - expect).abs() < 1e-14);
        }
        assert!(eval_singular(1, 0.5, &[0.0]).is_err());
    }

    #[test]
    fn singular_coefficient_low_dim() {
        let expected = (2f64.sqrt() * (gamma_fn(0.375).unwrap() / gamma_fn(0.125).unwrap()).powi(2)).powf(0.5);
        assert!((singular_coefficient(1, 0.5).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn kelvin_domain() {
        let p = SteadyStateParams::centered(1.0, 1, 0.5).unwrap();
        let u = |x: &[f64]| eval_family(&p, x);
        assert!(kelvin(&u, &[0.0], 1, 0.5, &[0.0]).is_err());
    }

    #[test]
    fn zero_function_has_zero_residual() {
        let rep = riesz_residual(&|_| 0.0, 1, 0.5, 3.0, &[0.0, 1.0], 1.0).unwrap();
        assert_eq!(rep.max_normalized, 0.0);
        assert!(rep.residuals.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn residual_rejects_nonintegrable_tail() {
        // p (d - α) = 1.44 does not exceed α = 1.8.
        assert!(riesz_residual(&|r| 1.0 / (1.0 + r), 3, 1.8, 1.2, &[0.0], 1.0).is_err());
        assert!(riesz_residual(&|r| 1.0 / (1.0 + r), 1, 0.5, 1.0, &[0.0], 1.0).is_err());
    }

    #[test]
    fn family_residual_small_in_three_dims() {
        let p = SteadyStateParams::centered(1.0, 3, 1.0).unwrap();
        let u = |r: f64| p.radial(r);
        let rep = riesz_residual(&u, 3, 1.0, p.exponent(), &[0.0, 0.5, 1.0, 3.0], 1.0 / p.a_scale()).unwrap();
        assert!(rep.max_normalized < 1e-3, "{rep:?}");
    }

    #[test]
    fn family_residual_small_for_second_low_dim_case() {
        let p = SteadyStateParams::centered(1.0, 1, 0.75).unwrap();
        let u = |r: f64| p.radial(r);
        let radii: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
        let rep = riesz_residual(&u, 1, 0.75, p.exponent(), &radii, 1.0 / p.a_scale()).unwrap();
        assert!(rep.max_normalized < 1e-3, "{rep:?}");
    }

    #[test]
    fn low_dim_family_residual_and_perturbation() {
        let p = SteadyStateParams::centered(1.0, 1, 0.5).unwrap();
        assert!((p.exponent() - 3.0).abs() < 1e-15);
        let radii: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
        let scale = 1.0 / p.a_scale();
        let rep = riesz_residual(&|r| p.radial(r), 1, 0.5, p.exponent(), &radii, scale).unwrap();
        assert!(rep.max_normalized < 1e-3, "{rep:?}");
        let bumped = riesz_residual(&|r| 1.1 * p.radial(r), 1, 0.5, p.exponent(), &[0.0], scale).unwrap();
        assert!(bumped.residuals[0].abs() >= 0.01, "{bumped:?}");
    }

    #[test]
    fn frequency_sides_agree() {
        for &(d, alpha, amp) in &[(1u32, 0.5, 1.0), (3, 1.0, 0.7), (2, 1.5, 2.0)] {
            let radii = [0.05, 0.3, 1.0, 2.5];
            for pair in fourier_side_check(amp, d, alpha, &radii).unwrap() {
                let rel = ((pair.lhs - pair.rhs) / pair.lhs).abs();
                assert!(rel < 1e-8, "d={d} alpha={alpha} {pair:?}");
            }
        }
        assert!(fourier_side_check(1.0, 1, 0.5, &[0.0]).is_err());
    }

    #[test]
    fn kelvin_maps_family_into_itself() {
        for &(d, alpha, amp) in &[(1u32, 0.5, 1.0), (3, 1.2, 3.0), (2, 0.7, 0.4)] {
            let p = SteadyStateParams::centered(amp, d, alpha).unwrap();
            let partner = kelvin_partner(&p);
            let u = |x: &[f64]| eval_family(&p, x);
            for k in 1..20 {
                let mut x = vec![0.0; d as usize];
                x[0] = 0.37 * k as f64;
                let v = kelvin(&u, &p.center, d, alpha, &x).unwrap();
                let w = eval_family(&partner, &x);
                assert!(((v - w) / w).abs() < 1e-12);
            }
        }
    }
}
