//! Symmetric α-stable process: sampling and transition densities.
//!
//! Convention: `E exp(iθ·X_t) = exp(-t‖θ‖^α)`, which is the Fourier multiplier
//! `-(2π‖ξ‖)^α` of the fractional Laplacian under `f̂(ξ) = ∫ e^{-2πix·ξ} f(x) dx`.
//! At α = 2 the process is Brownian motion run at twice the standard speed.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::gamma_fn;

/// RNG for stream `stream` of experiment `seed`; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(FujitaError::domain(format!("alpha out of (0,2]: {alpha}")))
    }
}

fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -open_uniform(rng).ln()
}

/// Symmetric stable variate with `E e^{iθX} = e^{-|θ|^α}` (Chambers–Mallows–Stuck).
pub fn symmetric_stable_unit<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (open_uniform(rng) - 0.5);
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    let w = standard_exponential(rng);
    let cos_v = v.cos();
    (alpha * v).sin() / cos_v.powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Positive stable variate of index `a ∈ (0, 1]` with `E e^{-λS} = e^{-λ^a}` (Kanter).
pub fn positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    let u = PI * open_uniform(rng);
    let w = standard_exponential(rng);
    (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / w).powf((1.0 - a) / a)
}

/// One increment over a time gap `h`, written into `out` (length `d`).
pub fn sample_increment_into<R: Rng + ?Sized>(alpha: f64, h: f64, out: &mut [f64], rng: &mut R) {
    let scale = h.powf(1.0 / alpha);
    if out.len() == 1 {
        out[0] = scale * symmetric_stable_unit(alpha, rng);
        return;
    }
    // Subordinated Brownian motion: X = sqrt(2 S) Z with S positive (α/2)-stable.
    let s = positive_stable(0.5 * alpha, rng);
    let amp = scale * (2.0 * s).sqrt();
    for x in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *x = amp * z;
    }
}

pub fn sample_increment<R: Rng + ?Sized>(alpha: f64, h: f64, d: usize, rng: &mut R) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if !(h > 0.0) {
        return Err(FujitaError::domain(format!("time step must be positive, got {h}")));
    }
    if d == 0 {
        return Err(FujitaError::domain("dimension must be at least 1"));
    }
    let mut out = vec![0.0; d];
    sample_increment_into(alpha, h, &mut out, rng);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StablePath {
    pub alpha: f64,
    pub d: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub seed: u64,
}

pub fn simulate_path(alpha: f64, x0: &[f64], times: &[f64], seed: u64) -> Result<StablePath> {
    check_alpha(alpha)?;
    let d = x0.len();
    if d == 0 {
        return Err(FujitaError::domain("starting point must have at least one coordinate"));
    }
    if times.first() != Some(&0.0) {
        return Err(FujitaError::validation("times must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FujitaError::validation("times must be strictly increasing"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut positions = Vec::with_capacity(times.len());
    positions.push(x0.to_vec());
    let mut inc = vec![0.0; d];
    for w in times.windows(2) {
        sample_increment_into(alpha, w[1] - w[0], &mut inc, &mut rng);
        let last = positions.last().expect("non-empty");
        positions.push(last.iter().zip(&inc).map(|(a, b)| a + b).collect());
    }
    Ok(StablePath {
        alpha,
        d,
        times: times.to_vec(),
        positions,
        seed,
    })
}

/// Bessel `J_0`, power series below 12 and Hankel asymptotics above.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 12.0 {
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..80 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        return sum;
    }
    // Hankel P, Q series. b_m = Π_{j≤m} (2j-1)² / (m! (8x)^m);
    // P = Σ (-1)^k b_{2k}, Q = -Σ (-1)^k b_{2k+1}. Truncated at the smallest term.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut b = 1.0;
    let z = 8.0 * x;
    for m in 1..60 {
        let odd = (2 * m - 1) as f64;
        let next = b * odd * odd / (m as f64 * z);
        if next > b {
            break;
        }
        b = next;
        let k = m / 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        if m % 2 == 0 {
            p += sign * b;
        } else {
            q -= sign * b;
        }
        if b < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * (x - 0.25 * PI).cos() - q * (x - 0.25 * PI).sin())
}

/// Radial density of `X_1` at distance `rho` by Fourier inversion.
fn unit_density_fourier(alpha: f64, d: usize, rho: f64) -> Result<f64> {
    let df = d as f64;
    if rho == 0.0 {
        // (2π)^{-d} |S^{d-1}| ∫ k^{d-1} e^{-k^α} dk
        let sphere = 2.0 * PI.powf(0.5 * df) / gamma_fn(0.5 * df)?;
        return Ok((2.0 * PI).powf(-df) * sphere * gamma_fn(df / alpha)? / alpha);
    }
    let integrand: Box<dyn Fn(f64) -> f64> = match d {
        1 => Box::new(move |k: f64| (k * rho).cos() * (-k.powf(alpha)).exp()),
        2 => Box::new(move |k: f64| k * bessel_j0(k * rho) * (-k.powf(alpha)).exp()),
        3 => Box::new(move |k: f64| k * (k * rho).sin() * (-k.powf(alpha)).exp()),
        _ => return Err(FujitaError::domain(format!("transition density supports d <= 3, got {d}"))),
    };
    let prefactor = match d {
        1 => 1.0 / PI,
        2 => 1.0 / (2.0 * PI),
        _ => 1.0 / (2.0 * PI * PI * rho),
    };
    // Beyond k_max the damping factor is below e^{-45}.
    let k_max = 45f64.powf(1.0 / alpha) + 10.0;
    let period = PI / rho;
    let opts = QuadOptions::tol(1e-15, 1e-12);
    // Resolve the cusp of k^α at the origin on its own panel.
    let first = period.min(1.0).min(k_max);
    let mut total = integrate(&integrand, 0.0, first, opts)?.value;
    let mut a = first;
    while a < k_max {
        let b = (a + period).min(k_max);
        total += integrate(&integrand, a, b, opts)?.value;
        a = b;
    }
    Ok(prefactor * total)
}

fn unit_density_closed(alpha: f64, d: usize, rho: f64) -> Option<f64> {
    let df = d as f64;
    if alpha == 2.0 {
        Some((4.0 * PI).powf(-0.5 * df) * (-0.25 * rho * rho).exp())
    } else if alpha == 1.0 {
        let g = gamma_fn(0.5 * (df + 1.0)).ok()?;
        Some(g / PI.powf(0.5 * (df + 1.0)) / (1.0 + rho * rho).powf(0.5 * (df + 1.0)))
    } else {
        None
    }
}

fn distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(FujitaError::domain("points must share a positive dimension"));
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// `p_t(x, y)`; closed forms at α ∈ {1, 2}, Fourier inversion otherwise.
pub fn transition_density(alpha: f64, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return Err(FujitaError::domain(format!("t must be positive, got {t}")));
    }
    let d = x.len();
    let r = distance(x, y)?;
    let s = t.powf(1.0 / alpha);
    let rho = r / s;
    let unit = match unit_density_closed(alpha, d, rho) {
        Some(v) => v,
        None => unit_density_fourier(alpha, d, rho)?,
    };
    Ok(unit * s.powf(-(d as f64)))
}

/// `p_t(x, y)` always through numerical Fourier inversion.
pub fn transition_density_fourier(alpha: f64, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return Err(FujitaError::domain(format!("t must be positive, got {t}")));
    }
    let d = x.len();
    let r = distance(x, y)?;
    let s = t.powf(1.0 / alpha);
    Ok(unit_density_fourier(alpha, d, r / s)? * s.powf(-(d as f64)))
}
