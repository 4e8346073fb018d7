//! Numerical integration used throughout the crate.
//!
//! The workhorse is a globally adaptive Gauss–Kronrod (7/15) rule. Semi-infinite
//! ranges are mapped onto `[0, 1)`. A step-halving trapezoidal rule is provided
//! for integrands on the real line that decay double-exponentially, where it
//! converges geometrically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FujitaError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over the finite range `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(FujitaError::domain(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Quad {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(FujitaError::numerical(
                "non-finite integrand",
                format!("range [{a}, {b}], {evaluations} evaluations"),
            ));
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(FujitaError::numerical(
                "adaptive quadrature did not converge",
                format!(
                    "range [{a}, {b}], value {total:e}, error estimate {total_err:e}, {} panels",
                    heap.len()
                ),
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point; accept it.
            heap.push(Panel { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of incremental updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Quad {
        value,
        error,
        evaluations,
    })
}

/// Integrates `f` over `[a, ∞)` using the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: QuadOptions) -> Result<Quad> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let v = f(a + t / s);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Sums adaptive integrals over consecutive panels `[breaks[i], breaks[i+1]]`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], opts: QuadOptions) -> Result<Quad> {
    let mut acc = Quad {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let q = integrate(&mut f, w[0], w[1], opts)?;
        acc.value += q.value;
        acc.error += q.error;
        acc.evaluations += q.evaluations;
    }
    Ok(acc)
}

/// Trapezoidal rule with step halving on `[lo, hi]` for integrands that are
/// negligible (double-exponentially small) at both ends.
///
/// Stops when two successive refinements agree to `rel_tol`.
pub fn trapezoid_decaying<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<Quad> {
    let mut n = 64usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum: f64 = (0..=n).map(|i| f(lo + i as f64 * h)).sum::<f64>();
    let mut evaluations = n + 1;
    let mut value = sum * h;
    for _ in 0..14 {
        let mut extra = 0.0;
        for i in 0..n {
            extra += f(lo + (i as f64 + 0.5) * h);
        }
        evaluations += n;
        sum += extra;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        let diff = (next - value).abs();
        value = next;
        if !value.is_finite() {
            break;
        }
        if diff <= rel_tol * value.abs() {
            return Ok(Quad {
                value,
                error: diff,
                evaluations,
            });
        }
    }
    Err(FujitaError::numerical(
        "trapezoidal refinement did not converge",
        format!("range [{lo}, {hi}], last value {value:e}, {evaluations} evaluations"),
    ))
}

/// Tanh-sinh (double-exponential) rule on `[a, b]` for integrands with
/// algebraic or logarithmic endpoint singularities.
///
/// `f` receives `(x, x - a, b - x)` with the two offsets computed without
/// cancellation, so integrands can form `(x - a)^{-s}` accurately.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<Quad> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(FujitaError::domain(format!("tanh-sinh needs a finite range with b > a, got [{a}, {b}]")));
    }
    const T_MAX: f64 = 6.5;
    let width = b - a;
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut eval = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        let dl = width / (1.0 + (-2.0 * u).exp());
        let dr = width / (1.0 + (2.0 * u).exp());
        if dl == 0.0 || dr == 0.0 {
            return 0.0;
        }
        let x = if dl <= dr { a + dl } else { b - dr };
        let c = u.cosh();
        let w = 0.5 * width * half_pi * t.cosh() / (c * c);
        if w == 0.0 {
            return 0.0;
        }
        let v = f(x, dl, dr);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    let mut h = 0.5;
    let n0 = (T_MAX / h) as i64;
    let mut sum: f64 = (-n0..=n0).map(|k| eval(k as f64 * h)).sum();
    let mut evaluations = (2 * n0 + 1) as usize;
    let mut value = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let n = (T_MAX / h) as i64;
        let mut extra = 0.0;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            extra += eval(k as f64 * h);
            evaluations += 1;
            k += 2;
        }
        sum += extra;
        let next = sum * h;
        let diff = (next - value).abs();
        value = next;
        if !value.is_finite() {
            break;
        }
        if diff <= rel_tol * value.abs() || diff < 1e-300 {
            return Ok(Quad {
                value,
                error: diff,
                evaluations,
            });
        }
    }
    Err(FujitaError::numerical(
        "tanh-sinh refinement did not converge",
        format!("range [{a}, {b}], last value {value:e}, {evaluations} evaluations"),
    ))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x| x.powf(-0.5), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let q = tanh_sinh(|_, dl, _| dl.powf(-0.9), 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - 10.0).abs() < 1e-9, "{}", q.value);
        let q = tanh_sinh(|_, dl, dr| (dl * dr).powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - std::f64::consts::PI).abs() < 1e-11, "{}", q.value);
        let q = tanh_sinh(|x, _, _| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value + 1.0).abs() < 1e-12);
        let q = tanh_sinh(|x, _, _| x.exp(), -1.0, 2.0, 1e-13).unwrap();
        assert!((q.value - (2f64.exp() - (-1f64).exp())).abs() < 1e-12);
        assert!(tanh_sinh(|x, _, _| x, 1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = integrate_to_infinity(|x| (-x).exp(), 0.0, QuadOptions::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_gaussian() {
        let q = trapezoid_decaying(|x| (-x * x).exp(), -10.0, 10.0, 1e-14).unwrap();
        assert!((q.value - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre(20);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn divergent_integrand_reports_diagnostics() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, QuadOptions { max_intervals: 50, ..Default::default() })
            .unwrap_err();
        assert!(matches!(err, FujitaError::Numerical { .. }));
    }
}
