//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always visible. The
//! process fails if any criterion fails, except the extinction half of the
//! dichotomy criterion, which cannot be met (see `dichotomy`); its attainable
//! parts are still enforced.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fujita_core::ball::{
    boundary_exponent, calibrate_green_constant, exit_time_check, solve_ball_steady, symmetry_diagnostic, BallForcing, BallGrid,
    BallKernelParams, BallMesh, SolveControls, SymmetryOptions, ViolationKind,
};
use fujita_core::evolution::{dichotomy_experiment, run, semigroup_apply, OutcomeTag, ProblemSpec, RunControls};
use fujita_core::feynman_kac::{fk_compare, fk_estimate_with, FkParams, SolutionTrace};
use fujita_core::fraclap::{apply_spectral, PvOperator};
use fujita_core::grid::GridField;
use fujita_core::nonlinearity::{regime, NonlinearitySpec, Regime};
use fujita_core::quadrature::{gauss_legendre, tanh_sinh};
use fujita_core::stable::{sample_increment, stream_rng, transition_density, transition_density_fourier};
use fujita_core::steady::{
    eval_family, eval_singular, fourier_side_check, kelvin, kelvin_partner, riesz_residual, SteadyStateParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;
use statrs::function::gamma::ln_gamma;

/// Asymptotic Kolmogorov quantile at the 1% level: `D_crit = K / √n`.
const KS_K_99: f64 = 1.6276;

struct Verdict {
    pass: bool,
    detail: String,
    /// Set when the criterion fails for a documented reason that no
    /// implementation can overcome.
    unattainable: Option<String>,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self {
            pass,
            detail,
            unattainable: None,
        }
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------- 1

fn steady_residual() -> Result<Verdict, String> {
    let start = Instant::now();
    let p = SteadyStateParams::centered(1.0, 1, 0.5).map_err(|e| e.to_string())?;
    let exponent = p.exponent();
    let radii: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
    let scale = 1.0 / p.a_scale();
    let rep = riesz_residual(&|r| p.radial(r), 1, 0.5, exponent, &radii, scale).map_err(|e| e.to_string())?;
    let bumped = riesz_residual(&|r| 1.1 * p.radial(r), 1, 0.5, exponent, &[0.0], scale).map_err(|e| e.to_string())?;
    let r0 = bumped.residuals[0].abs();
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        exponent == 3.0 && rep.max_normalized <= 1e-3 && r0 >= 0.01 && within(elapsed, 60.0),
        format!(
            "p = {exponent}, max normalized residual {:.2e} (<= 1e-3), perturbed |R(0)| = {r0:.3} (>= 0.01), {:.1?} (< 60 s)",
            rep.max_normalized, elapsed
        ),
    ))
}

// ---------------------------------------------------------------- 2

fn laplacian_reduction() -> Result<Verdict, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d: u32 = rng.gen_range(3..=5);
        let a: f64 = rng.gen_range(0.05..20.0);
        let r: f64 = rng.gen_range(0.0..50.0);
        let df = f64::from(d);
        let p = SteadyStateParams::centered(a, d, 2.0).map_err(|e| e.to_string())?;
        let mut x = vec![0.0; d as usize];
        x[0] = r;
        let ours = eval_family(&p, &x);
        // A (d(d-2))^{(d-2)/2} / (d(d-2) + (A^{2/(d-2)} |x|)^2)^{(d-2)/2}
        let k = df * (df - 2.0);
        let s = a.powf(2.0 / (df - 2.0)) * r;
        let classical = a * k.powf(0.5 * (df - 2.0)) / (k + s * s).powf(0.5 * (df - 2.0));
        worst = worst.max(((ours - classical) / classical).abs());
    }
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        worst <= 1e-12 && within(elapsed, 1.0),
        format!("max relative difference {worst:.1e} over 100 tuples (<= 1e-12), {elapsed:.1?} (< 1 s)"),
    ))
}

// ---------------------------------------------------------------- 3

fn fourier_identity() -> Result<Verdict, String> {
    let start = Instant::now();
    let radii: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64 * k as f64).collect();
    let mut worst = 0.0f64;
    for (d, alpha) in [(1u32, 0.5), (3, 1.0)] {
        for pair in fourier_side_check(1.0, d, alpha, &radii).map_err(|e| e.to_string())? {
            worst = worst.max(((pair.lhs - pair.rhs) / pair.rhs).abs());
        }
    }
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        worst <= 1e-6 && within(elapsed, 30.0),
        format!("max relative lhs/rhs gap {worst:.1e} at 10 radii for (d,α) = (1,0.5), (3,1) (<= 1e-6), {elapsed:.1?} (< 30 s)"),
    ))
}

// ---------------------------------------------------------------- 4

fn kelvin_algebra() -> Result<Verdict, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut involution, mut closure, mut fixed) = (0.0f64, 0.0f64, 0.0f64);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    for _ in 0..100 {
        let d: u32 = rng.gen_range(1..=3);
        let alpha = rng.gen_range(0.1..f64::from(d).min(2.0) - 0.05);
        let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let amp = rng.gen_range(0.2..5.0);
        let p = SteadyStateParams::new(center.clone(), amp, d, alpha).map_err(|e| e.to_string())?;
        let u = |y: &[f64]| eval_family(&p, y);

        // K_z K_z u = u for an arbitrary inversion center z.
        let z: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ku = |y: &[f64]| kelvin(&u, &z, d, alpha, y).expect("away from z");
        let kku = kelvin(&ku, &z, d, alpha, &x).map_err(|e| e.to_string())?;
        involution = involution.max(rel(kku, u(&x)));

        // Inversion about the family's own center stays in the family.
        let partner = kelvin_partner(&p);
        let k_own = kelvin(&u, &center, d, alpha, &x).map_err(|e| e.to_string())?;
        closure = closure.max(rel(k_own, eval_family(&partner, &x)));

        // The singular solution is Kelvin invariant about the origin.
        let us = |y: &[f64]| eval_singular(d, alpha, y).expect("away from 0");
        fixed = fixed.max(rel(kelvin(&us, &vec![0.0; d as usize], d, alpha, &x).map_err(|e| e.to_string())?, us(&x)));
    }
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        involution <= 1e-10 && closure <= 1e-10 && fixed <= 1e-10 && within(elapsed, 1.0),
        format!("involution {involution:.1e}, family closure {closure:.1e}, u_sing fixed point {fixed:.1e} (all <= 1e-10), {elapsed:.1?} (< 1 s)"),
    ))
}

// ---------------------------------------------------------------- 5

fn operator_cross_validation() -> Result<Verdict, String> {
    let start = Instant::now();
    let (l, n) = (40.0, 4096);
    let wrap = move |y: f64| y - l * (y / l).round();
    let bump = move |x: &[f64]| (-wrap(x[0]).powi(2)).exp();
    let field = GridField::from_fn(1, l, n, |x| bump(x)).map_err(|e| e.to_string())?;
    let nodes: Vec<usize> = (0..n).filter(|&j| field.node(j).abs() <= 5.0).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for alpha in [0.5, 1.0, 1.5] {
        let spectral = apply_spectral(&field, alpha).map_err(|e| e.to_string())?;
        let pv = PvOperator::calibrate(alpha, 1).map_err(|e| e.to_string())?;
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for &j in &nodes {
            let s = spectral.values[j];
            let q = pv.apply_periodic_1d(&bump, field.node(j), l).map_err(|e| e.to_string())?;
            err = err.max((s - q).abs());
            scale = scale.max(s.abs());
        }
        let relative = err / scale;
        ok &= relative <= 1e-3;
        parts.push(format!("α={alpha}: {relative:.1e}"));
    }
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        ok && within(elapsed, 60.0),
        format!(
            "spectral vs PV, max error / max |Δ_α f| on |x| <= 5 ({} nodes): {} (<= 1e-3), {elapsed:.1?} (< 60 s)",
            nodes.len(),
            parts.join(", ")
        ),
    ))
}

// ---------------------------------------------------------------- 6

/// Cumulative distribution of the unit symmetric 0.5-stable law
/// (`E e^{iθX} = e^{-|θ|^{1/2}}`).
///
/// On `|x| >= 1` the convergent tail series
/// `P(X > x) = π⁻¹ Σ (-1)^{n+1} Γ(nα)/n! sin(nπα/2) x^{-nα}` is used; on
/// `[0, 1]` the Fourier-inverted density is integrated on a fine table.
struct HalfStableCdf {
    step: f64,
    cdf: Vec<f64>,
    /// Gauss nodes and density values per table panel, reused by quadratures.
    panels: Vec<Vec<(f64, f64, f64)>>,
}

const HALF: f64 = 0.5;

fn stable_series(x: f64, density: bool) -> f64 {
    let mut sum = 0.0;
    for n in 1..400 {
        let nf = n as f64;
        let na = nf * HALF;
        let log_mag = if density { ln_gamma(na + 1.0) - (na + 1.0) * x.ln() } else { ln_gamma(na) - na * x.ln() } - ln_gamma(nf + 1.0);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * (0.5 * PI * na).sin() * log_mag.exp();
        sum += term;
        if log_mag < -45.0 {
            break;
        }
    }
    sum / PI
}

impl HalfStableCdf {
    fn new(panels: usize) -> Result<Self, String> {
        let step = 1.0 / panels as f64;
        let (gx, gw) = gauss_legendre(4);
        let mut cdf = vec![0.5];
        let mut table = Vec::with_capacity(panels);
        for k in 0..panels {
            let a = k as f64 * step;
            let mut acc = 0.0;
            let mut nodes = Vec::new();
            for (t, w) in gx.iter().zip(&gw) {
                let y = a + 0.5 * step * (t + 1.0);
                let p = transition_density_fourier(HALF, 1.0, &[0.0], &[y]).map_err(|e| e.to_string())?;
                acc += 0.5 * step * w * p;
                nodes.push((y, 0.5 * step * w, p));
            }
            cdf.push(cdf[k] + acc);
            table.push(nodes);
        }
        Ok(Self { step, cdf, panels: table })
    }

    fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        let upper = if ax >= 1.0 {
            1.0 - stable_series(ax, false)
        } else {
            let s = ax / self.step;
            let k = (s.floor() as usize).min(self.cdf.len() - 2);
            let f = s - k as f64;
            (1.0 - f) * self.cdf[k] + f * self.cdf[k + 1]
        };
        if x >= 0.0 {
            upper
        } else {
            1.0 - upper
        }
    }
}

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn transition_densities() -> Result<Verdict, String> {
    let start = Instant::now();
    // Closed forms written out independently of the library.
    let cauchy = |d: usize, t: f64, r: f64| {
        let df = d as f64;
        (ln_gamma(0.5 * (df + 1.0)).exp() / PI.powf(0.5 * (df + 1.0))) * t / (t * t + r * r).powf(0.5 * (df + 1.0))
    };
    let gauss = |d: usize, t: f64, r: f64| (4.0 * PI * t).powf(-0.5 * d as f64) * (-r * r / (4.0 * t)).exp();
    let mut worst_closed = 0.0f64;
    let mut worst_fourier = 0.0f64;
    for d in 1..=3usize {
        for &t in &[0.5, 1.0, 2.0] {
            for &r in &[0.0, 0.3, 1.0, 2.5] {
                let x = vec![0.0; d];
                let mut y = vec![0.0; d];
                y[0] = r;
                for (alpha, exact) in [(1.0, cauchy(d, t, r)), (2.0, gauss(d, t, r))] {
                    let closed = transition_density(alpha, t, &x, &y).map_err(|e| e.to_string())?;
                    let fourier = transition_density_fourier(alpha, t, &x, &y).map_err(|e| e.to_string())?;
                    worst_closed = worst_closed.max(((closed - exact) / exact).abs());
                    worst_fourier = worst_fourier.max(((fourier - exact) / exact).abs());
                }
            }
        }
    }

    let n = 100_000;
    let crit = KS_K_99 / (n as f64).sqrt();
    let draw = |alpha: f64, d: usize, stream: u64| -> Result<Vec<Vec<f64>>, String> {
        let mut rng = stream_rng(606, stream);
        (0..n).map(|_| sample_increment(alpha, 1.0, d, &mut rng).map_err(|e| e.to_string())).collect()
    };
    let half = HalfStableCdf::new(1000)?;
    let seam = (half.cdf[half.cdf.len() - 1] - (1.0 - stable_series(1.0, false))).abs();
    let first = |v: Vec<Vec<f64>>| v.into_iter().map(|s| s[0]).collect::<Vec<f64>>();
    let radial = |v: Vec<Vec<f64>>| v.into_iter().map(|s| norm(&s)).collect::<Vec<f64>>();
    let stats = [
        ("α=0.5 d=1", ks_statistic(first(draw(0.5, 1, 0)?), |x| half.eval(x))),
        ("α=1 d=1", ks_statistic(first(draw(1.0, 1, 1)?), |x| 0.5 + x.atan() / PI)),
        ("α=2 d=1", ks_statistic(first(draw(2.0, 1, 2)?), |x| 0.5 * (1.0 + erf(0.5 * x)))),
        ("α=1 d=2 |X|", ks_statistic(radial(draw(1.0, 2, 3)?), |r| 1.0 - 1.0 / (1.0 + r * r).sqrt())),
        ("α=2 d=2 |X|", ks_statistic(radial(draw(2.0, 2, 4)?), |r| 1.0 - (-0.25 * r * r).exp())),
    ];
    let ks_ok = stats.iter().all(|(_, d)| *d < crit);
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        worst_closed <= 1e-12 && worst_fourier <= 1e-6 && seam <= 1e-7 && ks_ok && within(elapsed, 120.0),
        format!(
            "closed forms {worst_closed:.1e}, Fourier inversion {worst_fourier:.1e} (<= 1e-6); KS D (crit {crit:.4}): {}; α=0.5 oracle seam {seam:.1e}; {elapsed:.1?} (< 120 s)",
            stats.iter().map(|(k, d)| format!("{k} {d:.4}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

// ---------------------------------------------------------------- 7

fn dichotomy_spec() -> ProblemSpec {
    ProblemSpec {
        d: 1,
        alpha: 0.5,
        nonlinearity: NonlinearitySpec::power_law(1.0, 2.0).expect("valid"),
        l: 2.0e4,
        n: 1 << 19,
    }
}

fn base_profile(spec: &ProblemSpec, amplitude: f64) -> Result<GridField, String> {
    let base = SteadyStateParams::centered(1.0, 1, 0.5).map_err(|e| e.to_string())?;
    GridField::from_fn(spec.d, spec.l, spec.n, |x| amplitude * base.radial(x[0].abs())).map_err(|e| e.to_string())
}

/// Whole-space `P_t φ(0)` for `φ = c·u_{0,1}`, `d = 1`, `α = 1/2`, by
/// quadrature against the transition density. `G ≥ 0` makes the solution
/// dominate this value at every time.
fn semigroup_lower_bound(t: f64, c: f64, cdf: &HalfStableCdf) -> Result<f64, String> {
    let base = SteadyStateParams::centered(1.0, 1, 0.5).map_err(|e| e.to_string())?;
    // p_t(y) = t^{-2} p_1(y / t²).
    let s = t * t;
    let phi = |y: f64| c * base.radial(y);
    let near: f64 = cdf.panels.iter().flatten().map(|(z, w, p)| w * p * phi(s * z)).sum();
    // ∫_1^∞ p_1(z) φ(s z) dz with z = 1/w.
    let far = tanh_sinh(
        |w, _, _| {
            // The integrand tends to a finite constant as w → 0; cutting
            // below 1e-12 avoids 0/0 from underflow at negligible cost.
            if w < 1e-12 {
                return 0.0;
            }
            stable_series(1.0 / w, true) * phi(s / w) / (w * w)
        },
        0.0,
        1.0,
        1e-10,
    )
    .map_err(|e| e.to_string())?
    .value;
    Ok(2.0 * (near + far))
}

fn dichotomy() -> Result<Verdict, String> {
    let start = Instant::now();
    let spec = dichotomy_spec();
    let base = base_profile(&spec, 1.0)?;
    let controls = RunControls {
        t_max: 50.0,
        checkpoints: vec![0.25, 0.3, 1.0, 5.0, 10.0, 25.0, 50.0],
        ..RunControls::default()
    };
    let res = dichotomy_experiment(&spec, &base, 0.5, &controls).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let phi_sup = 0.5 * base.sup_norm();
    let threshold = controls.delta_ext * phi_sup;
    let window = controls.final_window;
    let lower_trace = &res.lower.supnorm_trace;
    let cut = (1.0 - window) * res.lower.t_final;
    let tail: Vec<f64> = lower_trace.iter().filter(|(t, _)| *t >= cut).map(|(_, s)| *s).collect();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let final_sup = res.lower.final_sup();
    let bound = semigroup_lower_bound(50.0, 0.5, &HalfStableCdf::new(1000)?)?;

    let upper_ok = res.upper.tag == OutcomeTag::BlewUp;
    let ordering_ok = res.ordering_violation <= 1e-10 * phi_sup;
    let lower_ok = res.lower.tag == OutcomeTag::Extinct;
    let bound_consistent = final_sup >= bound * (1.0 - 1e-3);
    let detail = format!(
        "upper {:?} at t≈{:.4}; lower {:?} with ‖u(50)‖ = {final_sup:.3e} ({:.2}% of ‖φ‖), monotone over last {:.0}%: {monotone}; \
         ordering violation {:.1e}; whole-space bound P_50φ(0) = {bound:.3e} ({:.2}% of ‖φ‖) vs extinction threshold {threshold:.1e}; {elapsed:.1?} (< 10 min)",
        res.upper.tag,
        res.upper.t_blow_estimate.unwrap_or(f64::NAN),
        res.lower.tag,
        100.0 * final_sup / phi_sup,
        100.0 * window,
        res.ordering_violation,
        100.0 * bound / phi_sup,
    );
    let attainable = upper_ok && ordering_ok && monotone && bound_consistent && within(elapsed, 600.0);
    let mut verdict = Verdict::new(attainable && lower_ok, detail);
    if !lower_ok && attainable && bound > threshold {
        verdict.unattainable = Some(format!(
            "u(t) >= P_tφ and P_50φ(0) = {bound:.2e} exceeds δ_ext·‖φ‖ = {threshold:.1e}, so no solver can classify the lower branch Extinct by T_max = 50"
        ));
    }
    Ok(verdict)
}

// ---------------------------------------------------------------- 8

fn fujita_regime() -> Result<Verdict, String> {
    let start = Instant::now();
    let spec = ProblemSpec {
        d: 1,
        alpha: 0.5,
        nonlinearity: NonlinearitySpec::power_law(1.0, 0.25).expect("valid"),
        l: 2.0e4,
        n: 1 << 19,
    };
    let class = regime(1, 0.5, &spec.nonlinearity).map_err(|e| e.to_string())?;
    let phi = GridField::from_fn(1, spec.l, spec.n, |x| 0.05 * (-x[0] * x[0]).exp()).map_err(|e| e.to_string())?;
    let controls = RunControls {
        t_max: 200.0,
        ..RunControls::default()
    };
    let out = run(&spec, &phi, &controls).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        class == Regime::BlowUpForAll && out.tag == OutcomeTag::BlewUp && out.t_final < 200.0 && within(elapsed, 600.0),
        format!(
            "(slow) regime {class:?} (d = 1 <= α/β = 2); 0.05·e^(-x²) {:?} at t≈{:.2} (< 200) after {} steps, {elapsed:.1?} (< 10 min)",
            out.tag,
            out.t_blow_estimate.unwrap_or(out.t_final),
            out.steps
        ),
    ))
}

// ---------------------------------------------------------------- 9

fn feynman_kac() -> Result<Verdict, String> {
    let start = Instant::now();
    // The lower-branch datum of the dichotomy (0.5·u_{0,1}, G = z³); the
    // box only has to hold the paths up to t = 0.5.
    let spec = ProblemSpec {
        l: 64.0,
        n: 4096,
        ..dichotomy_spec()
    };
    let phi = base_profile(&spec, 0.5)?;
    let (t, x) = (0.5, [0.0]);
    let trace = SolutionTrace::record(&spec, &phi, t, 5e-4).map_err(|e| e.to_string())?;
    let cmp = fk_compare(&trace, t, &x, 100_000, 200, 7).map_err(|e| e.to_string())?;
    let control = fk_estimate_with(
        &trace,
        t,
        &x,
        FkParams {
            n_paths: 100_000,
            n_steps: 200,
            seed: 8,
            potential_scale: 0.0,
        },
    )
    .map_err(|e| e.to_string())?;
    let heat = semigroup_apply(&phi, spec.alpha, t).map_err(|e| e.to_string())?.interpolate(&x);
    let z_control = (control.estimate - heat) / control.stderr;
    let elapsed = start.elapsed();
    Ok(Verdict::new(
        cmp.z_score.abs() <= 3.0 && z_control.abs() <= 3.0 && within(elapsed, 300.0),
        format!(
            "FK {:.5} ± {:.1e} (step-halving bias {:.1e}) vs grid {:.5}: z = {:.2}; zero-potential control z = {z_control:.2} (|z| <= 3); {elapsed:.1?} (< 5 min)",
            cmp.estimate, cmp.stderr, cmp.step_bias, cmp.grid_value, cmp.z_score
        ),
    ))
}

// ---------------------------------------------------------------- 10

fn ball() -> Result<Verdict, String> {
    let start = Instant::now();
    let e = |e: fujita_core::FujitaError| e.to_string();
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst = 0.0f64;
    for d in 1..=3u32 {
        for alpha in [0.5, 1.0, 1.5] {
            let params = BallKernelParams::unit(alpha, d).map_err(e)?;
            for dist in [0.0, 0.2, 0.4, 0.6, 0.8] {
                worst = worst.max((params.poisson_mass(dist).map_err(e)? - 1.0).abs());
            }
        }
    }
    ok &= worst <= 1e-6;
    notes.push(format!("Poisson mass error {worst:.1e}"));

    let params = BallKernelParams::unit(1.0, 1).map_err(e)?;
    for (dist, seed) in [(0.0, 101), (0.5, 102)] {
        let check = exit_time_check(&params, dist, 100_000, seed).map_err(e)?;
        ok &= check.z_score.abs() <= 3.0;
        notes.push(format!("E_xτ at |x|={dist}: z = {:.2}", check.z_score));
    }
    let cal = calibrate_green_constant(&params, 0.0, 100_000, 103).map_err(e)?;
    let z_cal = (cal.mean - params.c_green) / cal.stderr;
    ok &= z_cal.abs() <= 3.0;
    notes.push(format!("c_green MC {:.5} vs {:.5}: z = {z_cal:.2}", cal.mean, params.c_green));

    for alpha in [1.0, 1.5] {
        let mesh = BallMesh::graded(1, 64).map_err(e)?;
        let sol = solve_ball_steady(BallForcing::Tanh { a: 0.2, b: 0.3 }, alpha, &mesh, SolveControls::default()).map_err(e)?;
        let fit = boundary_exponent(&sol).map_err(e)?;
        let good = sol.symmetry_defect <= 1e-6 && (fit.slope - 0.5 * alpha).abs() <= 0.1 && sol.min_interior(1.0 - 1e-12) > 0.0;
        ok &= good;
        notes.push(format!("α={alpha}: defect {:.1e}, boundary slope {:.3} (α/2 = {})", sol.symmetry_defect, fit.slope, 0.5 * alpha));
    }
    let disc = solve_ball_steady(BallForcing::Affine { a: 1.0, b: 0.5 }, 1.0, &BallMesh::graded(2, 24).map_err(e)?, SolveControls::default())
        .map_err(e)?;
    ok &= disc.symmetry_defect <= 1e-6 && disc.min_interior(1.0 - 1e-12) > 0.0;

    let steady = SteadyStateParams::centered(1.0, 2, 1.0).map_err(e)?;
    let radial = BallGrid::from_fn(2, 121, |x| steady.radial(norm(x))).map_err(e)?;
    let rep = symmetry_diagnostic(&radial, &[1.0, 0.0], SymmetryOptions::default()).map_err(e)?;
    ok &= rep.lambda_sup.abs() <= rep.lambda_resolution && rep.violations.is_empty();
    notes.push(format!("radial λ_sup = {:.3} (± {})", rep.lambda_sup, rep.lambda_resolution));

    let bump = BallGrid::from_fn(2, 121, |x| (1.0 - 4.0 * ((x[0] - 0.3).powi(2) + x[1] * x[1])).max(0.0)).map_err(e)?;
    let rep = symmetry_diagnostic(&bump, &[-1.0, 0.0], SymmetryOptions::default()).map_err(e)?;
    let near_bump = rep.violations.iter().all(|v| (v.point[0] - 0.3).hypot(v.point[1]) < 0.75);
    let reflections = rep.violations.iter().filter(|v| v.kind == ViolationKind::Reflection).count();
    ok &= rep.lambda_sup < 0.0 && reflections > 0 && near_bump;
    notes.push(format!("shifted bump λ_sup = {:.3} with {} violations", rep.lambda_sup, rep.violations.len()));

    let elapsed = start.elapsed();
    Ok(Verdict::new(ok && within(elapsed, 600.0), format!("{}; {elapsed:.1?} (< 10 min)", notes.join("; "))))
}

type Check = fn() -> Result<Verdict, String>;

fn main() -> ExitCode {
    let criteria: [(u32, &str, Check); 10] = [
        (1, "steady-state Riesz residual", steady_residual),
        (2, "α = 2 reduction", laplacian_reduction),
        (3, "Fourier-side identity", fourier_identity),
        (4, "Kelvin algebra", kelvin_algebra),
        (5, "spectral vs PV operator", operator_cross_validation),
        (6, "transition densities and sampler", transition_densities),
        (7, "blow-up/extinction dichotomy", dichotomy),
        (8, "Fujita regime", fujita_regime),
        (9, "Feynman–Kac consistency", feynman_kac),
        (10, "ball module", ball),
    ];
    let mut hard_failures = 0;
    for (id, title, check) in criteria {
        let verdict = check().unwrap_or_else(|err| Verdict::new(false, format!("error: {err}")));
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{title}]: {status} — {}", verdict.detail);
        match (&verdict.unattainable, verdict.pass) {
            (_, true) => {}
            (Some(why), false) => println!("             known unattainable: {why}"),
            (None, false) => hard_failures += 1,
        }
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{hard_failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
