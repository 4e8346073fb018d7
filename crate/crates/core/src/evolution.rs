//! Mild-solution integration of `∂_t u = Δ_α u + G(u)` on a periodic grid,
//! blow-up / extinction classification, and the comparison dichotomy.

use serde::{Deserialize, Serialize};

use crate::error::{FujitaError, Result};
use crate::grid::{check_grid, multiplier, GridField, SpectralWorkspace};
use crate::nonlinearity::NonlinearitySpec;
use crate::stable::check_alpha;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub d: usize,
    pub alpha: f64,
    pub nonlinearity: NonlinearitySpec,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_grid(self.d, self.l, self.n)?;
        self.nonlinearity.validate()
    }

    fn check_field(&self, field: &GridField) -> Result<()> {
        if field.d != self.d || field.n != self.n || (field.l - self.l).abs() > 1e-12 * self.l {
            return Err(FujitaError::validation(format!(
                "field grid (d={}, L={}, N={}) does not match problem grid (d={}, L={}, N={})",
                field.d, field.l, field.n, self.d, self.l, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeTag {
    BlewUp,
    Extinct,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub tag: OutcomeTag,
    pub t_blow_estimate: Option<f64>,
    pub supnorm_trace: Vec<(f64, f64)>,
    /// Log-log slope of `‖u‖_∞` against `t` over the final window.
    pub decay_rate_estimate: Option<f64>,
    pub steps: usize,
    pub t_final: f64,
    pub min_value: f64,
    /// Fields at the requested checkpoint times that were reached.
    #[serde(skip)]
    pub snapshots: Vec<(f64, GridField)>,
    /// State at `t_final` when it is still finite.
    #[serde(skip)]
    pub final_field: Option<GridField>,
}

impl SimOutcome {
    pub fn final_sup(&self) -> f64 {
        self.supnorm_trace.last().map_or(0.0, |p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunControls {
    pub t_max: f64,
    pub dt_max: f64,
    /// `dt = min(dt_max, safety / G'(‖u‖_∞))`.
    pub safety: f64,
    pub m_max: f64,
    pub contraction: f64,
    /// Extinction threshold relative to `‖φ‖_∞`.
    pub delta_ext: f64,
    pub final_window: f64,
    pub max_steps: usize,
    pub checkpoints: Vec<f64>,
}

impl Default for RunControls {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            dt_max: 0.1,
            safety: 0.05,
            m_max: 1e6,
            contraction: 1e3,
            delta_ext: 1e-3,
            final_window: 0.2,
            max_steps: 2_000_000,
            checkpoints: Vec::new(),
        }
    }
}

impl RunControls {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_max", self.t_max),
            ("dt_max", self.dt_max),
            ("safety", self.safety),
            ("m_max", self.m_max),
            ("contraction", self.contraction),
            ("delta_ext", self.delta_ext),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FujitaError::validation(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.final_window > 0.0 && self.final_window <= 1.0) {
            return Err(FujitaError::validation(format!("final_window must lie in (0,1], got {}", self.final_window)));
        }
        Ok(())
    }
}

/// Stateful propagator: caches the FFT plan and the last `exp(-dt|k|^α)` table.
pub struct Propagator {
    spec: ProblemSpec,
    workspace: SpectralWorkspace,
    symbol: Vec<f64>,
    cached: Vec<f64>,
    cached_dt: f64,
}

impl Propagator {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let alpha = spec.alpha;
        Ok(Self {
            spec: spec.clone(),
            workspace: SpectralWorkspace::new(spec.d, spec.n),
            symbol: multiplier(spec.d, spec.l, spec.n, |k| k.powf(alpha)),
            cached: Vec::new(),
            cached_dt: f64::NAN,
        })
    }

    pub fn semigroup(&mut self, values: &mut [f64], t: f64) {
        if t == 0.0 {
            return;
        }
        if t != self.cached_dt {
            self.cached = self.symbol.iter().map(|s| (-t * s).exp()).collect();
            self.cached_dt = t;
        }
        self.workspace.apply_multiplier(values, &self.cached);
    }

    /// `u ← P_dt u`, then `u ← max(0, u + dt·G(u))`.
    pub fn step(&mut self, values: &mut [f64], dt: f64) {
        self.semigroup(values, dt);
        let g = &self.spec.nonlinearity;
        for v in values.iter_mut() {
            let z = v.max(0.0);
            *v = (z + dt * g.eval_unchecked(z)).max(0.0);
        }
    }
}

/// `P_t field` through the multiplier `exp(-t (2π‖k‖/L)^α)`.
pub fn semigroup_apply(field: &GridField, alpha: f64, t: f64) -> Result<GridField> {
    check_alpha(alpha)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FujitaError::domain(format!("semigroup time must be non-negative, got {t}")));
    }
    let mut out = field.clone();
    if t == 0.0 {
        return Ok(out);
    }
    let m = multiplier(field.d, field.l, field.n, |k| (-t * k.powf(alpha)).exp());
    SpectralWorkspace::new(field.d, field.n).apply_multiplier(&mut out.values, &m);
    Ok(out)
}

pub fn step(field: &GridField, spec: &ProblemSpec, dt: f64) -> Result<GridField> {
    spec.check_field(field)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FujitaError::domain(format!("time step must be positive, got {dt}")));
    }
    if field.values.iter().any(|v| *v < 0.0) {
        return Err(FujitaError::domain("step requires a non-negative field"));
    }
    let mut out = field.clone();
    Propagator::new(spec)?.step(&mut out.values, dt);
    Ok(out)
}

pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn final_window(trace: &[(f64, f64)], frac: f64) -> &[(f64, f64)] {
    let k = ((trace.len() as f64 * frac).ceil() as usize).clamp(2.min(trace.len()), trace.len());
    &trace[trace.len() - k..]
}

/// Zero of the linear fit of `‖u‖^{-β}` against `t` over the final window.
fn blow_time_estimate(trace: &[(f64, f64)], beta: f64, frac: f64) -> Option<f64> {
    let w = final_window(trace, frac);
    let (ts, ys): (Vec<f64>, Vec<f64>) = w.iter().filter(|p| p.1.is_finite() && p.1 > 0.0).map(|p| (p.0, p.1.powf(-beta))).unzip();
    let (slope, icpt) = linear_fit(&ts, &ys)?;
    (slope < 0.0).then(|| -icpt / slope)
}

fn decay_rate(trace: &[(f64, f64)], frac: f64) -> Option<f64> {
    let w = final_window(trace, frac);
    let (ts, ys): (Vec<f64>, Vec<f64>) = w.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).unzip();
    linear_fit(&ts, &ys).map(|f| f.0)
}

/// Integrates from `phi` until blow-up is certified, `t_max` is reached, or
/// the step budget runs out.
pub fn run(spec: &ProblemSpec, phi: &GridField, controls: &RunControls) -> Result<SimOutcome> {
    spec.validate()?;
    controls.validate()?;
    spec.check_field(phi)?;
    if phi.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(FujitaError::domain("initial datum must be non-negative and finite"));
    }
    let mut prop = Propagator::new(spec)?;
    let mut u = phi.values.clone();
    let phi_sup = phi.sup_norm();
    let g = &spec.nonlinearity;
    let mut checkpoints: Vec<f64> = controls.checkpoints.iter().copied().filter(|c| *c > 0.0 && *c <= controls.t_max).collect();
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();
    let mut next_cp = 0;
    let mut snapshots = Vec::new();

    let mut t = 0.0;
    let mut sup = phi_sup;
    let mut trace = vec![(0.0, sup)];
    let mut dt_initial = None;
    let mut steps = 0;
    let mut tag = OutcomeTag::Undecided;
    let mut min_value = phi.values.iter().copied().fold(f64::INFINITY, f64::min);

    while t < controls.t_max && steps < controls.max_steps {
        let deriv = g.derivative(sup);
        let mut dt = if deriv > 0.0 { controls.dt_max.min(controls.safety / deriv) } else { controls.dt_max };
        let dt0 = *dt_initial.get_or_insert(dt);
        let collapsed = dt0 / dt >= controls.contraction;
        if sup > controls.m_max && collapsed {
            tag = OutcomeTag::BlewUp;
            break;
        }
        let mut target = controls.t_max;
        if let Some(&cp) = checkpoints.get(next_cp) {
            target = target.min(cp);
        }
        if t + dt >= target * (1.0 - 1e-12) {
            dt = target - t;
        }
        prop.step(&mut u, dt);
        steps += 1;
        t = if t + dt >= target * (1.0 - 1e-12) { target } else { t + dt };
        sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !sup.is_finite() {
            // Overflow inside the explicit reaction update is itself a
            // collapse certificate once dt has been contracting.
            trace.push((t, f64::INFINITY));
            tag = if sup > controls.m_max && dt0 / dt >= controls.contraction.sqrt() {
                OutcomeTag::BlewUp
            } else {
                OutcomeTag::Undecided
            };
            break;
        }
        min_value = min_value.min(u.iter().copied().fold(f64::INFINITY, f64::min));
        trace.push((t, sup));
        if checkpoints.get(next_cp).is_some_and(|cp| *cp == t) {
            snapshots.push((t, GridField { values: u.clone(), ..phi.clone() }));
            next_cp += 1;
        }
    }

    let mut t_blow = None;
    let mut rate = None;
    if tag == OutcomeTag::BlewUp {
        let beta = g.beta;
        let finite: Vec<(f64, f64)> = trace.iter().copied().filter(|p| p.1.is_finite()).collect();
        t_blow = blow_time_estimate(&finite, beta, controls.final_window).map(|e| e.max(t)).or(Some(t));
    } else if t >= controls.t_max {
        rate = decay_rate(&trace, controls.final_window);
        let window = final_window(&trace, controls.final_window);
        let monotone = window.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
        if sup < controls.delta_ext * phi_sup && monotone || phi_sup == 0.0 {
            tag = OutcomeTag::Extinct;
        }
    }
    Ok(SimOutcome {
        tag,
        t_blow_estimate: t_blow,
        supnorm_trace: trace,
        decay_rate_estimate: rate,
        steps,
        t_final: t,
        min_value,
        snapshots,
        final_field: u.iter().all(|v| v.is_finite()).then(|| GridField { values: u, ..phi.clone() }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyResult {
    pub eps: f64,
    pub lower: SimOutcome,
    pub upper: SimOutcome,
    /// `max (u_lower - u_upper)_+` over common checkpoints.
    pub ordering_violation: f64,
}

/// Runs `(1-ε)·base` and `(1+ε)·base` side by side.
pub fn dichotomy_experiment(spec: &ProblemSpec, base: &GridField, eps: f64, controls: &RunControls) -> Result<DichotomyResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FujitaError::domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let lower_phi = base.scaled(1.0 - eps);
    let upper_phi = base.scaled(1.0 + eps);
    let (lower, upper) = rayon::join(|| run(spec, &lower_phi, controls), || run(spec, &upper_phi, controls));
    let (lower, upper) = (lower?, upper?);
    let mut violation = 0.0f64;
    for ((tl, fl), (tu, fu)) in lower.snapshots.iter().zip(&upper.snapshots) {
        debug_assert_eq!(tl, tu);
        for (a, b) in fl.values.iter().zip(&fu.values) {
            violation = violation.max(a - b);
        }
    }
    Ok(DichotomyResult {
        eps,
        lower,
        upper,
        ordering_violation: violation,
    })
}
