//! The downward Liouville flow on Sym^2(C) and the flow-defined functions
//! `Delta` and `c`.

use crate::error::FlowError;
use crate::geometry::metric::downward_state;
use crate::geometry::potential::radial_profile;
use crate::geometry::{ComplexValue, SteinParams, SymPoint};
use crate::ode::{bisect_event, Dopri5, StepControl};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSettings {
    pub max_time: f64,
    pub escape_radius: f64,
    /// Relative local error per step.
    pub step_tolerance: f64,
    pub stall_threshold: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings { max_time: 60.0, escape_radius: 1e3, step_tolerance: 1e-9, stall_threshold: 1e-10 }
    }
}

impl FlowSettings {
    /// Defaults scaled to the smoothing: escape radius `10^3 max(1, eps)`.
    pub fn for_params(params: &SteinParams) -> Self {
        FlowSettings { escape_radius: 1e3 * params.epsilon().max(1.0), ..FlowSettings::default() }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.max_time) {
            return Err(FlowError::InvalidSettings("max_time must be positive"));
        }
        if !positive(self.escape_radius) {
            return Err(FlowError::InvalidSettings("escape_radius must be positive"));
        }
        if !positive(self.step_tolerance) {
            return Err(FlowError::InvalidSettings("step_tolerance must be positive"));
        }
        if !positive(self.stall_threshold) {
            return Err(FlowError::InvalidSettings("stall_threshold must be positive"));
        }
        Ok(())
    }

    pub fn with_tolerance(self, step_tolerance: f64) -> Self {
        FlowSettings { step_tolerance, ..self }
    }

    pub(crate) fn control(&self) -> StepControl {
        StepControl { rtol: self.step_tolerance, ..StepControl::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Escaped,
    MaxTime,
    NearCritical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeData {
    pub time: f64,
    /// Signs of the real parts, smaller first: `(-1,-1)`, `(-1,1)` or `(1,1)`.
    pub signs: (i8, i8),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, SymPoint)>,
    pub termination: Termination,
    pub escape: Option<EscapeData>,
    /// For `NearCritical`, the stalled point (the other one escaped).
    pub stalled: Option<ComplexValue>,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }

    pub fn final_point(&self) -> SymPoint {
        self.samples.last().expect("trajectory has an initial sample").1
    }
}

/// Real parts of the pair at a state, smaller first.
pub(crate) fn sorted_reals(s: &[f64; 4]) -> (f64, f64) {
    let root = ComplexValue::new(s[2], s[3]).sqrt();
    let (a, b) = (s[0] - root.re, s[0] + root.re);
    (a.min(b), a.max(b))
}

/// The pair at a state, sorted by real part.
pub(crate) fn sorted_pair(s: &[f64; 4]) -> (ComplexValue, ComplexValue) {
    let z = ComplexValue::new(s[0], s[1]);
    let root = ComplexValue::new(s[2], s[3]).sqrt();
    // principal root has Re >= 0
    (z - root, z + root)
}

fn w_norm(s: &[f64; 4]) -> f64 {
    s[2].hypot(s[3])
}

/// Closed-form downward flow of one point in the unperturbed saddle model,
/// `(e^{(a-1)t} x, e^{-at} y)`; at `a = 3/2` this is `(e^{t/2} x, e^{-3t/2} y)`.
pub fn flow_unperturbed_z(z0: ComplexValue, t: f64, alpha: f64) -> ComplexValue {
    ComplexValue::new(((alpha - 1.0) * t).exp() * z0.re, (-alpha * t).exp() * z0.im)
}

fn state_is_finite(s: &[f64; 4]) -> bool {
    s.iter().all(|v| v.is_finite())
}

/// Integrates the downward flow until escape, stall, or `max_time`.
pub fn integrate_flow(
    p0: &SymPoint,
    params: &SteinParams,
    settings: &FlowSettings,
) -> Result<Trajectory, FlowError> {
    settings.validate()?;
    let mut solver = Dopri5::new(|s: &[f64; 4]| downward_state(s, params), p0.to_state(), settings.control());
    let mut samples = vec![(0.0, *p0)];
    let r_free = params.unperturbed_radius();
    let (expand, contract) = (params.expanding_rate(), params.contracting_rate());
    loop {
        let s = *solver.y();
        let t = solver.t();
        if w_norm(&s) >= r_free {
            let (a, b) = sorted_reals(&s);
            if a.abs().min(b.abs()) > settings.escape_radius {
                let sign = |x: f64| if x < 0.0 { -1 } else { 1 };
                let escape = EscapeData { time: t, signs: (sign(a), sign(b)) };
                return Ok(Trajectory { samples, termination: Termination::Escaped, escape: Some(escape), stalled: None });
            }
            let (lo, hi) = sorted_pair(&s);
            for (me, other) in [(lo, hi), (hi, lo)] {
                let speed = (expand * me.re).hypot(contract * me.im);
                if other.re.abs() > settings.escape_radius && speed < settings.stall_threshold {
                    return Ok(Trajectory { samples, termination: Termination::NearCritical, escape: None, stalled: Some(me) });
                }
            }
        }
        if t >= settings.max_time {
            return Ok(Trajectory { samples, termination: Termination::MaxTime, escape: None, stalled: None });
        }
        solver.step(settings.max_time)?;
        let s = *solver.y();
        if !state_is_finite(&s) {
            return Err(FlowError::NonFinite { t: solver.t() });
        }
        let p = SymPoint::from_state(&s).map_err(|_| FlowError::NonFinite { t: solver.t() })?;
        samples.push((solver.t(), p));
    }
}

/// Flows a state forward until `stop` first holds; the crossing time is
/// refined by bisection inside the final step.
pub fn flow_until<S>(
    s0: [f64; 4],
    params: &SteinParams,
    settings: &FlowSettings,
    stop: S,
) -> Result<(f64, [f64; 4]), FlowError>
where
    S: Fn(&[f64; 4]) -> bool,
{
    flow_field_until(s0, |s| downward_state(s, params), settings, stop)
}

/// Same as [`flow_until`] for the upward (time-reversed) flow.
pub fn flow_backward_until<S>(
    s0: [f64; 4],
    params: &SteinParams,
    settings: &FlowSettings,
    stop: S,
) -> Result<(f64, [f64; 4]), FlowError>
where
    S: Fn(&[f64; 4]) -> bool,
{
    flow_field_until(
        s0,
        |s| {
            let v = downward_state(s, params);
            [-v[0], -v[1], -v[2], -v[3]]
        },
        settings,
        stop,
    )
}

fn flow_field_until<V, S>(
    s0: [f64; 4],
    field: V,
    settings: &FlowSettings,
    stop: S,
) -> Result<(f64, [f64; 4]), FlowError>
where
    V: Fn(&[f64; 4]) -> [f64; 4],
    S: Fn(&[f64; 4]) -> bool,
{
    settings.validate()?;
    if stop(&s0) {
        return Ok((0.0, s0));
    }
    let mut solver = Dopri5::new(field, s0, settings.control());
    while solver.t() < settings.max_time {
        let (t0, y0) = (solver.t(), *solver.y());
        solver.step(settings.max_time)?;
        if !state_is_finite(solver.y()) {
            return Err(FlowError::NonFinite { t: solver.t() });
        }
        if stop(solver.y()) {
            let (dt, y) = bisect_event(&solver, &y0, solver.t() - t0, &stop, 52);
            return Ok((t0 + dt, y));
        }
    }
    Err(FlowError::NoEscape { max_time: settings.max_time })
}

/// Flows a state for a fixed time (negative times use the upward flow).
pub fn flow_for(s0: [f64; 4], time: f64, params: &SteinParams, settings: &FlowSettings) -> Result<[f64; 4], FlowError> {
    let sign = if time < 0.0 { -1.0 } else { 1.0 };
    let span = time.abs();
    if span == 0.0 {
        return Ok(s0);
    }
    let mut solver = Dopri5::new(
        |s: &[f64; 4]| {
            let v = downward_state(s, params);
            [sign * v[0], sign * v[1], sign * v[2], sign * v[3]]
        },
        s0,
        settings.control(),
    );
    while solver.t() < span {
        solver.step(span)?;
        if !state_is_finite(solver.y()) {
            return Err(FlowError::NonFinite { t: solver.t() });
        }
    }
    Ok(*solver.y())
}

/// `Delta` read at two escape times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReading {
    /// Value at the later reading.
    pub delta: ComplexValue,
    /// Time of the first reading.
    pub time: f64,
    /// `|Delta(t + 1) - Delta(t)|`.
    pub stability: f64,
}

fn w_field(w: &[f64; 2], params: &SteinParams) -> [f64; 2] {
    let v = downward_state(&[0.0, 0.0, w[0], w[1]], params);
    [v[2], v[3]]
}

fn read_delta(w: &[f64; 2], t: f64, params: &SteinParams) -> ComplexValue {
    let root = ComplexValue::new(w[0], w[1]).sqrt();
    ComplexValue::new(
        (-params.expanding_rate() * t).exp() * root.re,
        (params.contracting_rate() * t).exp() * root.im,
    )
}

/// Flows `w0 = sqrt_w0^2` until `|Re sqrt(w)| > eps` outside the perturbed
/// region and reads `e^{-(a-1)t} Re sqrt(w_t) + i e^{at} Im sqrt(w_t)`, then
/// again one time unit later.
pub fn delta_reading(
    sqrt_w0: ComplexValue,
    params: &SteinParams,
    settings: &FlowSettings,
) -> Result<DeltaReading, FlowError> {
    settings.validate()?;
    let w0 = sqrt_w0 * sqrt_w0;
    let eps = params.epsilon();
    let r_free = params.unperturbed_radius();
    let mut solver = Dopri5::new(|w: &[f64; 2]| w_field(w, params), [w0.re, w0.im], settings.control());
    let escaped = |w: &[f64; 2]| {
        let root = ComplexValue::new(w[0], w[1]).sqrt();
        root.re > eps && w[0].hypot(w[1]) >= r_free
    };
    while !escaped(solver.y()) {
        if solver.t() >= settings.max_time {
            return Err(FlowError::NoEscape { max_time: settings.max_time });
        }
        solver.step(settings.max_time)?;
        if !solver.y().iter().all(|v| v.is_finite()) {
            return Err(FlowError::NonFinite { t: solver.t() });
        }
    }
    let t1 = solver.t();
    let first = read_delta(solver.y(), t1, params);
    let t2 = t1 + 1.0;
    if t2 > settings.max_time {
        return Err(FlowError::NoEscape { max_time: settings.max_time });
    }
    while solver.t() < t2 {
        solver.step(t2)?;
    }
    let second = read_delta(solver.y(), solver.t(), params);
    Ok(DeltaReading { delta: second, time: t1, stability: (second - first).norm() })
}

pub fn compute_delta(sqrt_w0: ComplexValue, params: &SteinParams, settings: &FlowSettings) -> Result<ComplexValue, FlowError> {
    Ok(delta_reading(sqrt_w0, params, settings)?.delta)
}

/// `c = Re Delta`.
pub fn compute_c(sqrt_w0: ComplexValue, params: &SteinParams, settings: &FlowSettings) -> Result<f64, FlowError> {
    Ok(compute_delta(sqrt_w0, params, settings)?.re)
}

/// Whether the smoothing is active at `w` (to the tolerance of the mode).
pub fn in_perturbed_region(w: ComplexValue, params: &SteinParams) -> bool {
    w.norm() < params.unperturbed_radius()
}

/// Relative deviation `1 - N'(|w|)` of the smoothed norm from `|w|`.
pub fn perturbation_size(w: ComplexValue, params: &SteinParams) -> f64 {
    1.0 - radial_profile(w.norm(), params).d1
}
