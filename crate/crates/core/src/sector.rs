//! Sector labels, the boundary functions `I`, and numerical checks of the
//! sector axioms in the local model.

use nalgebra::SVector;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, SectorError};
use crate::flow::{
    delta_reading, flow_for, flow_until, integrate_flow, sorted_reals, FlowSettings, Termination,
};
use crate::geometry::metric::levi_coefficients;
use crate::geometry::{ComplexValue, SteinParams, SymPoint};

/// Parameters, integrator settings and hypersurface band shared by all queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalModel {
    pub params: SteinParams,
    pub settings: FlowSettings,
    pub band_tol: f64,
}

impl LocalModel {
    pub fn new(params: SteinParams, settings: FlowSettings, band_tol: f64) -> Self {
        LocalModel { params, settings, band_tol }
    }

    /// Default settings for `params`, band `1e-6 max(1, eps)`.
    pub fn with_defaults(params: SteinParams) -> Self {
        LocalModel {
            params,
            settings: FlowSettings::for_params(&params),
            band_tol: 1e-6 * params.epsilon().max(1.0),
        }
    }

    /// Settings used for derivative checks.
    fn tight(&self) -> FlowSettings {
        self.settings.with_tolerance(self.settings.step_tolerance.min(1e-12))
    }

    fn eps(&self) -> f64 {
        self.params.epsilon()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SectorLabel {
    UMinusMinus,
    UMinusPlus,
    UPlusPlus,
    HMinus,
    HPlus,
    Unresolved,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 6] = [
        SectorLabel::UMinusMinus,
        SectorLabel::UMinusPlus,
        SectorLabel::UPlusPlus,
        SectorLabel::HMinus,
        SectorLabel::HPlus,
        SectorLabel::Unresolved,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            SectorLabel::UMinusMinus => "U--",
            SectorLabel::UMinusPlus => "U-+",
            SectorLabel::UPlusPlus => "U++",
            SectorLabel::HMinus => "H-",
            SectorLabel::HPlus => "H+",
            SectorLabel::Unresolved => "UNRESOLVED",
        }
    }

    pub fn is_hypersurface(&self) -> bool {
        matches!(self, SectorLabel::HMinus | SectorLabel::HPlus)
    }

    /// Label from the two defining functions `a = Re z0 + c`, `b = Re z0 - c`.
    pub fn from_defining(a: f64, b: f64, band: f64) -> SectorLabel {
        match (a.abs() <= band, b.abs() <= band) {
            (true, true) => SectorLabel::Unresolved,
            (true, false) => SectorLabel::HMinus,
            (false, true) => SectorLabel::HPlus,
            (false, false) if a < 0.0 && b < 0.0 => SectorLabel::UMinusMinus,
            (false, false) if a > 0.0 && b > 0.0 => SectorLabel::UPlusPlus,
            (false, false) if a > 0.0 && b < 0.0 => SectorLabel::UMinusPlus,
            _ => SectorLabel::Unresolved,
        }
    }
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Which of the two boundary hypersurfaces (and its neighborhood `V`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn sign(&self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }

    pub fn hypersurface(&self) -> SectorLabel {
        match self {
            Side::Minus => SectorLabel::HMinus,
            Side::Plus => SectorLabel::HPlus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormReading {
    pub label: SectorLabel,
    pub c: f64,
    /// `Re z0 + c`.
    pub a: f64,
    /// `Re z0 - c`.
    pub b: f64,
}

pub fn closed_form_reading(p: &SymPoint, model: &LocalModel) -> Result<ClosedFormReading, SectorError> {
    let c = delta_reading(p.half_difference(), &model.params, &model.settings)?.delta.re;
    let x = p.z().re;
    let (a, b) = (x + c, x - c);
    Ok(ClosedFormReading { label: SectorLabel::from_defining(a, b, model.band_tol), c, a, b })
}

/// Label from `Re z0 +- c(sqrt w0)`.
pub fn classify_closed_form(p: &SymPoint, model: &LocalModel) -> Result<SectorLabel, SectorError> {
    Ok(closed_form_reading(p, model)?.label)
}

/// Label from the limit of the downward flow.
///
/// Escaped trajectories are labeled by the signs of the real parts. A
/// trajectory that stalls at the saddle gets the hypersurface label of the
/// side its partner escaped to. At `max_time` the asymptotic real coefficients
/// `e^{-(a-1)t} Re z_i` are compared against the band, as they are at escape.
pub fn classify_by_flow(p: &SymPoint, model: &LocalModel) -> Result<SectorLabel, SectorError> {
    let tr = integrate_flow(p, &model.params, &model.settings)?;
    let asymptotic = || {
        let s = tr.final_point().to_state();
        let scale = (-model.params.expanding_rate() * tr.final_time()).exp();
        let (lo, hi) = sorted_reals(&s);
        SectorLabel::from_defining(hi * scale, lo * scale, model.band_tol)
    };
    Ok(match tr.termination {
        // the coefficients are frozen once escaped; reading them (rather than
        // bare signs) keeps round-off on a stable manifold inside the band
        Termination::Escaped => match (tr.escape.map(|e| e.signs), asymptotic()) {
            (_, h) if h.is_hypersurface() => h,
            (Some((-1, -1)), _) => SectorLabel::UMinusMinus,
            (Some((-1, 1)), _) => SectorLabel::UMinusPlus,
            (Some((1, 1)), _) => SectorLabel::UPlusPlus,
            _ => SectorLabel::Unresolved,
        },
        Termination::NearCritical => {
            let (lo, hi) = sorted_reals(&tr.final_point().to_state());
            let stalled = tr.stalled.map(|z| z.re).unwrap_or(0.0);
            if (stalled - hi).abs() <= (stalled - lo).abs() {
                SectorLabel::HMinus
            } else {
                SectorLabel::HPlus
            }
        }
        Termination::MaxTime => {
            let s = tr.final_point().to_state();
            if s[2].hypot(s[3]) < model.params.unperturbed_radius() {
                return Ok(SectorLabel::Unresolved);
            }
            asymptotic()
        }
    })
}

/// The pair labeled for the `V` chart: `z1` has the smaller `|Re|` (ties by
/// smaller `|Im|`).
pub fn chart_labeling(p: &SymPoint) -> (ComplexValue, ComplexValue) {
    let (u, v) = (p.z1(), p.z2());
    if (u.re.abs(), u.im.abs()) <= (v.re.abs(), v.im.abs()) {
        (u, v)
    } else {
        (v, u)
    }
}

/// `V- = {|Re z1| < eps, Re z2 < -2 eps}`, `V+` likewise with `Re z2 > 2 eps`.
pub fn in_v_region(p: &SymPoint, side: Side, params: &SteinParams) -> bool {
    let eps = params.epsilon();
    let (z1, z2) = chart_labeling(p);
    z1.re.abs() < eps && side.sign() * z2.re > 2.0 * eps
}

fn state_in_v(s: &[f64; 4], side: Side, params: &SteinParams) -> bool {
    SymPoint::from_state(s).map(|p| in_v_region(&p, side, params)).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IValue {
    pub value: f64,
    /// Flow time at which the `V` reading was taken.
    pub chart_time: f64,
}

/// Whether the downward flow from `s` can still reach `V`: once outside the
/// smoothing support the two points move independently and `|Re|` only grows.
fn left_for_good(s: &[f64; 4], params: &SteinParams) -> bool {
    let (lo, hi) = sorted_reals(s);
    s[2].hypot(s[3]) >= params.unperturbed_radius() && lo.abs().min(hi.abs()) >= params.epsilon()
}

/// `I = Im z1` in `V`, otherwise `e^{at} Im z1(t)` at the first entry time `t`.
pub fn eval_i(p: &SymPoint, side: Side, model: &LocalModel) -> Result<IValue, SectorError> {
    eval_i_with(p, side, &model.params, &model.settings)
}

fn eval_i_with(p: &SymPoint, side: Side, params: &SteinParams, settings: &FlowSettings) -> Result<IValue, SectorError> {
    if in_v_region(p, side, params) {
        return Ok(IValue { value: chart_labeling(p).0.im, chart_time: 0.0 });
    }
    let stop = |s: &[f64; 4]| state_in_v(s, side, params) || left_for_good(s, params);
    let (t, s) = flow_until(p.to_state(), params, settings, stop).map_err(|e| match e {
        FlowError::NoEscape { .. } => SectorError::NotInNeighborhood,
        other => SectorError::Flow(other),
    })?;
    if !state_in_v(&s, side, params) {
        return Err(SectorError::NotInNeighborhood);
    }
    let q = SymPoint::from_state(&s)?;
    Ok(IValue { value: (params.contracting_rate() * t).exp() * chart_labeling(&q).0.im, chart_time: t })
}

/// A second reading of `I`, taken `delay` time units after the `V` entry.
pub fn eval_i_delayed(p: &SymPoint, side: Side, model: &LocalModel, delay: f64) -> Result<IValue, SectorError> {
    let first = eval_i(p, side, model)?;
    let entry = flow_for(p.to_state(), first.chart_time, &model.params, &model.settings)?;
    let later = flow_for(entry, delay, &model.params, &model.settings)?;
    let q = SymPoint::from_state(&later)?;
    let t = first.chart_time + delay;
    Ok(IValue { value: (model.params.contracting_rate() * t).exp() * chart_labeling(&q).0.im, chart_time: t })
}

/// `|dI/ds + a I|` along the downward flow, by a fourth-order centered
/// difference with step `1e-3`.
pub fn check_zi_scaling(p: &SymPoint, side: Side, model: &LocalModel) -> Result<f64, SectorError> {
    let settings = model.tight();
    let params = &model.params;
    let h = 1e-3;
    let i_at = |s: f64| -> Result<f64, SectorError> {
        let q = SymPoint::from_state(&flow_for(p.to_state(), s, params, &settings)?)?;
        Ok(eval_i_with(&q, side, params, &settings)?.value)
    };
    let i0 = eval_i_with(p, side, params, &settings)?.value;
    let d = (8.0 * (i_at(h)? - i_at(-h)?) - (i_at(2.0 * h)? - i_at(-2.0 * h)?)) / (12.0 * h);
    Ok((d + params.contracting_rate() * i0).abs())
}

/// `c` as a function of `w` (it is even in `sqrt w`).
fn c_of_w(w: ComplexValue, params: &SteinParams, settings: &FlowSettings) -> Result<f64, SectorError> {
    Ok(delta_reading(w.sqrt(), params, settings)?.delta.re)
}

/// Gradient in `(Re z, Im z, Re w, Im w)` of `Re z +- c(w)`, the defining
/// function of the hypersurface on `side`.
pub fn defining_gradient(p: &SymPoint, side: Side, model: &LocalModel) -> Result<[f64; 4], SectorError> {
    let settings = model.settings.with_tolerance(1e-12);
    let w = p.w();
    let h = 1e-4 * w.norm().max(model.params.smoothing_scale());
    let sign = -side.sign();
    let diff = |dw: ComplexValue| -> Result<f64, SectorError> {
        Ok((c_of_w(w + dw, &model.params, &settings)? - c_of_w(w - dw, &model.params, &settings)?) / (2.0 * h))
    };
    let dre = diff(ComplexValue::new(h, 0.0))?;
    let dim = diff(ComplexValue::new(0.0, h))?;
    Ok([1.0, 0.0, sign * dre, sign * dim])
}

/// Characteristic direction `C` of the hypersurface through `p`: `omega(X, C)
/// = df(X)` for the defining function `f`, so `C` spans the kernel of `omega`
/// on the tangent space.
pub fn characteristic_vector(p: &SymPoint, side: Side, model: &LocalModel) -> Result<[f64; 4], SectorError> {
    let g = defining_gradient(p, side, model)?;
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 1e-8) {
        return Err(SectorError::Condition(norm));
    }
    let (lz, lw) = levi_coefficients(&p.to_state(), &model.params);
    // omega = lz dx^dy + lw du^dv; solve Omega C = g block by block
    Ok([-g[1] / lz, g[0] / lz, -g[3] / lw, g[2] / lw])
}

/// `dI(C)` at a point of the hypersurface on `side`, by centered differences.
pub fn check_di_characteristic(p: &SymPoint, side: Side, model: &LocalModel) -> Result<f64, SectorError> {
    let cvec = characteristic_vector(p, side, model)?;
    let s = p.to_state();
    let size = cvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = 1.0f64.max(s.iter().map(|x| x.abs()).fold(0.0, f64::max));
    let h = 1e-5 * scale / size;
    let settings = model.tight();
    let i_at = |k: f64| -> Result<f64, SectorError> {
        let mut q = s;
        for (qi, ci) in q.iter_mut().zip(cvec) {
            *qi += k * h * ci;
        }
        Ok(eval_i_with(&SymPoint::from_state(&q)?, side, &model.params, &settings)?.value)
    };
    Ok((8.0 * (i_at(1.0)? - i_at(-1.0)?) - (i_at(2.0)? - i_at(-2.0)?)) / (12.0 * h))
}

/// A configuration with one point in each of two saddle charts; near distinct
/// saddles Sym^2 is locally the product with `omega = sum dx_k ^ dy_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub z: [ComplexValue; 2],
}

impl ProductPoint {
    fn to_state(self) -> [f64; 4] {
        [self.z[0].re, self.z[0].im, self.z[1].re, self.z[1].im]
    }
}

/// Reading time used for the product-chart `I` functions.
const PRODUCT_CHART_TIME: f64 = 0.5;

/// `I_k` on the product chart: flow the `k`-th point by the saddle flow for a
/// fixed time and rescale its imaginary part.
fn product_i(s: &[f64; 4], k: usize, params: &SteinParams, settings: &FlowSettings) -> Result<f64, SectorError> {
    let x = s[2 * k];
    if x.abs() >= params.epsilon() {
        return Err(SectorError::NotInNeighborhood);
    }
    // a single point is the z-part of the symmetric flow at w far away
    let far = [x, s[2 * k + 1], 1e6, 0.0];
    let moved = flow_for(far, PRODUCT_CHART_TIME, params, settings)?;
    Ok((params.contracting_rate() * PRODUCT_CHART_TIME).exp() * moved[1])
}

/// `|{I_i, I_j}|` on the product chart, from finite-difference gradients.
pub fn check_poisson_bracket(p: &ProductPoint, i: usize, j: usize, model: &LocalModel) -> Result<f64, SectorError> {
    if i == j {
        return Ok(0.0);
    }
    let settings = model.tight();
    let s = p.to_state();
    let grad = |k: usize| -> Result<SVector<f64, 4>, SectorError> {
        let mut g = SVector::<f64, 4>::zeros();
        let h = 1e-5;
        for a in 0..4 {
            let (mut sp, mut sm) = (s, s);
            sp[a] += h;
            sm[a] -= h;
            g[a] = (product_i(&sp, k, &model.params, &settings)? - product_i(&sm, k, &model.params, &settings)?) / (2.0 * h);
        }
        Ok(g)
    };
    let (gi, gj) = (grad(i)?, grad(j)?);
    let mut omega = nalgebra::Matrix4::<f64>::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    let lu = omega.lu();
    let det = lu.determinant();
    if det.abs() < 1e-12 {
        return Err(SectorError::Condition(det));
    }
    let x_i = lu.solve(&gi).ok_or(SectorError::Condition(det))?;
    Ok(gj.dot(&x_i).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disjointness {
    /// Minimum over the grid of `max(|Re z0 + c|, |Re z0 - c|)`.
    pub min_separation: f64,
    /// Minimum of `c` over the `sqrt w0` grid.
    pub c_min: f64,
}

/// Grid check that the two hypersurfaces never meet on `[-3eps, 3eps]^4`.
pub fn check_disjointness(model: &LocalModel, n: usize) -> Result<Disjointness, SectorError> {
    use rayon::prelude::*;
    let eps = model.eps();
    let n = n.max(2);
    let coord = |k: usize| -3.0 * eps + 6.0 * eps * k as f64 / (n - 1) as f64;
    let cs: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let v = ComplexValue::new(coord(idx / n), coord(idx % n));
            Ok(delta_reading(v, &model.params, &model.settings)?.delta.re)
        })
        .collect::<Result<_, SectorError>>()?;
    let c_min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    // max(|x + c|, |x - c|) = |x| + c; Im z0 does not enter
    let x_min = (0..n).map(|k| coord(k).abs()).fold(f64::INFINITY, f64::min);
    Ok(Disjointness { min_separation: x_min + c_min, c_min })
}

/// The truncation region `{Re z1, Re z2 <= -eps, Re z1 + Re z2 <= -3 eps}` with
/// its two corners rounded by circular arcs of tangent length `eps/8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRegion {
    eps: f64,
    radius: f64,
    centers: [(f64, f64); 2],
}

impl TruncationRegion {
    pub fn new(eps: f64) -> Self {
        let tangent = eps / 8.0;
        let half_angle = 67.5f64.to_radians();
        let radius = tangent * half_angle.tan();
        let to_center = tangent / half_angle.cos();
        // bisector of the corner at (-eps, -2eps) points into the region
        let inward = |edge_a: (f64, f64), edge_b: (f64, f64)| {
            let (x, y) = (edge_a.0 + edge_b.0, edge_a.1 + edge_b.1);
            let n = x.hypot(y);
            (x / n, y / n)
        };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // edges leaving the corner: down along x = -eps, up-left along x + y = -3eps
        let b1 = inward((0.0, -1.0), (-s, s));
        let b2 = inward((-1.0, 0.0), (s, -s));
        TruncationRegion {
            eps,
            radius,
            centers: [
                (-eps + to_center * b1.0, -2.0 * eps + to_center * b1.1),
                (-2.0 * eps + to_center * b2.0, -eps + to_center * b2.1),
            ],
        }
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        let eps = self.eps;
        if x1 > -eps || x2 > -eps || x1 + x2 > -3.0 * eps {
            return false;
        }
        let d_diag = (-3.0 * eps - x1 - x2) * std::f64::consts::FRAC_1_SQRT_2;
        let corners = [((-eps, -2.0 * eps), -eps - x1), ((-2.0 * eps, -eps), -eps - x2)];
        for (k, (corner, d_side)) in corners.iter().enumerate() {
            if *d_side < self.radius && d_diag < self.radius {
                let (cx, cy) = self.centers[k];
                let beyond = (x1 - cx) * (corner.0 - cx) + (x2 - cy) * (corner.1 - cy) > 0.0;
                if beyond && (x1 - cx).hypot(x2 - cy) > self.radius {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains_state(&self, s: &[f64; 4]) -> bool {
        let (lo, hi) = sorted_reals(s);
        self.contains(lo, hi)
    }
}

/// First time the downward flow from `p` enters the truncation region.
pub fn check_truncation_absorbing(p: &SymPoint, model: &LocalModel) -> Result<f64, SectorError> {
    let region = TruncationRegion::new(model.eps());
    let settings = model.settings;
    flow_until(p.to_state(), &model.params, &settings, |s| region.contains_state(s))
        .map(|(t, _)| t)
        .map_err(|e| match e {
            FlowError::NoEscape { max_time } => SectorError::MaxTime { max_time },
            other => SectorError::Flow(other),
        })
}
