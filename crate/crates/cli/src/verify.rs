//! Property suites behind `verify`. Every suite reduces to one scalar checked
//! against a limit, so the report stays flat and diffable.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use sectorial_core::flow::{delta_reading, flow_for, flow_unperturbed_z, flow_until, integrate_flow, Termination};
use sectorial_core::geometry::metric::symplectic_form_fd;
use sectorial_core::geometry::potential::radial_profile;
use sectorial_core::geometry::{
    check_psh, kahler_factor, phi_d1, phi_sym_smoothed, smoothed_norm, symplectic_form, ComplexValue, Rect,
    SmoothingMode, SteinParams, SymPoint,
};
use sectorial_core::sector::{
    check_di_characteristic, check_disjointness, check_poisson_bracket, check_truncation_absorbing,
    check_zi_scaling, classify_by_flow, closed_form_reading, eval_i, eval_i_delayed, LocalModel, ProductPoint,
    SectorLabel, Side,
};
use sectorial_core::surface::{builtin, enumerate_decomposition, mirror_label, surface_from_code, BUILTIN_NAMES};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    /// `worst < limit`
    Below,
    /// `worst > limit`
    Above,
    /// `worst <= limit`
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub samples: usize,
    /// Samples whose evaluation failed; any failure fails the suite.
    pub errors: usize,
    pub worst: f64,
    pub limit: f64,
    pub requirement: Requirement,
    pub passed: bool,
}

impl SuiteResult {
    pub fn new(name: &str, samples: usize, errors: usize, worst: f64, limit: f64, requirement: Requirement) -> Self {
        let ok = match requirement {
            Requirement::Below => worst < limit,
            Requirement::Above => worst > limit,
            Requirement::AtMost => worst <= limit,
        };
        SuiteResult {
            name: name.to_string(),
            samples,
            errors,
            worst,
            limit,
            requirement,
            passed: ok && errors == 0 && samples > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl VerifyReport {
    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteResult> {
        self.suites.iter().filter(|s| !s.passed)
    }
}

/// Streams are fixed per group so adding samples to one group leaves the
/// others unchanged.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

/// Runs `f` on every sample in parallel; returns the successful values in
/// sample order and the number of failures.
fn evaluate<T, E, F>(samples: &[T], f: F) -> (Vec<f64>, usize)
where
    T: Sync,
    F: Fn(&T) -> Result<f64, E> + Sync,
{
    let out: Vec<Option<f64>> = samples.par_iter().map(|s| f(s).ok()).collect();
    let errors = out.iter().filter(|v| v.is_none()).count();
    (out.into_iter().flatten().collect(), errors)
}

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn pure(cfg: &RunConfig) -> SteinParams {
    cfg.params().with_smoothing(SmoothingMode::Pure)
}

/// Round trips, smoothed norm, symplectic form and Kahler factor.
pub fn geometry_suites(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 1);
    let eps = cfg.epsilon;
    let mut out = Vec::new();

    let disk = |r: &mut ChaCha8Rng, radius: f64| {
        let (rho, th): (f64, f64) = (radius * r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU));
        ComplexValue::from_polar(rho, th)
    };
    let pairs: Vec<(ComplexValue, ComplexValue)> = (0..10_000).map(|_| (disk(&mut r, 10.0), disk(&mut r, 10.0))).collect();
    let (v, e) = evaluate(&pairs, |&(a, b)| {
        let p = SymPoint::new(a, b)?;
        let q = SymPoint::from_state(&p.to_state())?;
        let raw = SymPoint::new(a, b)?;
        Ok::<_, sectorial_core::error::GeometryError>(q.pair_distance(&raw).max(
            SymPoint::from_zw(p.z(), p.w())?.pair_distance(&raw),
        ))
    });
    out.push(SuiteResult::new("sympoint_round_trip", pairs.len(), e, max_of(v), 1e-12, Requirement::Below));

    let pp = pure(cfg);
    let se = eps.sqrt();
    let radii: Vec<f64> = (0..1000).map(|k| se * 10f64.powf(-6.0 + 12.0 * k as f64 / 999.0)).collect();
    let worst = max_of(radii.iter().map(|&r| {
        let n = smoothed_norm(c(r, 0.0), &pp);
        let floor = (r.max(se) - n) / n;
        // relative gap to |w| shrinks like eps / (2|w|^2)
        let tail = if r > 1e3 * se { (n - r) / r - eps / (2.0 * r * r) } else { 0.0 };
        floor.max(tail.abs())
    }));
    out.push(SuiteResult::new("smoothed_norm_pure_bounds", radii.len(), 0, worst, 1e-12, Requirement::Below));

    let cp = cfg.params().with_smoothing(SmoothingMode::Cutoff);
    let (lo, hi) = (0.5 * cp.cutoff_outer(), cp.cutoff_outer());
    let annulus: Vec<f64> = (0..1000).map(|k| lo + (hi - lo) * k as f64 / 999.0).collect();
    let least = min_of(annulus.iter().map(|&r| radial_profile(r, &cp).laplacian()));
    out.push(SuiteResult::new("cutoff_blend_laplacian", annulus.len(), 0, least, 0.0, Requirement::Above));

    let pts: Vec<SymPoint> = (0..1000)
        .map(|_| {
            let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let w = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            SymPoint::from_zw(z, w).expect("finite")
        })
        .collect();
    let (v, e) = evaluate(&pts, |p| {
        let closed = symplectic_form(p, &pp)?;
        let fd = symplectic_form_fd(p, &pp);
        Ok::<_, sectorial_core::error::GeometryError>((closed - fd).amax() / closed.amax())
    });
    out.push(SuiteResult::new("symplectic_form_fd_vs_closed", pts.len(), e, max_of(v), 1e-6, Requirement::Below));

    let mut grid = Vec::with_capacity(10_000);
    for i in 0..100 {
        for j in 0..100 {
            grid.push(c(-1.0 + 2.0 * (i as f64 + 0.5) / 100.0, -1.0 + 2.0 * (j as f64 + 0.5) / 100.0));
        }
    }
    let (v, e) = evaluate(&grid, |&w| Ok::<_, sectorial_core::error::GeometryError>(kahler_factor(w, &pp)? - se));
    let at_zero = kahler_factor(c(0.0, 0.0), &pp).map(|k| (k - se).abs() < 1e-12 * se).unwrap_or(false);
    out.push(SuiteResult::new(
        "kahler_factor_lower_bound",
        grid.len() + 1,
        e + usize::from(!at_zero),
        min_of(v),
        0.0,
        Requirement::Above,
    ));
    out
}

/// Minimum grid Laplacian of the blended `D_1` potential on `[-5, 5]^2`.
pub fn psh_suite(cfg: &RunConfig) -> Vec<SuiteResult> {
    let rect = Rect { x0: -5.0, x1: 5.0, y0: -5.0, y1: 5.0 };
    let alpha = cfg.alpha;
    let n = cfg.psh_grid;
    let res = check_psh(|x, y| phi_d1(c(x, y), alpha).unwrap_or(f64::NAN), rect, n);
    let (worst, errors) = match res {
        Ok(v) => (v, 0),
        Err(_) => (f64::NAN, 1),
    };
    vec![SuiteResult::new("d1_blend_plurisubharmonic", n * n, errors, worst, 0.0, Requirement::Above)]
}

/// The potential decreases along every sampled trajectory.
pub fn energy_suite(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 2);
    let eps = cfg.epsilon;
    let params = cfg.params();
    let settings = cfg.settings();
    let pts: Vec<SymPoint> = (0..100)
        .map(|_| {
            let mut g = || c(r.gen_range(-3.0 * eps..3.0 * eps), r.gen_range(-3.0 * eps..3.0 * eps));
            SymPoint::from_zw(g(), g() * g()).expect("finite")
        })
        .collect();
    let (v, e) = evaluate(&pts, |p| {
        let tr = integrate_flow(p, &params, &settings)?;
        let phis: Vec<f64> = tr.samples.iter().map(|(_, q)| phi_sym_smoothed(q, &params)).collect();
        Ok::<_, sectorial_core::error::FlowError>(max_of(
            phis.windows(2).map(|w| (w[1] - w[0]) / w[0].abs().max(1.0)),
        ))
    });
    vec![SuiteResult::new("flow_energy_monotone", pts.len(), e, max_of(v), 1e-9, Requirement::Below)]
}

/// Far from the diagonal the pair flows by the decoupled saddle flow.
pub fn regression_suite(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 3);
    let eps = cfg.epsilon;
    let gap = 4.0 * eps.sqrt();
    let params = cfg.params();
    let settings = cfg.settings();
    let alpha = cfg.alpha;
    let mut pts = Vec::with_capacity(1000);
    while pts.len() < 1000 {
        let mut g = || c(r.gen_range(-5.0..5.0), r.gen_range(-1.0..1.0));
        let (a, b) = (g(), g());
        if a.re.abs() > 2.0 * eps && b.re.abs() > 2.0 * eps && (a.re - b.re).abs() > gap {
            pts.push((a, b));
        }
    }
    let (v, e) = evaluate(&pts, |&(a, b)| {
        let p = SymPoint::new(a, b)?;
        let tr = integrate_flow(&p, &params, &settings)?;
        if tr.termination != Termination::Escaped {
            return Err(sectorial_core::error::SectorError::NotInNeighborhood);
        }
        let mut worst = 0.0f64;
        for (t, q) in &tr.samples {
            let (e1, e2) = (flow_unperturbed_z(a, *t, alpha), flow_unperturbed_z(b, *t, alpha));
            let (q1, q2) = (q.z1(), q.z2());
            let straight = ((q1 - e1).norm() / e1.norm()).max((q2 - e2).norm() / e2.norm());
            let swapped = ((q1 - e2).norm() / e2.norm()).max((q2 - e1).norm() / e1.norm());
            worst = worst.max(straight.min(swapped));
        }
        Ok(worst)
    });
    vec![SuiteResult::new("flow_decoupled_regression", pts.len(), e, max_of(v), 1e-6, Requirement::Below)]
}

/// Starts near the diagonal escape along the real `w` axis. Reports the
/// slowest escape time.
pub fn escape_suite(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 4);
    let eps = cfg.epsilon;
    let params = cfg.params();
    let settings = cfg.settings();
    let w0s: Vec<ComplexValue> = (0..100)
        .map(|_| ComplexValue::from_polar(5.0 * eps * r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let (v, e) = evaluate(&w0s, |&w0| {
        let limit = 1e-3 * w0.im.abs().max(eps);
        let stop = |s: &[f64; 4]| s[2] > 1e3 * eps && s[3].abs() < limit;
        flow_until([0.0, 0.0, w0.re, w0.im], &params, &settings, stop).map(|(t, _)| t)
    });
    vec![SuiteResult::new("escape_lemma", w0s.len(), e, max_of(v), cfg.max_time, Requirement::Below)]
}

/// Values of `c` on the `sqrt(w0)` grid.
pub struct CGrid {
    pub n: usize,
    pub coords: Vec<f64>,
    /// Row-major over (Re, Im); `None` where the reading failed.
    pub c: Vec<Option<(f64, f64)>>,
}

pub fn c_grid(cfg: &RunConfig) -> CGrid {
    let params = cfg.params();
    let settings = cfg.settings();
    let n = cfg.c_grid;
    let half = 3.0 * cfg.epsilon;
    let coords: Vec<f64> = (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect();
    let c = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let v = c(coords[idx / n], coords[idx % n]);
            delta_reading(v, &params, &settings).ok().map(|d| (d.delta.re, d.stability))
        })
        .collect();
    CGrid { n, coords, c }
}

const SMOOTHNESS_HALVINGS: usize = 16;

/// Bounds, evenness, smoothness and `t`-independence of `c`.
pub fn c_suites(cfg: &RunConfig) -> Vec<SuiteResult> {
    let eps = cfg.epsilon;
    let g = c_grid(cfg);
    let n = g.n;
    let params = cfg.params();
    let settings = cfg.settings();
    let errors = g.c.iter().filter(|v| v.is_none()).count();
    let mut bound = f64::NEG_INFINITY;
    let mut equal = f64::NEG_INFINITY;
    let mut stab = f64::NEG_INFINITY;
    let mut n_equal = 0;
    for i in 0..n {
        let re = g.coords[i].abs();
        for j in 0..n {
            if let Some((cv, s)) = g.c[i * n + j] {
                bound = bound.max((re - cv).max(cv - re.max(eps)));
                stab = stab.max(s);
                if re > 1.05 * eps {
                    equal = equal.max((cv - re).abs());
                    n_equal += 1;
                }
            }
        }
    }
    // second differences across Re = 0 with the step halved below the grid
    // spacing: a cone doubles the estimate at every halving, a smooth c settles
    let h0 = g.coords[1] - g.coords[0];
    let lines: Vec<f64> = g.coords.iter().step_by((n / 10).max(1)).cloned().collect();
    let (bends, bend_err) = evaluate(&lines, |&y| {
        let at = |x: f64| delta_reading(c(x, y), &params, &settings).map(|d| d.delta.re);
        let c0 = at(0.0)?;
        let mut h = h0;
        let mut last = f64::NAN;
        let mut change = f64::NAN;
        for _ in 0..SMOOTHNESS_HALVINGS {
            let d2 = (at(h)? - 2.0 * c0 + at(-h)?) / (h * h);
            change = (d2 - last).abs() / d2.abs();
            last = d2;
            h /= 2.0;
        }
        Ok::<_, sectorial_core::error::FlowError>(change)
    });

    let mut r = rng(cfg.seed, 5);
    let vs: Vec<ComplexValue> =
        (0..1000).map(|_| c(r.gen_range(-3.0 * eps..3.0 * eps), r.gen_range(-3.0 * eps..3.0 * eps))).collect();
    let (even, even_err) = evaluate(&vs, |&v| {
        let plus = delta_reading(v, &params, &settings)?.delta.re;
        let minus = delta_reading(-v, &params, &settings)?.delta.re;
        Ok::<_, sectorial_core::error::FlowError>((plus - minus).abs())
    });

    vec![
        SuiteResult::new("c_bounds", n * n, errors, bound, 1e-6, Requirement::Below),
        SuiteResult::new("c_equals_abs_re", n_equal, errors, equal, 1e-6, Requirement::Below),
        SuiteResult::new("c_evenness", vs.len(), even_err, max_of(even), 1e-8, Requirement::Below),
        SuiteResult::new("c_smoothness", lines.len(), bend_err, max_of(bends), 1e-2, Requirement::Below),
        SuiteResult::new("delta_t_independence", n * n, errors, stab, 1e-8, Requirement::Below),
    ]
}

/// A point with `z0` and `sqrt(w0)` uniform in `[-3eps, 3eps]^4`.
fn box_point(r: &mut ChaCha8Rng, eps: f64) -> SymPoint {
    let mut g = || r.gen_range(-3.0 * eps..3.0 * eps);
    let z0 = c(g(), g());
    let root = c(g(), g());
    SymPoint::new(z0 + root, z0 - root).expect("finite")
}

/// Closed form against flow limit, band confinement, disjointness of the two
/// hypersurfaces and containment of `U--`.
pub fn oracle_suites(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 6);
    let eps = cfg.epsilon;
    let model = cfg.model();
    let pts: Vec<SymPoint> = (0..10_000).map(|_| box_point(&mut r, eps)).collect();
    let results: Vec<Option<(SectorLabel, SectorLabel, f64, f64)>> = pts
        .par_iter()
        .map(|p| {
            let cf = closed_form_reading(p, &model).ok()?;
            let fl = classify_by_flow(p, &model).ok()?;
            Some((cf.label, fl, cf.a, cf.b))
        })
        .collect();
    let errors = results.iter().filter(|v| v.is_none()).count();
    let ok: Vec<_> = results.iter().zip(&pts).filter_map(|(v, p)| v.map(|v| (v, p))).collect();
    let disagreements: Vec<_> = ok.iter().filter(|((a, b, _, _), _)| a != b).collect();
    let fraction = disagreements.len() as f64 / pts.len() as f64;
    let band = if disagreements.is_empty() {
        0.0
    } else {
        max_of(disagreements.iter().map(|((_, _, a, b), _)| a.abs().min(b.abs())))
    };
    let containment: Vec<f64> = ok
        .iter()
        .filter(|((cf, _, _, _), _)| *cf == SectorLabel::UMinusMinus)
        .map(|(_, p)| p.z1().re.max(p.z2().re) - eps)
        .collect();
    let disjoint = check_disjointness(&model, cfg.c_grid);
    let (c_min, d_err) = match disjoint {
        Ok(d) => (d.c_min, 0),
        Err(_) => (f64::NAN, 1),
    };
    vec![
        SuiteResult::new("oracle_agreement", pts.len(), errors, fraction, 1e-3, Requirement::AtMost),
        SuiteResult::new(
            "oracle_disagreements_in_band",
            pts.len(),
            errors,
            band,
            1e-6f64.max(cfg.band_tol),
            Requirement::AtMost,
        ),
        SuiteResult::new("hypersurface_disjointness", cfg.c_grid * cfg.c_grid, d_err, c_min, 0.0, Requirement::Above),
        SuiteResult::new("u_minus_minus_containment", containment.len(), 0, max_of(containment), 0.0, Requirement::AtMost),
    ]
}

/// A point inside `V` on `side`; `on_h` puts it on the hypersurface.
fn v_point(r: &mut ChaCha8Rng, side: Side, eps: f64, on_h: bool) -> SymPoint {
    let x1 = if on_h { 0.0 } else { r.gen_range(-0.8 * eps..0.8 * eps) };
    let z1 = c(x1, r.gen_range(-1.0..1.0));
    let z2 = c(side.sign() * (2.0 * eps + r.gen_range(0.1..0.8)), r.gen_range(-0.5..0.5));
    SymPoint::new(z1, z2).expect("finite")
}

/// Pull a `V` point back along the flow so that `I` is read through the chart.
fn pulled_back(r: &mut ChaCha8Rng, side: Side, model: &LocalModel, on_h: bool, max_back: f64) -> Option<SymPoint> {
    let q = v_point(r, side, model.params.epsilon(), on_h);
    let s = r.gen_range(0.0..max_back);
    let back = flow_for(q.to_state(), -s, &model.params, &model.settings).ok()?;
    SymPoint::from_state(&back).ok()
}

/// ZI-scaling, positivity of `dI` on the characteristic foliation, Poisson
/// commutation on the product chart and chart independence of `I`.
pub fn axiom_suites(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 7);
    let eps = cfg.epsilon;
    let model = cfg.model();
    let mut out = Vec::new();
    for (side, tag) in [(Side::Minus, "minus"), (Side::Plus, "plus")] {
        let pts: Vec<Option<SymPoint>> = (0..100).map(|_| pulled_back(&mut r, side, &model, false, 2.0)).collect();
        let (v, e) = evaluate(&pts, |p| {
            let p = p.as_ref().ok_or(sectorial_core::error::SectorError::NotInNeighborhood)?;
            let i = eval_i(p, side, &model)?.value;
            Ok::<_, sectorial_core::error::SectorError>(check_zi_scaling(p, side, &model)? / i.abs().max(1.0))
        });
        out.push(SuiteResult::new(&format!("zi_scaling_{tag}"), pts.len(), e, max_of(v), 1e-4, Requirement::Below));
    }
    for (side, tag) in [(Side::Minus, "minus"), (Side::Plus, "plus")] {
        let pts: Vec<Option<SymPoint>> = (0..100).map(|_| pulled_back(&mut r, side, &model, true, 2.5)).collect();
        let (v, e) = evaluate(&pts, |p| {
            let p = p.as_ref().ok_or(sectorial_core::error::SectorError::NotInNeighborhood)?;
            check_di_characteristic(p, side, &model)
        });
        out.push(SuiteResult::new(&format!("di_characteristic_{tag}"), pts.len(), e, min_of(v), 0.0, Requirement::Above));
    }
    let prods: Vec<ProductPoint> = (0..100)
        .map(|_| {
            let mut g = || c(r.gen_range(-0.9 * eps..0.9 * eps), r.gen_range(-1.0..1.0));
            ProductPoint { z: [g(), g()] }
        })
        .collect();
    let (v, e) = evaluate(&prods, |p| check_poisson_bracket(p, 0, 1, &model));
    out.push(SuiteResult::new("poisson_bracket", prods.len(), e, max_of(v), 1e-4, Requirement::Below));

    let pts: Vec<Option<(Side, SymPoint)>> = (0..100)
        .map(|k| {
            let side = if k % 2 == 0 { Side::Minus } else { Side::Plus };
            pulled_back(&mut r, side, &model, false, 4.0).map(|p| (side, p))
        })
        .collect();
    let (v, e) = evaluate(&pts, |p| {
        let (side, p) = p.as_ref().ok_or(sectorial_core::error::SectorError::NotInNeighborhood)?;
        let first = eval_i(p, *side, &model)?.value;
        let later = eval_i_delayed(p, *side, &model, 1.0)?.value;
        Ok::<_, sectorial_core::error::SectorError>((later - first).abs() / first.abs().max(1e-300))
    });
    out.push(SuiteResult::new("i_chart_independence", pts.len(), e, max_of(v), 1e-6, Requirement::Below));
    out
}

/// `U--` points reach the rounded truncation region in finite time. Reports
/// the slowest entry.
pub fn truncation_suite(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut r = rng(cfg.seed, 8);
    let eps = cfg.epsilon;
    let model = cfg.model();
    let mut pts = Vec::with_capacity(1000);
    while pts.len() < 1000 {
        let batch: Vec<SymPoint> = (0..1000).map(|_| box_point(&mut r, eps)).collect();
        let labels: Vec<Option<SectorLabel>> =
            batch.par_iter().map(|p| closed_form_reading(p, &model).ok().map(|c| c.label)).collect();
        for (p, l) in batch.into_iter().zip(labels) {
            if l == Some(SectorLabel::UMinusMinus) && pts.len() < 1000 {
                pts.push(p);
            }
        }
    }
    let (v, e) = evaluate(&pts, |p| check_truncation_absorbing(p, &model));
    vec![SuiteResult::new("truncation_absorbing", pts.len(), e, max_of(v), cfg.max_time, Requirement::Below)]
}

/// Codes of every arc attachment of `m` arcs among `pairs` component pairs up
/// to relabeling the arcs: digit sequences that never decrease.
fn sorted_codes(pairs: u64, m: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut digits = vec![0u64; m];
    loop {
        out.push(digits.iter().rev().fold(0, |acc, d| acc * pairs + d));
        // next nondecreasing sequence
        let Some(k) = (0..m).rev().find(|&k| digits[k] + 1 < pairs) else {
            return out;
        };
        let d = digits[k] + 1;
        for x in &mut digits[k..] {
            *x = d;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// One code per isomorphism class of arc attachments: the sorted pair list
/// must be least among its images under relabelings of the components.
fn canonical_codes(n: usize, m: usize) -> Vec<u64> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).expect("pair");
    let perms = permutations(n);
    sorted_codes(pairs.len() as u64, m)
        .into_iter()
        .filter(|&code| {
            let mut c = code;
            let digits: Vec<usize> = (0..m)
                .map(|_| {
                    let d = (c % pairs.len() as u64) as usize;
                    c /= pairs.len() as u64;
                    d
                })
                .collect();
            let mut deg = vec![0usize; n];
            for &d in &digits {
                deg[pairs[d].0] += 1;
                deg[pairs[d].1] += 1;
            }
            if deg.windows(2).any(|w| w[0] < w[1]) {
                return false;
            }
            perms.iter().filter(|p| (0..n).all(|k| deg[p[k]] == deg[k])).all(|p| {
                let mut image: Vec<usize> = digits.iter().map(|&d| index(p[pairs[d].0], p[pairs[d].1])).collect();
                image.sort_unstable();
                image >= digits
            })
        })
        .collect()
}

#[derive(Default)]
struct Tally {
    checked: usize,
    errors: usize,
    count_bad: usize,
    corner_bad: usize,
    adj_bad: usize,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.checked += o.checked;
        self.errors += o.errors;
        self.count_bad += o.count_bad;
        self.corner_bad += o.corner_bad;
        self.adj_bad += o.adj_bad;
        self
    }
}

fn tally_surface(n: usize, m: usize, code: u64) -> Tally {
    let s = surface_from_code(n, m, code);
    let mut t = Tally { checked: 1, ..Tally::default() };
    let Ok(d) = enumerate_decomposition(&s) else {
        t.errors = 1;
        return t;
    };
    if d.counts() != (n * (n + 1) / 2, m * n, m * m.saturating_sub(1) / 2) {
        t.count_bad += 1;
    }
    let keys: BTreeSet<_> = d.corners.iter().map(|c| c.saddles.clone()).collect();
    if keys.len() != d.corners.len() || d.corners.iter().any(|c| c.saddles[0] == c.saddles[1]) {
        t.corner_bad += 1;
    }
    let touched: BTreeMap<&str, BTreeSet<String>> =
        s.arcs.iter().map(|a| (a.id.as_str(), s.arc_components(a))).collect();
    for h in &d.hypersurfaces {
        let touches = touched.get(h.saddle.as_str()).map(|c| c.contains(&h.minimum));
        if touches != Some(h.adjacent) || h.adjacent != h.fiber.expression.starts_with("COMPLETION_OF") {
            t.adj_bad += 1;
        }
    }
    t
}

/// Counts, corners, adjacency and Euler characteristics of decompositions,
/// over every way, up to isomorphism, of joining up to six arcs among up to
/// six disks.
pub fn combinatorics_suites(_cfg: &RunConfig) -> Vec<SuiteResult> {
    let jobs: Vec<(usize, usize, u64)> = (1..=6usize)
        .flat_map(|n| (0..=6usize).map(move |m| (n, m)))
        .flat_map(|(n, m)| canonical_codes(n, m).into_iter().map(move |c| (n, m, c)))
        .collect();
    let t = jobs
        .par_iter()
        .map(|&(n, m, code)| tally_surface(n, m, code))
        .reduce(Tally::default, Tally::merge);
    let (checked, errors, count_bad, corner_bad, adj_bad) = (t.checked, t.errors, t.count_bad, t.corner_bad, t.adj_bad);
    let mut euler_bad = 0;
    for name in BUILTIN_NAMES {
        let s = builtin(name).expect("builtin");
        if s.total.map(|t| t.euler()) != Some(s.computed_euler()) {
            euler_bad += 1;
        }
    }
    let sphere = builtin("p1-minus-4pts").expect("builtin");
    let mut sphere_bad = 0;
    match enumerate_decomposition(&sphere) {
        Ok(d) => {
            sphere_bad += usize::from(d.counts() != (3, 2, 0));
            let models: Vec<Option<&str>> =
                ["U(m-,m-)", "U(m-,m+)", "U(m+,m+)"].iter().map(|k| d.completions[*k].model.as_deref()).collect();
            sphere_bad += usize::from(models != [Some("(C*)^2"), Some("P x C*"), Some("C x C*")]);
        }
        Err(_) => sphere_bad += 1,
    }
    sphere_bad += usize::from(!mirror_label(&sphere).is_some_and(|m| m.contains("xyz=0")));
    vec![
        SuiteResult::new("decomposition_counts", checked, errors, count_bad as f64, 0.0, Requirement::AtMost),
        SuiteResult::new("corner_enumeration", checked, errors, corner_bad as f64, 0.0, Requirement::AtMost),
        SuiteResult::new("fiber_adjacency", checked, errors, adj_bad as f64, 0.0, Requirement::AtMost),
        SuiteResult::new("euler_consistency", BUILTIN_NAMES.len(), 0, euler_bad as f64, 0.0, Requirement::AtMost),
        SuiteResult::new("four_punctured_sphere", 1, 0, sphere_bad as f64, 0.0, Requirement::AtMost),
    ]
}

pub fn run_all(cfg: &RunConfig) -> VerifyReport {
    let groups: [fn(&RunConfig) -> Vec<SuiteResult>; 10] = [
        geometry_suites,
        psh_suite,
        energy_suite,
        regression_suite,
        escape_suite,
        c_suites,
        oracle_suites,
        axiom_suites,
        truncation_suite,
        combinatorics_suites,
    ];
    let suites: Vec<SuiteResult> = groups.iter().flat_map(|g| g(cfg)).collect();
    let passed = suites.iter().all(|s| s.passed);
    VerifyReport { config: cfg.clone(), suites, passed }
}
