//! Potentials of the local model.
//!
//! The one-variable saddle potential is `phi(z) = (1-a)/2 x^2 + a/2 y^2`. On
//! Sym^2(C) with `z = (z1+z2)/2`, `w = ((z1-z2)/2)^2` the sum `phi(z1)+phi(z2)`
//! equals `2 phi(z) + 1/2 |w| + (1-2a)/2 Re(w)`; the `|w|` term is replaced by a
//! smooth radial profile `N(|w|)`.

use super::params::{SmoothingMode, SteinParams};
use super::sympoint::{ComplexValue, SymPoint};

pub fn phi_1d(z: ComplexValue, alpha: f64) -> f64 {
    0.5 * (1.0 - alpha) * z.re * z.re + 0.5 * alpha * z.im * z.im
}

/// Euclidean gradient of [`phi_1d`] as `(d/dx, d/dy)` packed in a complex number.
pub fn phi_1d_gradient(z: ComplexValue, alpha: f64) -> ComplexValue {
    ComplexValue::new((1.0 - alpha) * z.re, alpha * z.im)
}

/// Value and radial derivatives of the smoothed norm `N(r)`, `r = |w|`.
///
/// `d1_over_r` is `N'(r)/r`, kept separately because it stays finite at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub value: f64,
    pub d1: f64,
    pub d1_over_r: f64,
    pub d2: f64,
}

impl RadialProfile {
    /// Euclidean Laplacian of `w -> N(|w|)`.
    pub fn laplacian(&self) -> f64 {
        self.d2 + self.d1_over_r
    }
}

/// Quintic smoothstep on [0, 1] with its first two derivatives.
pub(crate) fn smoothstep5(q: f64) -> (f64, f64, f64) {
    if q <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if q >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let q2 = q * q;
        let s = q2 * q * (10.0 - 15.0 * q + 6.0 * q2);
        let ds = 30.0 * q2 * (1.0 - q) * (1.0 - q);
        let dds = 60.0 * q * (1.0 - q) * (1.0 - 2.0 * q);
        (s, ds, dds)
    }
}

fn pure_profile(r: f64, c: f64) -> RadialProfile {
    let s = (r * r + c).sqrt();
    RadialProfile {
        value: s,
        d1: r / s,
        d1_over_r: 1.0 / s,
        d2: c / (s * s * s),
    }
}

/// `N(r) = r + chi(r) (sqrt(r^2 + delta^2) - r)` with `chi` a quintic step in
/// `r^2` from 1 (at `r <= r_in`) down to 0 (at `r >= r_out`).
fn cutoff_profile(r: f64, params: &SteinParams) -> RadialProfile {
    let r_out = params.cutoff_outer();
    if r >= r_out {
        return RadialProfile { value: r, d1: 1.0, d1_over_r: 1.0 / r, d2: 0.0 };
    }
    let r_in = params.cutoff_inner();
    let delta = params.cutoff_delta();
    let inner = pure_profile(r, delta * delta);
    if r <= r_in {
        return inner;
    }
    let span = r_out * r_out - r_in * r_in;
    let q = (r * r - r_in * r_in) / span;
    let (s, ds, dds) = smoothstep5(q);
    let chi = 1.0 - s;
    // chi'(r) = -s'(q) 2r/span, chi''(r) = -s''(q) (2r/span)^2 - s'(q) 2/span
    let dchi_over_r = -ds * 2.0 / span;
    let dchi = dchi_over_r * r;
    let ddchi = -dds * (2.0 * r / span).powi(2) - ds * 2.0 / span;
    let gap = inner.value - r;
    let dgap = inner.d1 - 1.0;
    let ddgap = inner.d2;
    RadialProfile {
        value: r + chi * gap,
        d1: 1.0 + dchi * gap + chi * dgap,
        d1_over_r: (1.0 - chi) / r + dchi_over_r * gap + chi * inner.d1_over_r,
        d2: ddchi * gap + 2.0 * dchi * dgap + chi * ddgap,
    }
}

pub fn radial_profile(r: f64, params: &SteinParams) -> RadialProfile {
    match params.smoothing() {
        SmoothingMode::Pure => pure_profile(r, params.epsilon()),
        SmoothingMode::Cutoff => cutoff_profile(r, params),
    }
}

/// Smoothed replacement for `|w|`.
pub fn smoothed_norm(w: ComplexValue, params: &SteinParams) -> f64 {
    radial_profile(w.norm(), params).value
}

/// The `w` part of the smoothed potential, `1/2 N(|w|) + (1-2a)/2 Re(w)`.
pub fn w_potential(w: ComplexValue, params: &SteinParams) -> f64 {
    0.5 * smoothed_norm(w, params) + 0.5 * (1.0 - 2.0 * params.alpha()) * w.re
}

/// Euclidean gradient of [`w_potential`].
pub fn w_potential_gradient(w: ComplexValue, params: &SteinParams) -> ComplexValue {
    let prof = radial_profile(w.norm(), params);
    let radial = 0.5 * prof.d1_over_r;
    ComplexValue::new(
        radial * w.re + 0.5 * (1.0 - 2.0 * params.alpha()),
        radial * w.im,
    )
}

/// Smoothed potential on Sym^2(C): `2 phi(z) + 1/2 N(|w|) + (1-2a)/2 Re(w)`.
///
/// At `alpha = 3/2` this is `1/2|z|^2 - Re(z^2) + 1/2 N(|w|) - Re(w)`.
pub fn phi_sym_smoothed(p: &SymPoint, params: &SteinParams) -> f64 {
    phi_sym_state(&p.to_state(), params)
}

pub(crate) fn phi_sym_state(s: &[f64; 4], params: &SteinParams) -> f64 {
    let z = ComplexValue::new(s[0], s[1]);
    let w = ComplexValue::new(s[2], s[3]);
    2.0 * phi_1d(z, params.alpha()) + w_potential(w, params)
}

/// The unsmoothed product potential `phi(z1) + phi(z2)`.
pub fn phi_sym_unsmoothed(p: &SymPoint, alpha: f64) -> f64 {
    phi_1d(p.z1(), alpha) + phi_1d(p.z2(), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pure(eps: f64) -> SteinParams {
        SteinParams::new(1.5, eps, SmoothingMode::Pure).unwrap()
    }

    fn cutoff(eps: f64) -> SteinParams {
        SteinParams::new(1.5, eps, SmoothingMode::Cutoff).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_1d(c(2.0, 0.0), 1.5), -1.0);
        assert_eq!(phi_1d(c(0.0, 0.0), 1.5), 0.0);
        assert!((phi_1d(c(1.0, 1.0), 1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phi_matches_complex_form() {
        // 1/4 |z|^2 + (1 - 2a)/4 Re(z^2)
        let a = 1.7;
        for z in [c(0.3, -1.2), c(-2.0, 0.5), c(4.0, 4.0)] {
            let alt = 0.25 * z.norm_sqr() + 0.25 * (1.0 - 2.0 * a) * (z * z).re;
            assert!((phi_1d(z, a) - alt).abs() < 1e-12);
        }
    }

    #[test]
    fn product_potential_splits() {
        // phi(z1) + phi(z2) = 2 phi(z) + 2 phi(sqrt w) for the quadratic potential
        let p = SymPoint::new(c(0.7, -0.4), c(-1.3, 2.2)).unwrap();
        let u = p.half_difference();
        let lhs = phi_sym_unsmoothed(&p, 1.5);
        let rhs = 2.0 * phi_1d(p.z(), 1.5) + 2.0 * phi_1d(u, 1.5);
        assert!((lhs - rhs).abs() < 1e-12);
        let w = p.w();
        let closed = 0.5 * p.z().norm_sqr() - (p.z() * p.z()).re + 0.5 * w.norm() - w.re;
        assert!((lhs - closed).abs() < 1e-12);
    }

    #[test]
    fn smoothed_norm_examples() {
        let eps = 0.01;
        assert_eq!(smoothed_norm(c(0.0, 0.0), &pure(eps)), eps.sqrt());
        assert!((smoothed_norm(c(10.0, 0.0), &pure(eps)) - 100.01f64.sqrt()).abs() < 1e-12);
        assert!((smoothed_norm(c(10.0, 0.0), &pure(eps)) - 10.0005).abs() < 1e-6);
        let p = cutoff(0.1);
        assert_eq!(smoothed_norm(c(0.2, 0.0), &p), 0.2);
        assert_eq!(smoothed_norm(c(0.0, -0.2), &p), 0.2);
    }

    #[test]
    fn phi_sym_examples() {
        let eps = 0.09;
        let origin = SymPoint::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((phi_sym_smoothed(&origin, &pure(eps)) - 0.5 * eps.sqrt()).abs() < 1e-15);
        let p = SymPoint::new(c(2.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!((phi_sym_smoothed(&p, &cutoff(0.1)) + 2.0).abs() < 1e-15);
        // |w| >> eps: within 1e-6 of the unsmoothed potential
        let far = SymPoint::new(c(40.0, 3.0), c(-40.0, 1.0)).unwrap();
        let unsmoothed = phi_sym_unsmoothed(&far, 1.5);
        assert!((phi_sym_smoothed(&far, &pure(1e-4)) - unsmoothed).abs() < 1e-6);
    }

    #[test]
    fn pure_norm_bounds() {
        let eps = 0.05;
        let p = pure(eps);
        for k in 0..200 {
            let r = 1e-4 * 1.1f64.powi(k);
            let n = smoothed_norm(c(r, 0.0), &p);
            assert!(n >= r.max(eps.sqrt()) - 1e-15);
        }
        let big = 1e6;
        assert!((smoothed_norm(c(big, 0.0), &p) - big) / big < 1e-12);
    }

    #[test]
    fn cutoff_profile_is_continuous_to_second_order() {
        let p = cutoff(0.2);
        for edge in [p.cutoff_inner(), p.cutoff_outer()] {
            let lo = radial_profile(edge * (1.0 - 1e-9), &p);
            let hi = radial_profile(edge * (1.0 + 1e-9), &p);
            assert!((lo.value - hi.value).abs() < 1e-8 * edge);
            assert!((lo.d1 - hi.d1).abs() < 1e-6);
            assert!((lo.d2 - hi.d2).abs() / lo.d2.abs().max(1.0 / edge) < 1e-4);
        }
    }

    #[test]
    fn cutoff_norm_bounds() {
        let p = cutoff(0.3);
        let r_out = p.cutoff_outer();
        for k in 0..=1000 {
            let r = 1.2 * r_out * k as f64 / 1000.0;
            let prof = radial_profile(r, &p);
            assert!(prof.value >= r - 0.3);
            assert!(prof.value >= r, "cutoff profile dips below |w| at r = {r}");
            assert!(prof.laplacian() > 0.0, "not subharmonic at r = {r}");
            assert!(prof.d1 <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn radial_derivatives_match_finite_differences() {
        for p in [pure(0.3), cutoff(0.5)] {
            let scale = p.smoothing_scale().max(p.cutoff_outer());
            for k in 1..60 {
                let r = scale * k as f64 / 40.0;
                let h = 1e-5 * scale;
                let f = |x: f64| radial_profile(x, &p).value;
                let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
                let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
                let prof = radial_profile(r, &p);
                assert!((prof.d1 - d1).abs() < 1e-6, "d1 at {r}");
                assert!((prof.d1_over_r - prof.d1 / r).abs() < 1e-9 * prof.d1_over_r.abs().max(1.0));
                assert!((prof.d2 - d2).abs() < 1e-3 * prof.d2.abs().max(1.0 / scale), "d2 at {r}");
            }
        }
    }
}
