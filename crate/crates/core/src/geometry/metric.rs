//! Kahler data of the smoothed potential.
//!
//! The potential splits as `2 phi(z) + F(w)` with both blocks real-valued
//! functions of one complex variable, so `dd^c` is block diagonal:
//! `omega = lz dx^dy + lw du^dv` where `lz`, `lw` are the Euclidean Laplacians
//! of the two blocks. The associated metric is `lz` (resp. `lw`) times the
//! Euclidean one, which makes gradients easy to invert.

use nalgebra::Matrix4;

use super::params::{SmoothingMode, SteinParams};
use super::potential::{phi_1d_gradient, phi_sym_state, radial_profile, w_potential_gradient};
use super::sympoint::{ComplexValue, SymPoint};
use crate::error::GeometryError;

/// A tangent vector at a point of Sym^2(C) in `(z, w)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub dz: ComplexValue,
    pub dw: ComplexValue,
}

impl TangentVector {
    pub fn to_array(&self) -> [f64; 4] {
        [self.dz.re, self.dz.im, self.dw.re, self.dw.im]
    }

    pub fn from_array(v: &[f64; 4]) -> Self {
        TangentVector {
            dz: ComplexValue::new(v[0], v[1]),
            dw: ComplexValue::new(v[2], v[3]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// The same vector in pair coordinates, given the base point.
    ///
    /// With `u = (z1 - z2)/2`, `dz1 = dz + dw/(2u)` and `dz2 = dz - dw/(2u)`;
    /// undefined on the diagonal.
    pub fn to_pair(&self, base: &SymPoint) -> Option<(ComplexValue, ComplexValue)> {
        let u = base.half_difference();
        if u.norm() == 0.0 {
            return None;
        }
        let du = self.dw / (2.0 * u);
        Some((self.dz + du, self.dz - du))
    }
}

/// Closed-form factor relating the Kahler gradient in `w` to the Euclidean one
/// for the pure smoothing: `2 (|w|^2 + eps)^{3/2} / (|w|^2 + 2 eps)`.
pub fn kahler_factor(w: ComplexValue, params: &SteinParams) -> Result<f64, GeometryError> {
    if params.smoothing() != SmoothingMode::Pure {
        return Err(GeometryError::ClosedFormUnavailable);
    }
    let eps = params.epsilon();
    let r2 = w.norm_sqr();
    Ok(2.0 * (r2 + eps).powf(1.5) / (r2 + 2.0 * eps))
}

/// Laplacians `(lz, lw)` of the two potential blocks at a state.
pub(crate) fn levi_coefficients(s: &[f64; 4], params: &SteinParams) -> (f64, f64) {
    let r = s[2].hypot(s[3]);
    (2.0, 0.5 * radial_profile(r, params).laplacian())
}

/// Mode-independent version of the `w` factor, `1 / lw`.
pub fn w_metric_factor(w: ComplexValue, params: &SteinParams) -> f64 {
    2.0 / radial_profile(w.norm(), params).laplacian()
}

fn block_form(lz: f64, lw: f64) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 1)] = lz;
    m[(1, 0)] = -lz;
    m[(2, 3)] = lw;
    m[(3, 2)] = -lw;
    m
}

/// `omega(e_a, e_b)` in the real frame `(Re z, Im z, Re w, Im w)`.
///
/// Pure mode uses the closed form; cutoff mode assembles `dd^c` from second
/// finite differences of the potential.
pub fn symplectic_form(p: &SymPoint, params: &SteinParams) -> Result<Matrix4<f64>, GeometryError> {
    let m = match params.smoothing() {
        SmoothingMode::Pure => {
            let (lz, lw) = levi_coefficients(&p.to_state(), params);
            block_form(lz, lw)
        }
        SmoothingMode::Cutoff => symplectic_form_fd(p, params),
    };
    check_nondegenerate(m)
}

fn check_nondegenerate(m: Matrix4<f64>) -> Result<Matrix4<f64>, GeometryError> {
    let det = m.determinant();
    if !(det.abs() >= 1e-12) {
        return Err(GeometryError::Degenerate { det });
    }
    Ok(m)
}

/// Finite-difference assembly of `dd^c` of the smoothed potential.
pub fn symplectic_form_fd(p: &SymPoint, params: &SteinParams) -> Matrix4<f64> {
    let s = p.to_state();
    let zscale = 1.0f64.max(s[0].hypot(s[1]));
    let r = s[2].hypot(s[3]);
    let wscale = r.max(params.smoothing_scale());
    let h = [1e-4 * zscale, 1e-4 * zscale, 1e-3 * wscale, 1e-3 * wscale];
    let f = |v: &[f64; 4]| phi_sym_state(v, params);
    let mut hess = Matrix4::<f64>::zeros();
    for a in 0..4 {
        for b in a..4 {
            let val = if a == b {
                let mut plus = s;
                let mut minus = s;
                plus[a] += h[a];
                minus[a] -= h[a];
                (f(&plus) - 2.0 * f(&s) + f(&minus)) / (h[a] * h[a])
            } else {
                let mut acc = 0.0;
                for (sa, sb, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                    let mut v = s;
                    v[a] += sa * h[a];
                    v[b] += sb * h[b];
                    acc += sign * f(&v);
                }
                acc / (4.0 * h[a] * h[b])
            };
            hess[(a, b)] = val;
            hess[(b, a)] = val;
        }
    }
    form_from_real_hessian(&hess)
}

/// Converts a real Hessian into the matrix of `2i d d-bar`.
///
/// With `H_jk = d^2/(d zeta_j d conj(zeta_k))`:
/// `omega(dx_j, dx_k) = omega(dy_j, dy_k) = -4 Im H_jk`,
/// `omega(dx_j, dy_k) = 4 Re H_jk`.
fn form_from_real_hessian(hess: &Matrix4<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            let re = 0.25 * (hess[(xj, xk)] + hess[(yj, yk)]);
            let im = 0.25 * (hess[(xj, yk)] - hess[(yj, xk)]);
            m[(xj, xk)] = -4.0 * im;
            m[(yj, yk)] = -4.0 * im;
            m[(xj, yk)] = 4.0 * re;
            m[(yj, xk)] = -4.0 * re;
        }
    }
    m
}

/// Upward gradient of the smoothed potential in its own Kahler metric.
///
/// This is the Liouville field: its flow scales `omega` by `e^s`. The
/// downward flow is its negative, and in the unperturbed region its `z` part
/// reproduces `(e^{(a-1)t} x, e^{-at} y)`.
pub fn liouville_vector_field(p: &SymPoint, params: &SteinParams) -> TangentVector {
    TangentVector::from_array(&liouville_state(&p.to_state(), params))
}

pub(crate) fn liouville_state(s: &[f64; 4], params: &SteinParams) -> [f64; 4] {
    let z = ComplexValue::new(s[0], s[1]);
    let w = ComplexValue::new(s[2], s[3]);
    // gradient of 2 phi(z) over lz = 2
    let gz = phi_1d_gradient(z, params.alpha());
    let prof = radial_profile(w.norm(), params);
    let k = 2.0 / prof.laplacian();
    let gw = w_potential_gradient(w, params);
    [gz.re, gz.im, k * gw.re, k * gw.im]
}

/// Velocity of the downward flow at a real state.
pub(crate) fn downward_state(s: &[f64; 4], params: &SteinParams) -> [f64; 4] {
    let v = liouville_state(s, params);
    [-v[0], -v[1], -v[2], -v[3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pure(eps: f64) -> SteinParams {
        SteinParams::new(1.5, eps, SmoothingMode::Pure).unwrap()
    }

    #[test]
    fn kahler_factor_examples() {
        let p = pure(0.04);
        assert!((kahler_factor(c(0.0, 0.0), &p).unwrap() - 0.2).abs() < 1e-15);
        let big = kahler_factor(c(1e4, 0.0), &p).unwrap();
        assert!((big / 2e4 - 1.0).abs() < 1e-6);
        let one = kahler_factor(c(1.0, 0.0), &pure(1.0)).unwrap();
        assert!((one - 2.0 * 2f64.powf(1.5) / 3.0).abs() < 1e-12);
        assert!((one - 1.8856).abs() < 1e-4);
        let cut = SteinParams::default();
        assert_eq!(kahler_factor(c(0.0, 0.0), &cut), Err(GeometryError::ClosedFormUnavailable));
    }

    #[test]
    fn kahler_factor_lower_bound() {
        let eps = 0.1;
        let p = pure(eps);
        for i in 0..100 {
            for j in 0..100 {
                let w = c(-5.0 + 0.1 * i as f64, -5.0 + 0.1 * j as f64);
                let k = kahler_factor(w, &p).unwrap();
                assert!(k >= eps.sqrt());
                if w.norm() > 0.0 {
                    assert!(k > eps.sqrt());
                }
            }
        }
    }

    #[test]
    fn generic_factor_matches_closed_form() {
        let p = pure(0.3);
        for w in [c(0.0, 0.0), c(0.2, -0.7), c(5.0, 1.0)] {
            let a = kahler_factor(w, &p).unwrap();
            assert!((w_metric_factor(w, &p) - a).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn form_at_diagonal() {
        let p = SymPoint::new(c(0.3, 1.0), c(0.3, 1.0)).unwrap();
        let m = symplectic_form(&p, &pure(1.0)).unwrap();
        // i dz^dzbar = 2 dx^dy; the w block is (1/2) i dw^dwbar = du^dv
        assert_eq!(m[(0, 1)], 2.0);
        assert!((m[(2, 3)] - 1.0).abs() < 1e-15);
        assert_eq!(m[(0, 2)], 0.0);
        assert!((m + m.transpose()).norm() == 0.0);
        assert!(m.determinant() > 0.0);
    }

    #[test]
    fn w_block_decays_like_unsmoothed() {
        let w = 400.0;
        let p = SymPoint::from_zw(c(0.0, 0.0), c(w, 0.0)).unwrap();
        let m = symplectic_form(&p, &pure(0.01)).unwrap();
        // coefficient of i dw^dwbar is m/2; unsmoothed 1/2 |w| gives 1/(4|w|)
        assert!((0.5 * m[(2, 3)] * 4.0 * w - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cutoff_form_outside_support_is_flat_cone() {
        let params = SteinParams::default();
        let p = SymPoint::from_zw(c(0.5, -0.2), c(0.3, 0.4)).unwrap();
        let m = symplectic_form(&p, &params).unwrap();
        assert!((m[(0, 1)] - 2.0).abs() < 1e-5);
        assert!((m[(2, 3)] - 1.0).abs() < 1e-5);
        assert!(m[(0, 2)].abs() < 1e-5 && m[(1, 3)].abs() < 1e-5);
    }

    #[test]
    fn liouville_field_examples() {
        let params = pure(0.01);
        let p = SymPoint::from_zw(c(0.0, 0.0), c(50.0, 0.0)).unwrap();
        let v = liouville_vector_field(&p, &params);
        // downward: Re w grows like e^t Re w0 at alpha = 3/2
        assert!((-v.dw.re / 50.0 - 1.0).abs() < 1e-4);
        let diag = SymPoint::new(c(0.2, 0.1), c(0.2, 0.1)).unwrap();
        let v = liouville_vector_field(&diag, &params);
        assert!(-v.dw.re > 0.0);
        assert_eq!(v.dw.im, 0.0);
        let imag = SymPoint::new(c(0.0, 2.0), c(0.0, -1.0)).unwrap();
        let v = liouville_vector_field(&imag, &params);
        assert_eq!(v.dz.re, 0.0);
        assert_eq!(v.dz, c(0.0, 1.5 * 0.5));
    }

    #[test]
    fn downward_z_rates_match_closed_form() {
        let params = SteinParams::new(1.8, 0.1, SmoothingMode::Cutoff).unwrap();
        let v = downward_state(&[2.0, 3.0, 1.0, 0.0], &params);
        assert!((v[0] - 0.8 * 2.0).abs() < 1e-15);
        assert!((v[1] + 1.8 * 3.0).abs() < 1e-15);
    }

    #[test]
    fn pair_velocity_in_unperturbed_region() {
        // away from the diagonal each point follows its own saddle flow
        let params = SteinParams::default();
        let p = SymPoint::new(c(1.0, 0.5), c(-2.0, 0.25)).unwrap();
        let v = TangentVector::from_array(&downward_state(&p.to_state(), &params));
        let (d1, d2) = v.to_pair(&p).unwrap();
        assert!((d1 - c(0.5, -0.75)).norm() < 1e-12);
        assert!((d2 - c(-1.0, -0.375)).norm() < 1e-12);
    }

    #[test]
    fn liouville_flow_dilates_omega() {
        // L_Z omega = omega, i.e. d(iota_Z omega) = omega: check the divergence form
        // blockwise: div(lambda Z) = lambda in each complex line.
        for params in [pure(0.2), SteinParams::default()] {
            for s in [[0.3, -0.2, 0.01, 0.02], [1.0, 1.0, 0.5, -0.3], [0.0, 0.0, 1e-3, 0.0]] {
                let h = 1e-6;
                let lam = |v: &[f64; 4]| levi_coefficients(v, &params);
                let mut div = [0.0; 2];
                for a in 0..4 {
                    let mut sp = s;
                    let mut sm = s;
                    sp[a] += h;
                    sm[a] -= h;
                    let block = a / 2;
                    let lp = if block == 0 { lam(&sp).0 } else { lam(&sp).1 };
                    let lm = if block == 0 { lam(&sm).0 } else { lam(&sm).1 };
                    let fp = lp * liouville_state(&sp, &params)[a];
                    let fm = lm * liouville_state(&sm, &params)[a];
                    div[block] += (fp - fm) / (2.0 * h);
                }
                let (lz, lw) = lam(&s);
                assert!((div[0] - lz).abs() < 1e-6 * lz);
                assert!((div[1] - lw).abs() < 1e-4 * lw, "{div:?} vs {lw}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn fd_form_matches_closed_form(
            a in -3.0..3.0f64, b in -3.0..3.0f64, u in -2.0..2.0f64, v in -2.0..2.0f64, eps in 0.05..1.0f64
        ) {
            let params = pure(eps);
            let p = SymPoint::from_zw(c(a, b), c(u, v)).unwrap();
            let exact = symplectic_form(&p, &params).unwrap();
            let fd = symplectic_form_fd(&p, &params);
            prop_assert!((exact - fd).norm() <= 1e-6 * exact.norm());
        }
    }
}
