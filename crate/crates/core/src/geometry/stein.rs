//! Quadratic Stein potentials on the model disks `D_n`.
//!
//! On `D_1` the potential is `g(x) + a/2 y^2` where `g` is `a/2 x^2 - C` left of
//! `x = 1/3` (a minimum at 0) and `(1-a)/2 (x-1)^2` right of `x = 2/3` (a saddle
//! at 1). In between `g''` is prescribed directly: a quintic ramp from `a` down to
//! a plateau `L`, then a ramp up to `1 - a`. Matching `g'` at both ends forces
//! the mean of `g''` over the gap to be `-1`, and `L = -(1 + a)/2` is the
//! shallowest plateau that achieves this with ramps of width
//! `tau = (a - 1)/(2 + a)`. The Laplacian is then at least `(a - 1)/2`.
//! Matching `g` fixes `C`.

use super::potential::smoothstep5;
use super::sympoint::ComplexValue;
use crate::error::GeometryError;

const LEFT: f64 = 1.0 / 3.0;
const RIGHT: f64 = 2.0 / 3.0;

/// Antiderivatives of the quintic smoothstep, vanishing at 0.
fn step_integral(u: f64) -> f64 {
    let u4 = u.powi(4);
    u4 * (2.5 - 3.0 * u + u * u)
}

fn step_integral2(u: f64) -> f64 {
    let u5 = u.powi(5);
    u5 * (0.5 - 0.5 * u + u * u / 7.0)
}

/// The blended one-variable profile `g` on D_1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D1Profile {
    alpha: f64,
    tau: f64,
    plateau: f64,
    constant: f64,
}

impl D1Profile {
    pub fn new(alpha: f64) -> Result<Self, GeometryError> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(GeometryError::InvalidAlpha(alpha));
        }
        let tau = (alpha - 1.0) / (2.0 + alpha);
        let plateau = -(1.0 + 0.5 * tau) / (1.0 - tau);
        let mut prof = D1Profile { alpha, tau, plateau, constant: 0.0 };
        let (_, _, j) = prof.blend_integrals(1.0);
        prof.constant = alpha / 18.0 + alpha / 9.0 + j / 9.0 - (1.0 - alpha) / 18.0;
        Ok(prof)
    }

    /// The constant `C` in `f_1 = a/2 |z|^2 - C`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Lower bound of `g''`, reached on the plateau.
    pub fn min_second_derivative(&self) -> f64 {
        self.plateau
    }

    /// `(G, G1, G2)` at blend parameter `t`: `g''` and its first two
    /// antiderivatives in `t` starting from 0.
    fn blend_integrals(&self, t: f64) -> (f64, f64, f64) {
        let (a, tau, l) = (self.alpha, self.tau, self.plateau);
        if t <= tau {
            let u = t / tau;
            let (s, _, _) = smoothstep5(u);
            return (
                a + (l - a) * s,
                a * t + (l - a) * tau * step_integral(u),
                0.5 * a * t * t + (l - a) * tau * tau * step_integral2(u),
            );
        }
        let g1a = a * tau + 0.5 * (l - a) * tau;
        let g2a = 0.5 * a * tau * tau + (l - a) * tau * tau / 7.0;
        if t <= 1.0 - tau {
            let d = t - tau;
            return (l, g1a + l * d, g2a + g1a * d + 0.5 * l * d * d);
        }
        let d = 1.0 - 2.0 * tau;
        let g1b = g1a + l * d;
        let g2b = g2a + g1a * d + 0.5 * l * d * d;
        let e = t - (1.0 - tau);
        let u = e / tau;
        let (s, _, _) = smoothstep5(u);
        let jump = 1.0 - a - l;
        (
            l + jump * s,
            g1b + l * e + jump * tau * step_integral(u),
            g2b + g1b * e + 0.5 * l * e * e + jump * tau * tau * step_integral2(u),
        )
    }

    /// `(g, g', g'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let a = self.alpha;
        if x <= LEFT {
            (0.5 * a * x * x - self.constant, a * x, a)
        } else if x >= RIGHT {
            let d = x - 1.0;
            (0.5 * (1.0 - a) * d * d, (1.0 - a) * d, 1.0 - a)
        } else {
            let t = 3.0 * (x - LEFT);
            let (g, g1, g2) = self.blend_integrals(t);
            let base = 0.5 * a * LEFT * LEFT - self.constant;
            let slope = a * LEFT;
            (base + slope * (x - LEFT) + g2 / 9.0, slope + g1 / 3.0, g)
        }
    }

    pub fn potential(&self, z: ComplexValue) -> f64 {
        self.eval(z.re).0 + 0.5 * self.alpha * z.im * z.im
    }

    pub fn gradient(&self, z: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.eval(z.re).1, self.alpha * z.im)
    }
}

/// The blended potential on `D_1`.
pub fn phi_d1(z: ComplexValue, alpha: f64) -> Result<f64, GeometryError> {
    Ok(D1Profile::new(alpha)?.potential(z))
}

/// `phi_1(z^n)` away from the origin; a radial quadratic `A|z|^2 + B` for
/// `|z| <= (1/4)^{1/n}`, matched to first order at that radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnPotential {
    profile: D1Profile,
    n: u32,
    radius: f64,
    quad: f64,
    shift: f64,
}

impl DnPotential {
    pub fn new(n: u32, alpha: f64) -> Result<Self, GeometryError> {
        if n < 1 {
            return Err(GeometryError::InvalidOrder(n));
        }
        let profile = D1Profile::new(alpha)?;
        let nf = n as f64;
        let radius = 0.25f64.powf(1.0 / nf);
        let quad = 0.5 * nf * alpha * radius.powf(2.0 * nf - 2.0);
        let at_radius = 0.5 * alpha * radius.powf(2.0 * nf) - profile.constant();
        Ok(DnPotential { profile, n, radius, quad, shift: at_radius - quad * radius * radius })
    }

    pub fn blend_radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, z: ComplexValue) -> f64 {
        let r = z.norm();
        if r <= self.radius {
            self.quad * r * r + self.shift
        } else {
            self.profile.potential(z.powu(self.n))
        }
    }
}

pub fn phi_dn(z: ComplexValue, n: u32, alpha: f64) -> Result<f64, GeometryError> {
    Ok(DnPotential::new(n, alpha)?.eval(z))
}

/// Gluing of `D_1` charts across a shared arc: `zeta -> 2 - zeta`.
pub fn glue_d1(zeta: ComplexValue) -> ComplexValue {
    ComplexValue::new(2.0, 0.0) - zeta
}

/// Gluing between `D_{n_i}` and `D_{n_k}`, `z^{n_i} = 2 - w^{n_k}`, returning
/// the principal branch of `w`.
pub fn glue_dn(z: ComplexValue, n_i: u32, n_k: u32) -> Result<ComplexValue, GeometryError> {
    for n in [n_i, n_k] {
        if n < 1 {
            return Err(GeometryError::InvalidOrder(n));
        }
    }
    Ok(glue_d1(z.powu(n_i)).powf(1.0 / n_k as f64))
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Minimum five-point Laplacian of `potential` over an `n x n` grid covering
/// `rect` (edges included); the stencil spacing equals the grid spacing.
pub fn check_psh<F>(potential: F, rect: Rect, n: usize) -> Result<f64, GeometryError>
where
    F: Fn(f64, f64) -> f64,
{
    if n < 2 {
        return Err(GeometryError::GridTooSmall(n));
    }
    let hx = (rect.x1 - rect.x0) / (n - 1) as f64;
    let hy = (rect.y1 - rect.y0) / (n - 1) as f64;
    let eval = |x: f64, y: f64| {
        let v = potential(x, y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeometryError::NonFinitePotential { x, y })
        }
    };
    let mut min = f64::INFINITY;
    for i in 0..n {
        let x = rect.x0 + hx * i as f64;
        for j in 0..n {
            let y = rect.y0 + hy * j as f64;
            let c = eval(x, y)?;
            let lap = (eval(x + hx, y)? - 2.0 * c + eval(x - hx, y)?) / (hx * hx)
                + (eval(x, y + hy)? - 2.0 * c + eval(x, y - hy)?) / (hy * hy);
            min = min.min(lap);
        }
    }
    Ok(min)
}
