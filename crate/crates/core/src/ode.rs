//! Dormand-Prince 5(4) with first-same-as-last reuse and step-size control.

use crate::error::FlowError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-9, atol: 1e-15, max_step: 0.1, initial_step: 1e-3 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Adaptive explicit integrator for an autonomous system `y' = f(y)`.
pub struct Dopri5<const N: usize, F>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    f: F,
    ctl: StepControl,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
}

/// One step proposal: the fifth-order update, its slope at the end point and
/// the scaled error norm.
struct Trial<const N: usize> {
    y: [f64; N],
    k7: [f64; N],
    err: f64,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    pub fn new(f: F, y0: [f64; N], ctl: StepControl) -> Self {
        let k1 = f(&y0);
        let h = ctl.initial_step.min(ctl.max_step);
        Dopri5 { f, ctl, t: 0.0, y: y0, k1, h }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Slope at the current point.
    pub fn slope(&self) -> &[f64; N] {
        &self.k1
    }

    fn trial(&self, y: &[f64; N], k1: &[f64; N], h: f64) -> Trial<N> {
        let f = &self.f;
        let k2 = f(&axpy(y, h, &[(A21, k1)]));
        let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(&axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(&y_new);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.ctl.atol + self.ctl.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / scale).abs());
        }
        if !y_new.iter().all(|v| v.is_finite()) {
            err = f64::INFINITY;
        }
        Trial { y: y_new, k7, err }
    }

    /// Takes one accepted step, never past `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<(), FlowError> {
        let min_step = 1e-14 * self.t.abs().max(1.0);
        let mut rejected_nonfinite = 0;
        loop {
            let h = self.h.min(self.ctl.max_step).min(t_limit - self.t);
            if h < min_step {
                let rest = t_limit - self.t;
                if rest < min_step {
                    // a sliver below the minimum step: finish it with Euler
                    if rest > 0.0 {
                        for (y, k) in self.y.iter_mut().zip(self.k1) {
                            *y += rest * k;
                        }
                        self.t = t_limit;
                        self.k1 = (self.f)(&self.y);
                    }
                    return Ok(());
                }
                return Err(FlowError::StepUnderflow { t: self.t });
            }
            let trial = self.trial(&self.y, &self.k1, h);
            if trial.err <= 1.0 {
                self.t += h;
                self.y = trial.y;
                self.k1 = trial.k7;
                let grow = if trial.err == 0.0 { 5.0 } else { (0.9 * trial.err.powf(-0.2)).clamp(0.2, 5.0) };
                self.h = h * grow;
                return Ok(());
            }
            if !trial.err.is_finite() {
                rejected_nonfinite += 1;
                if rejected_nonfinite > 60 {
                    return Err(FlowError::NonFinite { t: self.t });
                }
                self.h = 0.1 * h;
            } else {
                self.h = h * (0.9 * trial.err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
    }

    /// State after a single unchecked step of length `h` from the current point;
    /// used to bisect inside the last accepted step.
    pub fn peek(&self, from: &[f64; N], h: f64) -> [f64; N] {
        let k1 = (self.f)(from);
        self.trial(from, &k1, h).y
    }
}

/// Locates the first zero of `event` on `[0, h]` given a sign change between
/// `y0` (event false) and the end of the step (event true). Returns the offset.
pub fn bisect_event<const N: usize, F, E>(
    solver: &Dopri5<N, F>,
    y0: &[f64; N],
    h: f64,
    event: E,
    iterations: usize,
) -> (f64, [f64; N])
where
    F: Fn(&[f64; N]) -> [f64; N],
    E: Fn(&[f64; N]) -> bool,
{
    let (mut lo, mut hi) = (0.0, h);
    let mut y_hi = solver.peek(y0, h);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let y_mid = solver.peek(y0, mid);
        if event(&y_mid) {
            hi = mid;
            y_hi = y_mid;
        } else {
            lo = mid;
        }
    }
    (hi, y_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut s = Dopri5::new(|y: &[f64; 1]| [0.5 * y[0]], [1.0], StepControl::default());
        while s.t() < 10.0 {
            s.step(10.0).unwrap();
        }
        assert_eq!(s.t(), 10.0);
        assert!((s.y()[0] / 5f64.exp() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tiny_spans_terminate() {
        for span in [1e-300, 1e-20, 5e-15] {
            let mut s = Dopri5::new(|y: &[f64; 1]| [y[0]], [1.0], StepControl::default());
            while s.t() < span {
                s.step(span).unwrap();
            }
            assert_eq!(s.t(), span);
            assert!((s.y()[0] - 1.0 - span).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_oscillator_period() {
        let ctl = StepControl { rtol: 1e-11, ..StepControl::default() };
        let mut s = Dopri5::new(|y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], ctl);
        let period = 2.0 * std::f64::consts::PI;
        while s.t() < period {
            s.step(period).unwrap();
        }
        assert!((s.y()[0] - 1.0).abs() < 1e-9);
        assert!(s.y()[1].abs() < 1e-9);
    }

    #[test]
    fn fifth_order_convergence() {
        // one fixed step of y' = y at two sizes: local error scales like h^6
        let s = Dopri5::new(|y: &[f64; 1]| [y[0]], [1.0], StepControl::default());
        let e1 = (s.peek(&[1.0], 0.2)[0] - 0.2f64.exp()).abs();
        let e2 = (s.peek(&[1.0], 0.1)[0] - 0.1f64.exp()).abs();
        let order = (e1 / e2).log2();
        assert!(order > 5.5 && order < 6.5, "{order}");
    }

    #[test]
    fn blow_up_is_reported() {
        let mut s = Dopri5::new(|y: &[f64; 1]| [y[0] * y[0]], [1.0], StepControl::default());
        let mut res = Ok(());
        while res.is_ok() && s.t() < 2.0 {
            res = s.step(2.0);
        }
        assert!(res.is_err());
    }

    #[test]
    fn bisection_finds_crossing() {
        let mut s = Dopri5::new(|y: &[f64; 1]| [1.0 + 0.0 * y[0]], [0.0], StepControl::default());
        let (mut t0, mut y0) = (s.t(), *s.y());
        while s.y()[0] < 0.05 {
            t0 = s.t();
            y0 = *s.y();
            s.step(1.0).unwrap();
        }
        let h = s.t() - t0;
        let (dt, y) = bisect_event(&s, &y0, h, |y| y[0] >= 0.05, 60);
        assert!((t0 + dt - 0.05).abs() < 1e-12);
        assert!((y[0] - 0.05).abs() < 1e-12);
    }
}
