use crate::error::GeometryError;
use num_complex::Complex64;

pub type ComplexValue = Complex64;

/// Builds a complex number, rejecting NaN and infinities.
pub fn complex(re: f64, im: f64) -> Result<ComplexValue, GeometryError> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(GeometryError::NonFinite { re, im })
    }
}

/// An unordered pair `{z1, z2}` of points of the plane, i.e. a point of Sym^2(C).
///
/// The symmetric coordinates are `z = (z1 + z2) / 2` and `w = ((z1 - z2) / 2)^2`;
/// both are invariant under swapping the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymPoint {
    z1: ComplexValue,
    z2: ComplexValue,
}

impl SymPoint {
    pub fn new(z1: ComplexValue, z2: ComplexValue) -> Result<Self, GeometryError> {
        for v in [z1, z2] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(GeometryError::NonFinite { re: v.re, im: v.im });
            }
        }
        Ok(SymPoint { z1, z2 })
    }

    /// Recovers the pair as `z +- sqrt(w)` (principal root first).
    pub fn from_zw(z: ComplexValue, w: ComplexValue) -> Result<Self, GeometryError> {
        let root = w.sqrt();
        SymPoint::new(z + root, z - root)
    }

    pub fn z1(&self) -> ComplexValue {
        self.z1
    }

    pub fn z2(&self) -> ComplexValue {
        self.z2
    }

    pub fn z(&self) -> ComplexValue {
        0.5 * (self.z1 + self.z2)
    }

    /// Half-difference `(z1 - z2) / 2`, one of the two square roots of `w`.
    pub fn half_difference(&self) -> ComplexValue {
        0.5 * (self.z1 - self.z2)
    }

    pub fn w(&self) -> ComplexValue {
        let u = self.half_difference();
        u * u
    }

    /// Real state vector `(Re z, Im z, Re w, Im w)`.
    pub fn to_state(&self) -> [f64; 4] {
        let z = self.z();
        let w = self.w();
        [z.re, z.im, w.re, w.im]
    }

    pub fn from_state(s: &[f64; 4]) -> Result<Self, GeometryError> {
        SymPoint::from_zw(complex(s[0], s[1])?, complex(s[2], s[3])?)
    }

    /// The pair sorted by real part (ties by imaginary part).
    pub fn sorted_by_real(&self) -> (ComplexValue, ComplexValue) {
        let (a, b) = (self.z1, self.z2);
        if (a.re, a.im) <= (b.re, b.im) {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Distance to another unordered pair, minimized over the two matchings.
    pub fn pair_distance(&self, other: &SymPoint) -> f64 {
        let straight = (self.z1 - other.z1).norm().max((self.z2 - other.z2).norm());
        let swapped = (self.z1 - other.z2).norm().max((self.z2 - other.z1).norm());
        straight.min(swapped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_finite() {
        assert!(SymPoint::new(Complex64::new(f64::NAN, 0.0), Complex64::new(0.0, 0.0)).is_err());
        assert!(complex(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn diagonal_has_zero_w() {
        let p = SymPoint::new(Complex64::new(1.0, 2.0), Complex64::new(1.0, 2.0)).unwrap();
        assert_eq!(p.w(), Complex64::new(0.0, 0.0));
        assert_eq!(p.z(), Complex64::new(1.0, 2.0));
    }

    proptest! {
        #[test]
        fn symmetric_coordinates_round_trip(
            a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64
        ) {
            let p = SymPoint::new(Complex64::new(a, b), Complex64::new(c, d)).unwrap();
            let q = SymPoint::from_zw(p.z(), p.w()).unwrap();
            let scale = 1.0f64.max(p.z1().norm()).max(p.z2().norm());
            prop_assert!(p.pair_distance(&q) / scale < 1e-12);
        }

        #[test]
        fn swap_invariance(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64, d in -10.0..10.0f64) {
            let p = SymPoint::new(Complex64::new(a, b), Complex64::new(c, d)).unwrap();
            let q = SymPoint::new(Complex64::new(c, d), Complex64::new(a, b)).unwrap();
            prop_assert_eq!(p.z(), q.z());
            prop_assert_eq!(p.w(), q.w());
        }
    }
}
