//! Points of the extended complex plane and the principal square root.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite point of the complex plane.
pub type ComplexPoint = Complex64;

/// Degree `n` of `p_n(z) = z^n - 1`; always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(u32);

impl Degree {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDegree { got: n, min: 2 });
        }
        Ok(Degree(n))
    }

    /// Degree with the additional `n >= 5` requirement of the characteristic
    /// function analysis.
    pub fn at_least_five(n: u32) -> Result<Self> {
        if n < 5 {
            return Err(Error::InvalidDegree { got: n, min: 5 });
        }
        Ok(Degree(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// The `j`-th root of unity `e^{2 pi i j / n}`.
    pub fn root(self, j: u32) -> ComplexPoint {
        Complex64::from_polar(1.0, TAU * f64::from(j % self.0) / self.as_f64())
    }

    pub fn roots(self) -> impl Iterator<Item = ComplexPoint> {
        (0..self.0).map(move |j| self.root(j))
    }

    /// Angle `pi / n` between a root ray and the adjacent bisecting ray.
    #[inline]
    pub fn half_sector(self) -> f64 {
        PI / self.as_f64()
    }

    /// `(n - 1)^{2/(n - 4)}`, the upper bound on the outer boundary radius.
    /// Only meaningful for `n >= 5`.
    pub fn outer_radius_bound(self) -> f64 {
        let n = self.as_f64();
        (n - 1.0).powf(2.0 / (n - 4.0))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Finite(ComplexPoint),
    Infinity,
}

impl ExtendedPoint {
    pub const ZERO: ExtendedPoint = ExtendedPoint::Finite(Complex64::new(0.0, 0.0));

    /// Wraps `z`, promoting anything non-finite (overflow, NaN) to infinity.
    pub fn from_complex(z: ComplexPoint) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtendedPoint::Finite(z)
        } else {
            ExtendedPoint::Infinity
        }
    }

    pub fn finite(self) -> Option<ComplexPoint> {
        match self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtendedPoint::Finite(z) if z.re == 0.0 && z.im == 0.0)
    }

    /// Modulus, with infinity mapped to `f64::INFINITY`.
    pub fn modulus(self) -> f64 {
        match self {
            ExtendedPoint::Finite(z) => z.norm(),
            ExtendedPoint::Infinity => f64::INFINITY,
        }
    }
}

impl From<ComplexPoint> for ExtendedPoint {
    fn from(z: ComplexPoint) -> Self {
        ExtendedPoint::from_complex(z)
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(z) => write!(f, "{} {:+}i", z.re, z.im),
            ExtendedPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Argument of `z` in `(-pi, pi]`. A negative zero imaginary part counts as
/// zero, so the negative real axis has argument `pi`.
#[inline]
pub fn principal_arg(z: ComplexPoint) -> f64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// The principal square root: `Re w >= 0`, and `Im w >= 0` when `Re w = 0`.
pub fn principal_sqrt(z: ComplexPoint) -> ComplexPoint {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let t = ((z.re.abs() + z.re.hypot(im)) / 2.0).sqrt();
    if z.re >= 0.0 {
        Complex64::new(t, im / (2.0 * t))
    } else {
        Complex64::new(im.abs() / (2.0 * t), t.copysign(im))
    }
}

/// Reduces an angle to `(-pi, pi]`. Values within a rounding band of `-pi`
/// are taken to be exactly `pi`: a point that sits on a bisecting ray up to
/// rounding is treated as lying on it.
pub fn reduce_angle(x: f64) -> f64 {
    let tol = 64.0 * f64::EPSILON * x.abs().max(PI);
    let mut y = (x + PI).rem_euclid(TAU) - PI;
    if y <= -PI + tol {
        y = PI;
    }
    y
}

/// `|cos(x)|` with `x` reduced modulo `pi` first.
#[inline]
pub fn abs_cos(x: f64) -> f64 {
    x.rem_euclid(PI).cos().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexPoint {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_of_positive_real() {
        assert_eq!(principal_sqrt(c(4.0, 0.0)), c(2.0, 0.0));
    }

    #[test]
    fn sqrt_of_negative_real_is_plus_i() {
        assert_eq!(principal_sqrt(c(-1.0, 0.0)), c(0.0, 1.0));
        // negative zero still lies on the branch with argument pi
        assert_eq!(principal_sqrt(c(-1.0, -0.0)), c(0.0, 1.0));
    }

    #[test]
    fn sqrt_squares_back() {
        let z = c(-2.0, -2.0);
        let w = principal_sqrt(z);
        assert!(w.re > 0.0);
        assert!((w * w - z).norm() < 1e-15);
    }

    #[test]
    fn sqrt_of_zero() {
        assert_eq!(principal_sqrt(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn reduce_angle_range() {
        assert_eq!(reduce_angle(PI), PI);
        assert_eq!(reduce_angle(-PI), PI);
        assert!((reduce_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((reduce_angle(0.5) - 0.5).abs() < 1e-15);
        assert!((reduce_angle(-0.5 - TAU) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn degree_bounds() {
        assert!(Degree::new(1).is_err());
        assert!(Degree::new(2).is_ok());
        assert!(Degree::at_least_five(4).is_err());
        assert_eq!(Degree::new(5).unwrap().outer_radius_bound(), 16.0);
    }

    #[test]
    fn nonfinite_promotes_to_infinity() {
        assert!(ExtendedPoint::from_complex(c(f64::INFINITY, 0.0)).is_infinite());
        assert!(ExtendedPoint::from_complex(c(f64::NAN, 1.0)).is_infinite());
        assert!(ExtendedPoint::ZERO.is_zero());
    }
}
