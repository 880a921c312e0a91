//! Laguerre's iteration for `p_n(z) = z^n - 1` in its closed form, and for a
//! general polynomial in plain double precision.

use num_complex::Complex64;

use crate::complex::{abs_cos, principal_arg, principal_sqrt, reduce_angle};
use crate::complex::{ComplexPoint, Degree, ExtendedPoint};
use crate::error::{Error, Result};

/// Beyond `|log|w|| > LOG_SPLIT` the closed form is evaluated with the huge or
/// tiny factor divided out.
const LOG_SPLIT: f64 = 300.0;

/// One step of the closed-form iteration
///
/// `L_p(z) = z (1/sqrt(z^n) + (n - 1)) / (sqrt(z^n) + (n - 1))`
///
/// with the principal square root. `0` and `infinity` swap. `z^n` is never
/// formed; the root is built from `(n/2) log|z|` and the reduced angle `n arg z`
/// so that large degrees do not overflow.
pub fn laguerre_simplified(n: Degree, z: ExtendedPoint) -> ExtendedPoint {
    let z = match z {
        ExtendedPoint::Infinity => return ExtendedPoint::ZERO,
        ExtendedPoint::Finite(z) if z.re == 0.0 && z.im == 0.0 => return ExtendedPoint::Infinity,
        ExtendedPoint::Finite(z) => z,
    };
    let nf = n.as_f64();
    let theta = principal_arg(z);
    let log_r = z.norm().ln();
    let log_w = 0.5 * nf * log_r;
    let phi = 0.5 * reduce_angle(nf * theta);

    let value = if log_w.abs() <= LOG_SPLIT {
        let w = Complex64::from_polar(log_w.exp(), phi);
        z * ((w.inv() + (nf - 1.0)) / (w + (nf - 1.0)))
    } else if log_w > 0.0 {
        // |w| huge: L = (z/w) ((n-1) + 1/w) / (1 + (n-1)/w)
        let u = Complex64::from_polar((-log_w).exp(), -phi);
        let z_over_w = Complex64::from_polar((log_r - log_w).exp(), theta - phi);
        z_over_w * (((nf - 1.0) + u) / (1.0 + (nf - 1.0) * u))
    } else {
        // |w| tiny: L = (z/w) (1 + (n-1) w) / (w + (n-1))
        let w = Complex64::from_polar(log_w.exp(), phi);
        let z_over_w = Complex64::from_polar((log_r - log_w).exp(), theta - phi);
        z_over_w * ((1.0 + (nf - 1.0) * w) / (w + (nf - 1.0)))
    };
    ExtendedPoint::from_complex(value)
}

/// Convenience wrapper for finite, nonzero input.
pub fn laguerre_simplified_finite(n: Degree, z: ComplexPoint) -> ExtendedPoint {
    laguerre_simplified(n, ExtendedPoint::Finite(z))
}

/// `|L_p(r e^{i theta})|^2` in closed form, for `r > 0`.
pub fn modulus_squared_formula(n: Degree, r: f64, theta: f64) -> f64 {
    let nf = n.as_f64();
    let c = abs_cos(0.5 * nf * theta);
    let a = r.powf(0.5 * nf);
    let k = nf - 1.0;
    let ratio = if a <= 1.0 {
        (1.0 + k * k * a * a + 2.0 * k * c * a) / (a * a + k * k + 2.0 * k * c * a)
    } else {
        let b = a.recip();
        (b * b + k * k + 2.0 * k * c * b) / (1.0 + k * k * b * b + 2.0 * k * c * b)
    };
    ratio * r.powf(-(nf - 2.0))
}

/// Predicted relative error of the computed square root in the general form:
/// `sqrt(eps (1 + |z|^n))`, saturating at `f64::MAX`.
pub fn discriminant_relative_error_estimate(n: Degree, z: ComplexPoint, machine_eps: f64) -> f64 {
    let zn = z.norm().powf(n.as_f64());
    let v = (machine_eps * (1.0 + zn)).sqrt();
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Coefficients of a polynomial, constant term first, with the first and
/// second derivatives differentiated exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCoeffs {
    coeffs: Vec<ComplexPoint>,
    d1: Vec<ComplexPoint>,
    d2: Vec<ComplexPoint>,
}

impl PolynomialCoeffs {
    pub fn new(coeffs: Vec<ComplexPoint>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::InvalidPolynomial(format!(
                "need degree >= 2, got {} coefficients",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        let lead = coeffs[coeffs.len() - 1];
        if lead.re == 0.0 && lead.im == 0.0 {
            return Err(Error::InvalidPolynomial("leading coefficient is zero".into()));
        }
        let d1 = derivative(&coeffs);
        let d2 = derivative(&d1);
        Ok(PolynomialCoeffs { coeffs, d1, d2 })
    }

    /// `z^n - 1`.
    pub fn unity(n: Degree) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n.get() as usize + 1];
        c[0] = Complex64::new(-1.0, 0.0);
        c[n.get() as usize] = Complex64::new(1.0, 0.0);
        PolynomialCoeffs::new(c).expect("z^n - 1 is a valid polynomial")
    }

    /// Monic polynomial with the given roots (at least two).
    pub fn from_roots(roots: &[ComplexPoint]) -> Result<Self> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        PolynomialCoeffs::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[ComplexPoint] {
        &self.coeffs
    }

    /// `(p(z), p'(z), p''(z))`, each by Horner's rule.
    pub fn eval(&self, z: ComplexPoint) -> (ComplexPoint, ComplexPoint, ComplexPoint) {
        (horner(&self.coeffs, z), horner(&self.d1, z), horner(&self.d2, z))
    }
}

fn derivative(c: &[ComplexPoint]) -> Vec<ComplexPoint> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| ck * k as f64)
        .collect()
}

fn horner(c: &[ComplexPoint], z: ComplexPoint) -> ComplexPoint {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
}

/// One step of the general Laguerre iteration
///
/// `L(z) = z - n p / (p' +- sqrt((n-1)^2 p'^2 - n(n-1) p p''))`
///
/// evaluated naively in double precision. The sign maximizes the modulus of
/// the denominator; on an exact tie `+` is used.
pub fn laguerre_general(p: &PolynomialCoeffs, z: ComplexPoint) -> Result<ComplexPoint> {
    let (pz, dp, ddp) = p.eval(z);
    if pz.re == 0.0 && pz.im == 0.0 {
        return Ok(z);
    }
    let n = p.degree() as f64;
    let disc = (n - 1.0) * (n - 1.0) * dp * dp - n * (n - 1.0) * pz * ddp;
    let s = principal_sqrt(disc);
    let plus = dp + s;
    let minus = dp - s;
    let denom = if minus.norm() > plus.norm() { minus } else { plus };
    if denom.re == 0.0 && denom.im == 0.0 {
        return Err(Error::DegenerateDenominator { re: z.re, im: z.im });
    }
    let w = z - n * pz / denom;
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonFinite { re: z.re, im: z.im })
    }
}

/// General-form step on the extended plane with the `0 <-> infinity`
/// convention: infinity maps to 0, a vanishing denominator or an overflow
/// maps to infinity.
pub fn laguerre_general_extended(p: &PolynomialCoeffs, z: ExtendedPoint) -> ExtendedPoint {
    match z {
        ExtendedPoint::Infinity => ExtendedPoint::ZERO,
        ExtendedPoint::Finite(z) => match laguerre_general(p, z) {
            Ok(w) => ExtendedPoint::Finite(w),
            Err(_) => ExtendedPoint::Infinity,
        },
    }
}

/// The iteration in coordinates relative to the root `1`: returns `d'` with
/// `L_p(1 + d) = 1 + d'`. By rotational symmetry the same map describes the
/// offset from every root.
///
/// Near the root the numerator `(1+d)^{1-n/2} - (1+d)^{n/2} + (n-1) d` is
/// summed as its binomial series, whose terms of order below three cancel
/// identically; the offset then keeps full relative precision far below the
/// spacing of doubles around 1.
pub fn root_relative_step(n: Degree, d: ComplexPoint) -> ComplexPoint {
    let nf = n.as_f64();
    if d.norm() * nf > 0.5 {
        return match laguerre_simplified_finite(n, Complex64::new(1.0, 0.0) + d) {
            ExtendedPoint::Finite(w) => w - 1.0,
            ExtendedPoint::Infinity => Complex64::new(f64::INFINITY, 0.0),
        };
    }
    let m = 0.5 * nf;
    // c_j = C(1 - m, j) - C(m, j), generated by the binomial recurrences.
    let (mut b_lo, mut b_hi) = (1.0f64, 1.0f64);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    for j in 1..400 {
        let jf = j as f64;
        b_lo *= (1.0 - m - (jf - 1.0)) / jf;
        b_hi *= (m - (jf - 1.0)) / jf;
        power *= d;
        if j < 3 {
            continue;
        }
        let term = power * (b_lo - b_hi);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let w = ((Complex64::new(1.0, 0.0) + d).ln() * m).exp();
    sum / (w + (nf - 1.0))
}
