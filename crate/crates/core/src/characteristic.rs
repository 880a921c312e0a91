//! The characteristic function `f_n(r, theta)` whose zero set is
//! `|L_p(z)| = 1/|z|`, its radial zeros, the annulus radii and the region
//! classifier.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use crate::complex::{abs_cos, principal_arg, Degree, ExtendedPoint};
use crate::error::{Error, Result};

/// Absolute tolerance of the bisection on `r`.
pub const BISECTION_TOL: f64 = 1e-14;

const MARCH_STEPS: usize = 1024;
const INNER_FLOOR: f64 = 1e-9;

/// `f_n(r, theta)`. Negative exactly where `|L_p(z)| > 1/|z|`.
pub fn char_fn(n: Degree, r: f64, theta: f64) -> f64 {
    let nf = n.as_f64();
    let k = nf - 1.0;
    let c = abs_cos(0.5 * nf * theta);
    let r_n4 = r.powf(nf - 4.0);
    r.powf(2.0 * nf - 4.0) + 2.0 * k * c * r.powf(0.5 * nf) * (r_n4 - 1.0) - k * k * r.powf(nf)
        + k * k * r_n4
        - 1.0
}

/// The two zeros of `f_n(., theta)` other than `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub n: Degree,
    pub theta: f64,
    pub r_d: f64,
    pub r_e: f64,
}

/// `s0 = min r_D` (attained on the bisecting rays) and `r0 = max r_D`
/// (attained on the root rays).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusBounds {
    pub n: Degree,
    pub s0: f64,
    pub r0: f64,
}

impl AnnulusBounds {
    /// Radius beyond which every point belongs to the `{0, inf}` basin.
    pub fn outer_escape(&self) -> f64 {
        self.s0.recip()
    }
}

fn require_five(n: Degree, theta: f64) -> Result<()> {
    if n.get() < 5 {
        return Err(Error::BracketFailure { n: n.get(), theta, which: "inner" });
    }
    Ok(())
}

/// Bisection on the sign of `f`, with `f(lo) < 0 < f(hi)` or the reverse
/// recorded in `neg_at_lo`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, neg_at_lo: bool) -> f64 {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn inner_zero(n: Degree, theta: f64) -> Result<f64> {
    let f = |r: f64| char_fn(n, r, theta);
    // f > 0 on (r_D, 1) and f -> -1 as r -> 0: march inward until the sign flips.
    let step = (1.0 - INNER_FLOOR) / MARCH_STEPS as f64;
    let mut prev = 1.0;
    for k in 1..=MARCH_STEPS {
        let r = (1.0 - k as f64 * step).max(INNER_FLOOR);
        if f(r) < 0.0 {
            return Ok(bisect(f, r, prev, true));
        }
        prev = r;
    }
    Err(Error::BracketFailure { n: n.get(), theta, which: "inner" })
}

fn outer_zero(n: Degree, theta: f64) -> Result<f64> {
    let f = |r: f64| char_fn(n, r, theta);
    let fail = || Error::BracketFailure { n: n.get(), theta, which: "outer" };
    let hi = n.outer_radius_bound();
    if f(hi).partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(fail());
    }
    let mut delta = (hi - 1.0) / MARCH_STEPS as f64;
    for _ in 0..60 {
        if f(1.0 + delta) < 0.0 {
            return Ok(bisect(f, 1.0 + delta, hi, true));
        }
        delta *= 0.5;
    }
    Err(fail())
}

/// Locates `r_D < 1 < r_E` by bisection and returns the reciprocal pair
/// `(r_D, 1/r_D)` after checking `|r_D r_E - 1| < 1e-10`.
pub fn radial_zeros(n: Degree, theta: f64) -> Result<RadialProfile> {
    require_five(n, theta)?;
    let r_d = inner_zero(n, theta)?;
    let r_e = outer_zero(n, theta)?;
    if (r_d * r_e - 1.0).abs() >= 1e-10 {
        return Err(Error::BracketFailure { n: n.get(), theta, which: "reciprocal pair" });
    }
    Ok(RadialProfile { n, theta, r_d, r_e: r_d.recip() })
}

pub fn annulus_bounds(n: Degree) -> Result<AnnulusBounds> {
    let s0 = radial_zeros(n, PI / n.as_f64())?.r_d;
    let r0 = radial_zeros(n, 0.0)?.r_d;
    if s0.partial_cmp(&r0) != Some(Ordering::Less) {
        return Err(Error::BracketFailure { n: n.get(), theta: 0.0, which: "annulus ordering" });
    }
    Ok(AnnulusBounds { n, s0, r0 })
}

/// The regions cut out of the extended plane by the sign of `f_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    D,
    BoundaryD,
    K0,
    UnitCircle,
    K1,
    BoundaryE,
    E,
    OriginOrInfinity,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::D => "D",
            RegionLabel::BoundaryD => "dD",
            RegionLabel::K0 => "K0",
            RegionLabel::UnitCircle => "S1",
            RegionLabel::K1 => "K1",
            RegionLabel::BoundaryE => "dE",
            RegionLabel::E => "E",
            RegionLabel::OriginOrInfinity => "0/inf",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `z` by the sign of `f_n(|z|, arg z)`, with a tolerance band
/// scaled by the largest term `(n-1)^2 |z|^n`.
pub fn classify(n: Degree, z: ExtendedPoint, bounds: &AnnulusBounds) -> RegionLabel {
    let z = match z {
        ExtendedPoint::Infinity => return RegionLabel::OriginOrInfinity,
        ExtendedPoint::Finite(z) if z.re == 0.0 && z.im == 0.0 => {
            return RegionLabel::OriginOrInfinity
        }
        ExtendedPoint::Finite(z) => z,
    };
    let r = z.norm();
    if (r - 1.0).abs() <= 1e-14 {
        return RegionLabel::UnitCircle;
    }
    // Outside the extreme boundary radii the sign of f is fixed.
    if r < bounds.s0 {
        return RegionLabel::D;
    }
    if r > bounds.outer_escape() {
        return RegionLabel::E;
    }
    let nf = n.as_f64();
    let s = char_fn(n, r, principal_arg(z));
    let scale = ((nf - 1.0) * (nf - 1.0) * r.powf(nf)).max(1.0);
    let tol = (1e-12 * scale).min(f64::MAX);
    let inside = r < 1.0;
    if s < -tol {
        if inside {
            RegionLabel::D
        } else {
            RegionLabel::K1
        }
    } else if s > tol {
        if inside {
            RegionLabel::K0
        } else {
            RegionLabel::E
        }
    } else if inside {
        RegionLabel::BoundaryD
    } else {
        RegionLabel::BoundaryE
    }
}
