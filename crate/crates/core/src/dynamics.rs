//! Orbits of the iteration and their classification against the proven
//! basins.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::characteristic::AnnulusBounds;
use crate::complex::{principal_arg, ComplexPoint, Degree, ExtendedPoint};
use crate::error::{Error, Result};
use crate::iteration::{laguerre_general_extended, laguerre_simplified, root_relative_step};
use crate::iteration::PolynomialCoeffs;

pub const DEFAULT_MAX_ITER: u32 = 100;
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

/// Errors at or below this are treated as converged during confirmation.
const CONFIRM_FLOOR: f64 = 1e-14;
/// Offsets below this are not resolved by the order estimate.
const RESOLUTION_FLOOR: f64 = 1e-290;

/// Which evaluation of the step drives an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// The closed form for `z^n - 1` with the proven two-cycle basin.
    Simplified,
    /// The general form on the coefficients of `z^n - 1` in plain double
    /// precision. Only exact `0` or infinity counts as the two-cycle.
    GeneralFloat,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Simplified => "simplified",
            Formulation::GeneralFloat => "general",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Root { index: u32, iterations: u32 },
    TwoCycle { iterations: u32 },
    Undecided { iterations: u32 },
}

impl OutcomeKind {
    pub fn iterations(self) -> u32 {
        match self {
            OutcomeKind::Root { iterations, .. }
            | OutcomeKind::TwoCycle { iterations }
            | OutcomeKind::Undecided { iterations } => iterations,
        }
    }

    pub fn is_root(self) -> bool {
        matches!(self, OutcomeKind::Root { .. })
    }

    pub fn is_two_cycle(self) -> bool {
        matches!(self, OutcomeKind::TwoCycle { .. })
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::Root { .. } => "root",
            OutcomeKind::TwoCycle { .. } => "two-cycle",
            OutcomeKind::Undecided { .. } => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOutcome {
    pub kind: OutcomeKind,
    pub final_point: ExtendedPoint,
}

impl fmt::Display for OrbitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OutcomeKind::Root { index, iterations } => {
                write!(f, "Root({index}) after {iterations} iterations")
            }
            OutcomeKind::TwoCycle { iterations } => {
                write!(f, "TwoCycle after {iterations} iterations")
            }
            OutcomeKind::Undecided { iterations } => {
                write!(f, "Undecided after {iterations} iterations")
            }
        }
    }
}

/// The iterates of an orbit. Without a full trace only the first and last
/// points are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub points: Vec<ExtendedPoint>,
    pub outcome: OrbitOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    pub max_iter: u32,
    pub root_tol: f64,
    pub keep_trace: bool,
    pub formulation: Formulation,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            max_iter: DEFAULT_MAX_ITER,
            root_tol: DEFAULT_ROOT_TOL,
            keep_trace: false,
            formulation: Formulation::Simplified,
        }
    }
}

/// A reusable stepper, so that pixel loops build the coefficient list once.
#[derive(Debug, Clone)]
pub struct Stepper {
    n: Degree,
    general: Option<PolynomialCoeffs>,
}

impl Stepper {
    pub fn new(n: Degree, formulation: Formulation) -> Self {
        let general = match formulation {
            Formulation::Simplified => None,
            Formulation::GeneralFloat => Some(PolynomialCoeffs::unity(n)),
        };
        Stepper { n, general }
    }

    pub fn formulation(&self) -> Formulation {
        if self.general.is_some() {
            Formulation::GeneralFloat
        } else {
            Formulation::Simplified
        }
    }

    #[inline]
    pub fn step(&self, z: ExtendedPoint) -> ExtendedPoint {
        match &self.general {
            None => laguerre_simplified(self.n, z),
            Some(p) => laguerre_general_extended(p, z),
        }
    }
}

fn in_proven_basin(z: ExtendedPoint, bounds: Option<&AnnulusBounds>, formulation: Formulation) -> bool {
    let z = match z {
        ExtendedPoint::Infinity => return true,
        ExtendedPoint::Finite(z) => z,
    };
    if z.re == 0.0 && z.im == 0.0 {
        return true;
    }
    match (formulation, bounds) {
        (Formulation::Simplified, Some(b)) => {
            let r = z.norm();
            r < b.s0 || r > b.outer_escape()
        }
        _ => false,
    }
}

/// Whether `z` sits on the nontrivial two-cycle `{r0, 1/r0}` on a root ray.
fn on_root_ray_cycle(n: Degree, z: ComplexPoint, bounds: &AnnulusBounds) -> bool {
    let r = z.norm();
    let near = |target: f64| (r - target).abs() <= 1e-14 * target.max(1.0);
    if !(near(bounds.r0) || near(bounds.r0.recip())) {
        return false;
    }
    let t = principal_arg(z) * n.as_f64() / TAU;
    (t - t.round()).abs() * TAU / n.as_f64() <= 1e-14
}

/// Iterates from `z0` until the orbit is within `root_tol` of a root (checked
/// by one extra confirming step), enters the two-cycle basin, or reaches
/// `max_iter` steps.
///
/// Passing `None` for the bounds (needed for `n < 5`) restricts two-cycle
/// detection to exact `0` and infinity.
pub fn iterate_orbit(
    n: Degree,
    z0: ExtendedPoint,
    bounds: Option<&AnnulusBounds>,
    config: &OrbitConfig,
) -> OrbitTrace {
    iterate_with(&Stepper::new(n, config.formulation), n, z0, bounds, config)
}

pub fn iterate_with(
    stepper: &Stepper,
    n: Degree,
    z0: ExtendedPoint,
    bounds: Option<&AnnulusBounds>,
    config: &OrbitConfig,
) -> OrbitTrace {
    let formulation = stepper.formulation();
    let mut points = vec![z0];
    let mut z = z0;
    let mut pinned = false;
    let mut k = 0u32;
    let finish = |points: &mut Vec<ExtendedPoint>, z: ExtendedPoint, kind: OutcomeKind| {
        if !config.keep_trace && points.len() == 1 {
            points.push(z);
        } else if !config.keep_trace {
            *points.last_mut().unwrap() = z;
        }
        OrbitTrace { points: std::mem::take(points), outcome: OrbitOutcome { kind, final_point: z } }
    };
    while k < config.max_iter {
        z = stepper.step(z);
        k += 1;
        if config.keep_trace {
            points.push(z);
        }
        if pinned {
            continue;
        }
        if in_proven_basin(z, bounds, formulation) {
            return finish(&mut points, z, OutcomeKind::TwoCycle { iterations: k });
        }
        let Some(w) = z.finite() else { continue };
        if let Some(b) = bounds {
            if formulation == Formulation::Simplified && on_root_ray_cycle(n, w, b) {
                pinned = true;
                continue;
            }
        }
        let j = nearest_root(n, w);
        let err = (w - n.root(j)).norm();
        if err < config.root_tol {
            let next = stepper.step(z);
            if let Some(v) = next.finite() {
                let err_next = (v - n.root(j)).norm();
                if err_next < err || err_next <= CONFIRM_FLOOR {
                    return finish(&mut points, next, OutcomeKind::Root { index: j, iterations: k });
                }
            }
        }
    }
    finish(&mut points, z, OutcomeKind::Undecided { iterations: k })
}

/// Index `j` of the root `e^{2 pi i j/n}` closest in angle to `z`. On a
/// bisecting ray the root with the smaller argument wins.
pub fn nearest_root(n: Degree, z: ComplexPoint) -> u32 {
    let nf = n.as_f64();
    let t = principal_arg(z) * nf / TAU;
    let frac = t - t.floor();
    let j = if (frac - 0.5).abs() <= 1e-12 { t.floor() } else { t.round() };
    (j as i64).rem_euclid(n.get() as i64) as u32
}

/// `g(theta) = theta - 2 atan(sin(n theta/2) / (cos(n theta/2) + n - 1))`,
/// the argument of `L_p(e^{i theta})`.
pub fn unit_circle_step_angle(n: Degree, theta: f64) -> f64 {
    let nf = n.as_f64();
    let half = 0.5 * nf * theta;
    theta - 2.0 * half.sin().atan2(half.cos() + (nf - 1.0))
}

/// Empirical local order of convergence from four steps started at `z0`.
///
/// The offset from the nearest root is iterated in root-relative form so
/// that errors far below `1e-16` stay resolved; the order is fitted from the
/// last triple of errors above the resolution floor.
pub fn convergence_order_estimate(n: Degree, z0: ComplexPoint) -> Result<f64> {
    let (_, errors) = root_offsets(n, z0, 4)?;
    let usable: Vec<f64> = errors
        .iter()
        .copied()
        .take_while(|e| e.is_finite() && *e > RESOLUTION_FLOOR)
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientResolution);
    }
    let t = &usable[usable.len() - 3..];
    Ok((t[1] / t[2]).ln() / (t[0] / t[1]).ln())
}

/// Errors `|z_k - root|` for `k = 0..=steps`, with the root nearest to `z0`.
pub fn root_offsets(n: Degree, z0: ComplexPoint, steps: usize) -> Result<(u32, Vec<f64>)> {
    let j = nearest_root(n, z0);
    let omega = n.root(j);
    let mut d = z0 / omega - Complex64::new(1.0, 0.0);
    let e0 = (z0 - omega).norm();
    if !(e0 > 0.0 && e0 <= 0.05) {
        return Err(Error::InvalidConfig(format!(
            "start must lie within 0.05 of a root and differ from it (distance {e0})"
        )));
    }
    let mut errors = vec![e0];
    for _ in 0..steps {
        d = root_relative_step(n, d);
        errors.push(d.norm());
    }
    Ok((j, errors))
}
