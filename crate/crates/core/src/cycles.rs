//! Periodic cycles of the closed-form iteration in the sector
//! `0 < arg z < pi/n`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characteristic::annulus_bounds;
use crate::complex::{principal_arg, ComplexPoint, Degree, ExtendedPoint};
use crate::error::{Error, Result};
use crate::iteration::laguerre_simplified_finite;

pub const DEFAULT_GRIDS: [usize; 3] = [256, 512, 1024];

const NEWTON_STEPS: usize = 50;
const HALVINGS: usize = 8;
const DEDUP_TOL: f64 = 1e-8;
const PRIMITIVE_TOL: f64 = 1e-8;
const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleCandidate {
    pub z: ComplexPoint,
    pub residual: f64,
}

/// A refined primitive cycle. `representative` lies in the closed sector
/// `0 <= arg z <= pi/n` with `|z| > 1`; `points` is its orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub period: usize,
    pub representative: ComplexPoint,
    pub points: Vec<ExtendedPoint>,
    pub residual: f64,
    pub on_sector_boundary: bool,
}

/// `L_p^k(z)`, or `None` if the orbit reaches `0` or infinity.
pub fn iterate_k(n: Degree, k: usize, z: ComplexPoint) -> Option<ComplexPoint> {
    let mut w = z;
    for _ in 0..k {
        w = laguerre_simplified_finite(n, w).finite()?;
        if w.re == 0.0 && w.im == 0.0 {
            return None;
        }
    }
    Some(w)
}

/// `|L_p^k(z) - z|`, infinite when the orbit leaves the finite plane.
pub fn closure_residual(n: Degree, k: usize, z: ComplexPoint) -> f64 {
    iterate_k(n, k, z).map_or(f64::INFINITY, |w| (w - z).norm())
}

/// Candidates for period-`k` points on a `grid x grid` polar mesh over
/// `r_range x (eps, pi/n - eps)`: centers of 2x2 cells on which both the
/// real and imaginary parts of `L_p^k(z) - z` change sign.
pub fn scan_sector(n: Degree, k: usize, r_range: (f64, f64), grid: usize) -> Result<Vec<CycleCandidate>> {
    let bounds = annulus_bounds(n)?;
    let (lo_keep, hi_keep) = (0.5 * bounds.s0, 2.0 / bounds.s0);
    let (r_lo, r_hi) = r_range;
    let sector = n.half_sector();
    let eps = sector / (4.0 * grid as f64);
    let lin = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (grid - 1) as f64;

    // Row i holds radius r_i; None marks points whose orbit left the annulus
    // in which cycles can live.
    let values: Vec<Vec<Option<(ComplexPoint, ComplexPoint)>>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let r = lin(r_lo, r_hi, i);
            (0..grid)
                .map(|j| {
                    let z = Complex64::from_polar(r, lin(eps, sector - eps, j));
                    let mut w = z;
                    for _ in 0..k {
                        w = laguerre_simplified_finite(n, w).finite()?;
                        let m = w.norm();
                        if !(m > lo_keep && m < hi_keep) {
                            return None;
                        }
                    }
                    Some((z, w - z))
                })
                .collect()
        })
        .collect();

    let candidates = (0..grid - 1)
        .into_par_iter()
        .flat_map_iter(|i| {
            let values = &values;
            (0..grid - 1).filter_map(move |j| {
                let cell = [values[i][j], values[i + 1][j], values[i][j + 1], values[i + 1][j + 1]];
                let cell: Vec<_> = cell.iter().copied().collect::<Option<Vec<_>>>()?;
                let changes = |part: fn(&ComplexPoint) -> f64| {
                    let s: Vec<f64> = cell.iter().map(|(_, f)| part(f).signum()).collect();
                    s.iter().any(|&x| x != s[0])
                };
                if !(changes(|f| f.re) && changes(|f| f.im)) {
                    return None;
                }
                let z = 0.5 * (cell[0].0 + cell[3].0);
                Some(CycleCandidate { z, residual: closure_residual(n, k, z) })
            })
        })
        .collect();
    Ok(candidates)
}

fn residual_vec(n: Degree, k: usize, z: ComplexPoint) -> Option<ComplexPoint> {
    iterate_k(n, k, z).map(|w| w - z).filter(|f| f.re.is_finite() && f.im.is_finite())
}

/// Damped Newton on `(Re F, Im F)` with a central-difference Jacobian.
fn newton(n: Degree, k: usize, mut z: ComplexPoint) -> Result<ComplexPoint> {
    let mut res = f64::INFINITY;
    for _ in 0..NEWTON_STEPS {
        let f = residual_vec(n, k, z).ok_or(Error::NoConvergence { steps: 0, residual: res })?;
        res = f.norm();
        let scale = z.norm().max(1.0);
        if res < 1e-13 * scale {
            return Ok(z);
        }
        let h = 1e-7 * scale;
        let diff = |dz: ComplexPoint| -> Option<ComplexPoint> {
            Some((residual_vec(n, k, z + dz)? - residual_vec(n, k, z - dz)?) / (2.0 * h))
        };
        let (Some(dx), Some(dy)) = (diff(Complex64::new(h, 0.0)), diff(Complex64::new(0.0, h))) else {
            break;
        };
        let det = dx.re * dy.im - dy.re * dx.im;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = Complex64::new(
            (-f.re * dy.im + f.im * dy.re) / det,
            (-dx.re * f.im + dx.im * f.re) / det,
        );
        let mut lambda = 1.0;
        let mut next = z + step;
        for _ in 0..=HALVINGS {
            next = z + lambda * step;
            if residual_vec(n, k, next).is_some_and(|g| g.norm() < res) {
                break;
            }
            lambda *= 0.5;
        }
        z = next;
    }
    Err(Error::NoConvergence { steps: NEWTON_STEPS, residual: res })
}

/// Maps `z` into `0 <= arg z <= pi/n` by a rotation through a multiple of
/// `2 pi/n` followed, if needed, by conjugation.
pub fn fold_to_sector(n: Degree, z: ComplexPoint) -> ComplexPoint {
    let nf = n.as_f64();
    let j = (principal_arg(z) * nf / TAU).round();
    let w = z * Complex64::from_polar(1.0, -TAU * j / nf);
    if principal_arg(w) < 0.0 {
        w.conj()
    } else {
        w
    }
}

fn sector_position(n: Degree, z: ComplexPoint) -> Option<bool> {
    let t = principal_arg(z);
    let edge = n.half_sector();
    if t.abs() <= BOUNDARY_TOL || (t - edge).abs() <= BOUNDARY_TOL {
        Some(true)
    } else if t > 0.0 && t < edge {
        Some(false)
    } else {
        None
    }
}

/// Refines a candidate to a primitive period-`k` cycle whose representative
/// lies in the sector with `|z| > 1`. A point that converges outside the
/// sector is brought back by symmetry and refined once more.
pub fn refine_cycle(n: Degree, k: usize, candidate: CycleCandidate) -> Result<CycleRecord> {
    if k == 0 {
        return Err(Error::InvalidConfig("period must be positive".into()));
    }
    let mut z = newton(n, k, candidate.z)?;
    let mut boundary = sector_position(n, z);
    if boundary.is_none() || z.norm() < 1.0 {
        let mut w = fold_to_sector(n, z);
        if w.norm() < 1.0 {
            w = w.conj().inv();
        }
        z = newton(n, k, w)?;
        boundary = sector_position(n, z);
        if z.norm() < 1.0 {
            return Err(Error::EscapedSector { re: z.re, im: z.im });
        }
    }
    let Some(on_sector_boundary) = boundary else {
        return Err(Error::EscapedSector { re: z.re, im: z.im });
    };
    if n.roots().any(|w| (z - w).norm() < 1e-6) {
        return Err(Error::ConvergedToRoot);
    }
    let scale = z.norm().max(1.0);
    for d in (1..k).filter(|&d| k.rem_euclid(d) == 0) {
        if closure_residual(n, d, z) < PRIMITIVE_TOL * scale {
            return Err(Error::NotPrimitive { period: k, divisor: d });
        }
    }
    let mut points = Vec::with_capacity(k);
    let mut w = z;
    for _ in 0..k {
        points.push(ExtendedPoint::Finite(w));
        w = laguerre_simplified_finite(n, w).finite().ok_or(Error::NoConvergence { steps: NEWTON_STEPS, residual: f64::INFINITY })?;
    }
    Ok(CycleRecord { period: k, representative: z, points, residual: (w - z).norm(), on_sector_boundary })
}

/// All sector-interior period-`k` points with `|z| > 1` found by scanning the
/// outer annulus `[1/r0, 1/s0]` at each grid size and refining every
/// candidate. Each returned record is one such point; a cycle with several
/// members in the sector contributes several records.
pub fn find_cycles(n: Degree, k: usize) -> Result<Vec<CycleRecord>> {
    find_cycles_with_grids(n, k, &DEFAULT_GRIDS)
}

pub fn find_cycles_with_grids(n: Degree, k: usize, grids: &[usize]) -> Result<Vec<CycleRecord>> {
    let bounds = annulus_bounds(n)?;
    let range = (bounds.r0.recip(), bounds.s0.recip());
    let mut found: Vec<CycleRecord> = Vec::new();
    for &grid in grids {
        let candidates = scan_sector(n, k, range, grid)?;
        let refined: Vec<CycleRecord> = candidates
            .par_iter()
            .filter_map(|c| refine_cycle(n, k, *c).ok())
            .filter(|r| !r.on_sector_boundary)
            .collect();
        for record in refined {
            if found.iter().all(|f| (f.representative - record.representative).norm() > DEDUP_TOL) {
                found.push(record);
            }
        }
    }
    found.sort_by(|a, b| {
        a.representative
            .im
            .total_cmp(&b.representative.im)
            .then(a.representative.re.total_cmp(&b.representative.re))
    });
    Ok(found)
}

/// Rotates every point of a cycle by `e^{2 pi i/n}`.
pub fn rotate_points(n: Degree, points: &[ExtendedPoint]) -> Vec<ComplexPoint> {
    let w = Complex64::from_polar(1.0, TAU / n.as_f64());
    points.iter().filter_map(|p| p.finite()).map(|z| z * w).collect()
}

/// Whether every point of `points` maps to the next one, cyclically, within
/// `tol` relative to `max(1, |z|)`.
pub fn closes(n: Degree, points: &[ComplexPoint], tol: f64) -> bool {
    (0..points.len()).all(|i| {
        let next = points[(i + 1) % points.len()];
        laguerre_simplified_finite(n, points[i])
            .finite()
            .is_some_and(|w| (w - next).norm() <= tol * next.norm().max(1.0))
    })
}

/// Whether `z` lies within `tol` of a bisecting ray `arg z = (2j+1) pi/n`.
pub fn near_bisector(n: Degree, z: ComplexPoint, tol: f64) -> bool {
    let nf = n.as_f64();
    let t = principal_arg(z) * nf / PI;
    let odd = 2.0 * ((t - 1.0) / 2.0).round() + 1.0;
    (t - odd).abs() * PI / nf <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(n: u32) -> Degree {
        Degree::new(n).unwrap()
    }

    #[test]
    fn fold_lands_in_sector() {
        let n = deg(7);
        for t in [-3.0, -1.0, -0.2, 0.1, 0.5, 2.0, 3.1] {
            let w = fold_to_sector(n, Complex64::from_polar(2.0, t));
            let a = principal_arg(w);
            assert!((-1e-15..=PI / 7.0 + 1e-15).contains(&a), "{t} -> {a}");
            assert!((w.norm() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn root_ray_two_cycle_is_flagged() {
        let n = deg(8);
        let b = annulus_bounds(n).unwrap();
        let seed = Complex64::from_polar(b.r0.recip(), 1e-6);
        let rec = refine_cycle(n, 2, CycleCandidate { z: seed, residual: 0.0 }).unwrap();
        assert!(rec.on_sector_boundary);
        assert!((rec.representative.norm() - b.r0.recip()).abs() < 1e-10);
    }

    #[test]
    fn degree_five_four_cycles() {
        let n = deg(5);
        let found = find_cycles(n, 4).unwrap();
        assert_eq!(found.len(), 2);
        let want = [
            Complex64::new(14.76136221056119, 6.053684491748273),
            Complex64::new(13.34758676939078, 8.758987500188936),
        ];
        for (rec, w) in found.iter().zip(want) {
            assert!((rec.representative - w).norm() / w.norm() < 1e-12, "{}", rec.representative);
            assert_eq!(rec.points.len(), 4);
        }
    }

    #[test]
    fn near_bisector_detects_rays() {
        let n = deg(8);
        assert!(near_bisector(n, Complex64::from_polar(2.0, PI / 8.0), 1e-12));
        assert!(near_bisector(n, Complex64::from_polar(2.0, -3.0 * PI / 8.0), 1e-12));
        assert!(!near_bisector(n, Complex64::from_polar(2.0, 0.2), 1e-6));
    }
}
