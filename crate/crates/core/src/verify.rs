//! The invariant suite behind `laguerre verify`: randomized checks of the
//! symmetries, the characteristic-function theorem and the orbit dynamics,
//! driven by a seeded generator so that reports are reproducible.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basin::{render, RenderConfig};
use crate::characteristic::{annulus_bounds, char_fn, radial_zeros, AnnulusBounds};
use crate::complex::{ComplexPoint, Degree, ExtendedPoint};
use crate::cycles::{closes, find_cycles_with_grids, near_bisector, rotate_points};
use crate::dynamics::{convergence_order_estimate, iterate_orbit, unit_circle_step_angle, OrbitConfig, OutcomeKind};
use crate::format::sig17;
use crate::iteration::{laguerre_general, laguerre_simplified, modulus_squared_formula, PolynomialCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub scope: String,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub degrees: Vec<u32>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let list: Vec<String> = self.degrees.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "laguerre verify");
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "degrees {}", list.join(","));
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = writeln!(out, "{tag} [{}] {}: {}", c.scope, c.name, c.detail);
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        );
        out
    }
}

struct Suite {
    checks: Vec<CheckResult>,
    scope: String,
}

impl Suite {
    fn record(&mut self, name: &'static str, ok: bool, detail: String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(CheckResult { scope: self.scope.clone(), name, status, detail });
    }

    fn skip(&mut self, name: &'static str, detail: &str) {
        self.checks.push(CheckResult { scope: self.scope.clone(), name, status: Status::Skip, detail: detail.into() });
    }
}

/// Sample sizes; the defaults are the full suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub symmetry_points: usize,
    pub modulus_points: usize,
    pub sign_points: usize,
    pub thetas: usize,
    pub scan_points: usize,
    pub unit_circle_points: usize,
    pub kahan_points: usize,
    pub order_starts: usize,
    pub render_pixels: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            symmetry_points: 1000,
            modulus_points: 10_000,
            sign_points: 10_000,
            thetas: 100,
            scan_points: 100_000,
            unit_circle_points: 1000,
            kahan_points: 1000,
            order_starts: 50,
            render_pixels: 96,
        }
    }
}

fn rel(a: ComplexPoint, b: ComplexPoint) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn step(n: Degree, z: ComplexPoint) -> Option<ComplexPoint> {
    laguerre_simplified(n, ExtendedPoint::Finite(z)).finite()
}

fn random_point(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> ComplexPoint {
    let r = (rng.gen_range(r_lo.ln()..r_hi.ln())).exp();
    Complex64::from_polar(r, rng.gen_range(-PI..PI))
}

/// Worst relative deviation from the three commutation identities over
/// `count` random points: `(rotation, conjugation, inversion)`.
pub fn symmetry_errors(n: Degree, rng: &mut ChaCha8Rng, count: usize) -> (f64, f64, f64) {
    let rot = Complex64::from_polar(1.0, TAU / n.as_f64());
    let (mut e_rot, mut e_conj, mut e_inv) = (0.0f64, 0.0f64, 0.0f64);
    let worst = |e: &mut f64, a: Option<ComplexPoint>, b: Option<ComplexPoint>| match (a, b) {
        (Some(a), Some(b)) => *e = e.max(rel(a, b)),
        _ => *e = f64::INFINITY,
    };
    for s in 0..count {
        let mut z = random_point(rng, 0.1, 10.0);
        if s % 10 == 0 {
            // Points exactly on a bisecting ray exercise the branch convention.
            z = Complex64::from_polar(z.norm(), PI / n.as_f64());
        }
        let lz = step(n, z);
        worst(&mut e_rot, step(n, z * rot), lz.map(|w| w * rot));
        if !near_bisector(n, z, 1e-6) {
            worst(&mut e_conj, step(n, z.conj()), lz.map(|w| w.conj()));
        }
        worst(&mut e_inv, step(n, z.conj().inv()), lz.map(|w| w.conj().inv()));
    }
    (e_rot, e_conj, e_inv)
}

/// Worst `| |L(e^{i t})| - 1 |` and the number of angles `t` in `(0, pi/n]`
/// violating `0 < g(t) < t`.
pub fn unit_circle_errors(n: Degree, rng: &mut ChaCha8Rng, count: usize) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for s in 0..count {
        let t = if s == 0 { n.half_sector() } else { n.half_sector() * (1.0 - rng.gen::<f64>()) };
        let m = step(n, Complex64::from_polar(1.0, t)).map_or(f64::INFINITY, |w| (w.norm() - 1.0).abs());
        worst = worst.max(m);
        let g = unit_circle_step_angle(n, t);
        if !(0.0 < g && g < t) {
            bad += 1;
        }
    }
    (worst, bad)
}

/// Sign changes of `f_n(., theta)` on `points` evenly spaced radii in
/// `(0, 1.1 (n-1)^{2/(n-4)}]`, as brackets `(r_a, r_b)`.
pub fn sign_change_brackets(n: Degree, theta: f64, points: usize) -> Vec<(f64, f64)> {
    let top = 1.1 * n.outer_radius_bound();
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for i in 1..=points {
        let r = top * i as f64 / points as f64;
        let v = char_fn(n, r, theta);
        if v == 0.0 {
            continue;
        }
        if let Some((r_prev, v_prev)) = last {
            if (v > 0.0) != (v_prev > 0.0) {
                out.push((r_prev, r));
            }
        }
        last = Some((r, v));
    }
    out
}

/// Runs the suite for each degree in `degrees`. Theorem checks need `n >= 5`
/// and are skipped otherwise.
pub fn run(degrees: &[u32], seed: u64, opts: &VerifyOptions) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = Suite { checks: Vec::new(), scope: String::new() };
    for &raw in degrees {
        suite.scope = format!("n={raw}");
        let n = match Degree::new(raw) {
            Ok(n) => n,
            Err(e) => {
                suite.record("degree", false, e.to_string());
                continue;
            }
        };
        per_degree(&mut suite, n, &mut rng, opts);
    }
    suite.scope = "global".into();
    global(&mut suite, degrees, &mut rng, opts);
    Report { seed, degrees: degrees.to_vec(), checks: suite.checks }
}

fn per_degree(suite: &mut Suite, n: Degree, rng: &mut ChaCha8Rng, opts: &VerifyOptions) {
    let worst = n
        .roots()
        .map(|w| step(n, w).map_or(f64::INFINITY, |v| (v - w).norm()))
        .fold(0.0, f64::max);
    suite.record("fixed-points", worst <= 1e-14, format!("max |L(w) - w| = {}", sig17(worst)));

    if n.get() >= 3 {
        let ok = laguerre_simplified(n, ExtendedPoint::Infinity).is_zero()
            && laguerre_simplified(n, ExtendedPoint::ZERO).is_infinite();
        suite.record("zero-infinity-swap", ok, "L(inf) = 0 and L(0) = inf".into());
    }

    let mut worst = 0.0f64;
    for _ in 0..opts.modulus_points {
        let z = random_point(rng, 1.0 / 3.0, 3.0);
        let (r, t) = z.to_polar();
        let direct = step(n, z).map_or(f64::INFINITY, |w| w.norm_sqr());
        let formula = modulus_squared_formula(n, r, t);
        worst = worst.max((direct - formula).abs() / formula);
    }
    suite.record("modulus-identity", worst <= 1e-12, format!("max relative error {}", sig17(worst)));

    let (e_rot, e_conj, e_inv) = symmetry_errors(n, rng, opts.symmetry_points);
    suite.record("rotation-symmetry", e_rot <= 1e-12, format!("max relative error {}", sig17(e_rot)));
    suite.record("conjugation-symmetry", e_conj <= 1e-12, format!("max relative error {}", sig17(e_conj)));
    suite.record("inversion-symmetry", e_inv <= 1e-12, format!("max relative error {}", sig17(e_inv)));

    let (worst, bad) = unit_circle_errors(n, rng, opts.unit_circle_points);
    suite.record(
        "unit-circle",
        worst <= 1e-13 && bad == 0,
        format!("max ||L| - 1| = {}, angle-step violations {bad}", sig17(worst)),
    );

    let bounds = if n.get() >= 5 { annulus_bounds(n).ok() } else { None };
    let cfg = OrbitConfig { max_iter: 60, ..OrbitConfig::default() };
    let z0 = ExtendedPoint::Finite(Complex64::from_polar(1.0, PI / (2.0 * n.as_f64())));
    let out = iterate_orbit(n, z0, bounds.as_ref(), &cfg).outcome;
    suite.record(
        "unit-circle-orbit",
        matches!(out.kind, OutcomeKind::Root { index: 0, .. }),
        format!("start e^(i pi/2n): {out}"),
    );

    if n.get() < 5 {
        suite.skip("theorem", "characteristic-function checks require n >= 5");
        return;
    }
    let Some(bounds) = bounds else {
        suite.record("annulus-bounds", false, "bracketing failed".into());
        return;
    };
    suite.record(
        "annulus-bounds",
        0.0 < bounds.s0 && bounds.s0 < bounds.r0 && bounds.r0 < 1.0,
        format!("s0 = {}, r0 = {}", sig17(bounds.s0), sig17(bounds.r0)),
    );
    theorem_checks(suite, n, &bounds, rng, opts);
    dynamics_checks(suite, n, &bounds, rng, opts);
    cycle_checks(suite, n);
}

fn theorem_checks(suite: &mut Suite, n: Degree, b: &AnnulusBounds, rng: &mut ChaCha8Rng, opts: &VerifyOptions) {
    let bound = n.outer_radius_bound();
    let (mut wrong_count, mut bad_pair, mut above, mut off_scan, mut extremal) = (0, 0.0f64, 0, 0, 0);
    for s in 0..opts.thetas {
        let theta = if s == 0 { 0.0 } else { rng.gen_range(0.0..TAU) };
        let brackets = sign_change_brackets(n, theta, opts.scan_points);
        let has_one = brackets.iter().any(|&(a, c)| a <= 1.0 && 1.0 <= c);
        if brackets.len() != 3 || !has_one {
            wrong_count += 1;
            continue;
        }
        let Ok(p) = radial_zeros(n, theta) else {
            wrong_count += 1;
            continue;
        };
        bad_pair = bad_pair.max((p.r_d * p.r_e - 1.0).abs());
        if p.r_e >= bound {
            above += 1;
        }
        let (d, e) = (brackets[0], brackets[2]);
        if !(d.0 <= p.r_d && p.r_d <= d.1 && e.0 <= p.r_e && p.r_e <= e.1) {
            off_scan += 1;
        }
        if !(b.s0 - 1e-13 <= p.r_d && p.r_d <= b.r0 + 1e-13) {
            extremal += 1;
        }
    }
    suite.record("three-zeros", wrong_count == 0, format!("{wrong_count} of {} angles without exactly three sign changes", opts.thetas));
    suite.record("reciprocal-zeros", bad_pair <= 1e-10, format!("max |r_D r_E - 1| = {}", sig17(bad_pair)));
    suite.record("outer-bound", above == 0, format!("{above} angles with r_E >= (n-1)^(2/(n-4))"));
    suite.record("zeros-match-scan", off_scan == 0, format!("{off_scan} angles with a zero outside its scan bracket"));
    suite.record("extremal-radii", extremal == 0, format!("{extremal} angles with r_D outside [s0, r0]"));

    let steps = 100;
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for s in 0..=steps {
        let theta = n.half_sector() * s as f64 / steps as f64;
        let r = radial_zeros(n, theta).map_or(f64::NAN, |p| p.r_d);
        if r.is_nan() || r > prev + 1e-14 {
            monotone = false;
        }
        prev = r;
    }
    suite.record("monotone-boundary", monotone, "r_D decreasing on [0, pi/n]".into());

    let (mut checked, mut mismatched) = (0, 0);
    let nf = n.as_f64();
    for _ in 0..opts.sign_points {
        let z = random_point(rng, 0.5 * b.s0, 2.0 / b.s0);
        let (r, t) = z.to_polar();
        let f = char_fn(n, r, t);
        let tol = 1e-12 * ((nf - 1.0).powi(2) * r.powf(nf)).max(1.0);
        if f.abs() <= tol {
            continue;
        }
        let Some(w) = step(n, z) else { continue };
        checked += 1;
        if (f < 0.0) != (w.norm() * r > 1.0) {
            mismatched += 1;
        }
    }
    suite.record(
        "sign-equivalence",
        mismatched == 0 && checked > 0,
        format!("{mismatched} of {checked} points disagree with |L(z)| vs 1/|z|"),
    );
}

fn dynamics_checks(suite: &mut Suite, n: Degree, b: &AnnulusBounds, rng: &mut ChaCha8Rng, opts: &VerifyOptions) {
    let mut bad = 0;
    let count = opts.symmetry_points;
    for _ in 0..count {
        let r = if rng.gen::<bool>() {
            rng.gen_range(b.r0..1.0 - 1e-6)
        } else {
            rng.gen_range(1.0 + 1e-6..b.r0.recip())
        };
        let z = Complex64::from_polar(r, rng.gen_range(-PI..PI));
        let lo = r.min(r.recip());
        let hi = r.max(r.recip());
        match step(n, z) {
            Some(w) if lo < w.norm() && w.norm() < hi => {}
            _ => bad += 1,
        }
    }
    suite.record("annulus-sandwich", bad == 0, format!("{bad} of {count} points outside (min(|z|,1/|z|), max(|z|,1/|z|))"));

    let mut bad = 0;
    for _ in 0..count {
        let z = random_point(rng, 1e-3 * b.s0, b.s0);
        let two = step(n, z).and_then(|w| step(n, w));
        if !two.is_some_and(|v| v.norm() < z.norm()) {
            bad += 1;
        }
    }
    suite.record("two-step-contraction", bad == 0, format!("{bad} of {count} points with |L(L(z))| >= |z| inside |z| < s0"));

    let cfg = OrbitConfig { max_iter: 1000, ..OrbitConfig::default() };
    let mut bad = 0;
    for s in 0..100 {
        let x = (b.r0 - 1e-6) * (s as f64 + rng.gen::<f64>()) / 100.0;
        let out = iterate_orbit(n, ExtendedPoint::Finite(Complex64::new(x.max(1e-12), 0.0)), Some(b), &cfg);
        if !out.outcome.kind.is_two_cycle() {
            bad += 1;
        }
    }
    suite.record("root-ray-divergence", bad == 0, format!("{bad} of 100 points in (0, r0) not captured by the two-cycle"));

    // Rendered outcomes against the proven basins, and against direct orbits
    // from exactly rotated pixel centers.
    let mut config = RenderConfig::default_for(n);
    config.pixels = opts.render_pixels;
    match render(&config, Some(b)) {
        Ok(image) => {
            let bad = crate::basin::theory_violations(&image, b);
            suite.record("render-conformance", bad == 0, format!("{bad} pixels contradict the proven basins"));
            let rot = Complex64::from_polar(1.0, TAU / n.as_f64());
            let ocfg = OrbitConfig::default();
            let mut differ = 0;
            for i in (0..config.pixels).step_by(3) {
                for j in (0..config.pixels).step_by(3) {
                    let z = config.pixel_center(i, j) * rot;
                    let other = iterate_orbit(n, ExtendedPoint::Finite(z), Some(b), &ocfg).outcome.kind;
                    let same = match (image.get(i, j).kind, other) {
                        (OutcomeKind::Root { index: x, .. }, OutcomeKind::Root { index: y, .. }) => (x + 1) % n.get() == y,
                        (a, c) => a.name() == c.name(),
                    };
                    if !same {
                        differ += 1;
                    }
                }
            }
            suite.record("render-rotation", differ == 0, format!("{differ} pixels differ from their exactly rotated centers"));
        }
        Err(e) => suite.record("render-conformance", false, e.to_string()),
    }
}

fn cycle_checks(suite: &mut Suite, n: Degree) {
    let records = match find_cycles_with_grids(n, 4, &[256]) {
        Ok(r) => r,
        Err(e) => {
            suite.record("cycle-closure", false, e.to_string());
            return;
        }
    };
    let pts = |r: &crate::cycles::CycleRecord| -> Vec<ComplexPoint> { r.points.iter().filter_map(|p| p.finite()).collect() };
    let closed = records.iter().filter(|r| closes(n, &pts(r), 1e-9)).count();
    suite.record("cycle-closure", closed == records.len(), format!("{closed} of {} period-4 records close", records.len()));
    let rotated = records.iter().filter(|r| closes(n, &rotate_points(n, &r.points), 1e-9)).count();
    suite.record("cycle-rotation", rotated == records.len(), format!("{rotated} of {} rotated cycles close", records.len()));
    let conj_ok = records
        .iter()
        .filter(|r| pts(r).iter().any(|z| near_bisector(n, *z, 1e-9)) || closes(n, &pts(r).iter().map(|z| z.conj()).collect::<Vec<_>>(), 1e-9))
        .count();
    suite.record("cycle-conjugation", conj_ok == records.len(), format!("{conj_ok} of {} conjugated cycles close", records.len()));
    let inv_ok = records
        .iter()
        .filter(|r| closes(n, &pts(r).iter().map(|z| z.conj().inv()).collect::<Vec<_>>(), 1e-9))
        .count();
    suite.record("cycle-inversion", inv_ok == records.len(), format!("{inv_ok} of {} inverted cycles close", records.len()));
}

fn global(suite: &mut Suite, degrees: &[u32], rng: &mut ChaCha8Rng, opts: &VerifyOptions) {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..opts.kahan_points {
        let degree = rng.gen_range(2..=16usize);
        let roots: Vec<ComplexPoint> = (0..degree)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let Ok(p) = PolynomialCoeffs::from_roots(&roots) else { continue };
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(w) = laguerre_general(&p, z) else { continue };
        let nearest = roots.iter().map(|r| (z - r).norm()).fold(f64::INFINITY, f64::min);
        let slack = nearest - ((degree as f64).sqrt() * (z - w).norm() + 1e-9);
        worst = worst.max(slack);
        if slack > 0.0 {
            violations += 1;
        }
    }
    suite.record(
        "kahan-bound",
        violations == 0,
        format!("{violations} of {} points violate min |z - z*| <= sqrt(n) |z - L(z)|", opts.kahan_points),
    );

    let usable: Vec<Degree> = degrees.iter().filter(|&&n| n >= 3).filter_map(|&n| Degree::new(n).ok()).collect();
    if usable.is_empty() {
        suite.skip("cubic-order", "needs some n >= 3");
    } else {
        let (mut lo, mut hi, mut bad) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for s in 0..opts.order_starts {
            let n = usable[s % usable.len()];
            let j = rng.gen_range(0..n.get());
            let d = Complex64::from_polar((rng.gen_range(1e-3f64.ln()..1e-2f64.ln())).exp(), rng.gen_range(-PI..PI));
            match convergence_order_estimate(n, n.root(j) * (1.0 + d)) {
                Ok(q) => {
                    lo = lo.min(q);
                    hi = hi.max(q);
                    if !(2.5..=3.5).contains(&q) {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
        suite.record("cubic-order", bad == 0, format!("order estimates in [{}, {}], {bad} outside [2.5, 3.5]", sig17(lo), sig17(hi)));
    }

    let mut widths = Vec::new();
    let mut below = true;
    for n in [5u32, 8, 16, 32, 64, 128] {
        let n = Degree::new(n).unwrap();
        match annulus_bounds(n) {
            Ok(b) => {
                widths.push(b.s0.recip() - b.s0);
                below &= b.s0.recip() < n.outer_radius_bound();
            }
            Err(_) => below = false,
        }
    }
    let decreasing = widths.len() == 6 && widths.windows(2).all(|w| w[1] < w[0]);
    suite.record("shrinking-annulus", decreasing && below, "1/s0 - s0 decreasing over n = 5..128".into());
}
