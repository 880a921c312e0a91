//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use laguerre_core::basin::{render, rotation_mismatch, theory_violations};
use laguerre_core::dynamics::{convergence_order_estimate, unit_circle_step_angle};
use laguerre_core::verify::sign_change_brackets;
use laguerre_core::*;

const BIN: &str = env!("CARGO_BIN_EXE_laguerre");

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn deg(n: u32) -> Degree {
    Degree::new(n).unwrap()
}

fn laguerre(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("LAGUERRE_THREADS", t.to_string()),
        None => cmd.env_remove("LAGUERRE_THREADS"),
    };
    cmd.output().expect("run laguerre")
}

/// Runs `cycles` and returns the rows and the elapsed time.
fn cycles(n: u32, period: u32, dir: &Path) -> (Vec<Complex64>, Duration) {
    let out = dir.join(format!("cycles-{n}-{period}.csv"));
    let start = Instant::now();
    let res = laguerre(
        &["cycles", "--n", &n.to_string(), "--period", &period.to_string(), "--out", out.to_str().unwrap()],
        None,
    );
    let elapsed = start.elapsed();
    assert!(res.status.success(), "cycles failed: {}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Complex64::new(f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    (rows, elapsed)
}

fn digits(got: Complex64, want: Complex64) -> f64 {
    let e = (got - want).norm() / want.norm();
    if e == 0.0 {
        17.0
    } else {
        -e.log10()
    }
}

/// Best agreement, in significant digits, of `want` with any row.
fn best_match(rows: &[Complex64], want: Complex64) -> f64 {
    rows.iter().map(|&z| digits(z, want)).fold(0.0, f64::max)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_1(dir: &Path) -> Outcome {
    let five = [c(14.76136221056119, 6.053684491748273), c(13.34758676939078, 8.758987500188936)];
    let six = [c(4.749579144551457, 1.098207699050568), c(4.462144769610253, 2.042313839245265)];
    let eight_six = [
        c(2.424861149787357, 0.04867681760903371),
        c(2.452422308102194, 0.3140142922891776),
        c(2.421772891898377, 0.6579277753771876),
        c(2.394665948621691, 0.9684820140915532),
    ];
    let limit = Duration::from_secs(300);
    let (r5, t5) = cycles(5, 4, dir);
    let (r6, t6) = cycles(6, 4, dir);
    let (r8, t8) = cycles(8, 6, dir);
    let d5 = five.iter().map(|&w| best_match(&r5, w)).fold(f64::INFINITY, f64::min);
    let d6 = six.iter().map(|&w| best_match(&r6, w)).fold(f64::INFINITY, f64::min);
    let d8 = eight_six.iter().map(|&w| best_match(&r8, w)).fold(f64::INFINITY, f64::min);
    let ok = r5.len() == 2
        && r6.len() == 2
        && r8.len() == 23
        && d5 >= 12.0
        && d6 >= 12.0
        && d8 >= 12.0
        && [t5, t6, t8].iter().all(|t| *t <= limit);
    check(
        ok,
        format!(
            "n=5 k=4: {} rows, {d5:.1} digits; n=6 k=4: {} rows, {d6:.1} digits; n=8 k=6: {} rows (want 23), spot checks {d8:.1} digits; times {:.1?}/{:.1?}/{:.1?}",
            r5.len(),
            r6.len(),
            r8.len(),
            t5,
            t6,
            t8
        ),
    )
}

fn criterion_2(dir: &Path) -> Outcome {
    let want = [(8u32, 0usize), (9, 0), (10, 1), (12, 1), (17, 2)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, count) in want {
        let (rows, t) = cycles(n, 2, dir);
        ok &= rows.len() == count && t <= Duration::from_secs(120);
        parts.push(format!("n={n}: {} (want {count}, {:.1?})", rows.len(), t));
    }
    check(ok, parts.join("; "))
}

fn bisect_zero(n: Degree, theta: f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = char_fn(n, lo, theta) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (char_fn(n, mid, theta) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let (mut bad_count, mut worst_pair, mut above, mut sign_bad, mut sign_checked) = (0, 0.0f64, 0, 0, 0);
    for n in [5u32, 6, 7, 8, 12, 16, 32, 64] {
        let n = deg(n);
        let bound = n.outer_radius_bound();
        for _ in 0..100 {
            let theta = rng.gen_range(0.0..TAU);
            let br = sign_change_brackets(n, theta, 100_000);
            if br.len() != 3 || !(br[1].0 <= 1.0 && 1.0 <= br[1].1) {
                bad_count += 1;
                continue;
            }
            let r_d = bisect_zero(n, theta, br[0].0, br[0].1);
            let r_e = bisect_zero(n, theta, br[2].0, br[2].1);
            worst_pair = worst_pair.max((r_d * r_e - 1.0).abs());
            let p = radial_zeros(n, theta).unwrap();
            worst_pair = worst_pair.max((p.r_d * p.r_e - 1.0).abs());
            if r_e >= bound || p.r_e >= bound {
                above += 1;
            }
        }
        let b = annulus_bounds(n).unwrap();
        let nf = n.as_f64();
        for _ in 0..10_000 {
            let r = rng.gen_range((0.5 * b.s0).ln()..(2.0 / b.s0).ln()).exp();
            let t = rng.gen_range(-PI..PI);
            let f = char_fn(n, r, t);
            if f.abs() <= 1e-12 * ((nf - 1.0).powi(2) * r.powf(nf)).max(1.0) {
                continue;
            }
            let w = laguerre_simplified(n, ExtendedPoint::Finite(Complex64::from_polar(r, t)));
            sign_checked += 1;
            if (f < 0.0) != (w.modulus() * r > 1.0) {
                sign_bad += 1;
            }
        }
    }
    let t = start.elapsed();
    check(
        bad_count == 0 && worst_pair <= 1e-10 && above == 0 && sign_bad == 0 && t <= Duration::from_secs(60),
        format!(
            "{bad_count} angles without three zeros, max |r_D r_E - 1| = {worst_pair:.1e}, {above} above bound, {sign_bad} of {sign_checked} sign mismatches, {t:.1?}"
        ),
    )
}

fn step(n: Degree, z: Complex64) -> Complex64 {
    laguerre_simplified(n, ExtendedPoint::Finite(z)).finite().unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut rot, mut conj, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for n in [5u32, 8, 16] {
        let n = deg(n);
        let w = Complex64::from_polar(1.0, TAU / n.as_f64());
        for _ in 0..1000 {
            let z = Complex64::from_polar(rng.gen_range((0.05f64).ln()..(20.0f64).ln()).exp(), rng.gen_range(-PI..PI));
            let lz = step(n, z);
            rot = rot.max(rel(step(n, w * z), w * lz));
            if !cycles::near_bisector(n, z, 1e-6) {
                conj = conj.max(rel(step(n, z.conj()), lz.conj()));
            }
            inv = inv.max(rel(step(n, z.conj().inv()), lz.conj().inv()));
        }
    }
    check(
        rot <= 1e-12 && conj <= 1e-12 && inv <= 1e-12,
        format!("max relative errors: rotation {rot:.1e}, conjugation {conj:.1e}, inversion {inv:.1e}"),
    )
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut worst, mut bad_g, mut orbit_ok) = (0.0f64, 0, true);
    let mut iters = Vec::new();
    for n in [5u32, 8, 16] {
        let n = deg(n);
        for s in 0..1000 {
            let t = if s == 0 { n.half_sector() } else { n.half_sector() * (1.0 - rng.gen::<f64>()) };
            worst = worst.max((step(n, Complex64::from_polar(1.0, t)).norm() - 1.0).abs());
            let g = unit_circle_step_angle(n, t);
            if !(0.0 < g && g < t) {
                bad_g += 1;
            }
        }
        let b = annulus_bounds(n).unwrap();
        let cfg = OrbitConfig { max_iter: 60, root_tol: 1e-9, ..OrbitConfig::default() };
        let z0 = ExtendedPoint::Finite(Complex64::from_polar(1.0, PI / (2.0 * n.as_f64())));
        let out = iterate_orbit(n, z0, Some(&b), &cfg).outcome;
        let close = out.final_point.finite().is_some_and(|z| (z - 1.0).norm() < 1e-9);
        orbit_ok &= matches!(out.kind, OutcomeKind::Root { index: 0, .. }) && close;
        iters.push(out.kind.iterations());
    }
    check(
        worst <= 1e-13 && bad_g == 0 && orbit_ok,
        format!("max ||L| - 1| = {worst:.1e}, {bad_g} angle-step violations, orbit iterations {iters:?}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let n = deg(16);
    let b = annulus_bounds(n).unwrap();
    let mut cfg = RenderConfig::default_for(n);
    cfg.pixels = 512;
    let img = render(&cfg, Some(&b)).unwrap();
    let bad = theory_violations(&img, &b);
    let mismatch = rotation_mismatch(&img);
    // Same comparison against orbits from the exactly rotated centers.
    let w = Complex64::from_polar(1.0, TAU / 16.0);
    let mut exact = 0;
    for i in 0..cfg.pixels {
        for j in 0..cfg.pixels {
            let other = iterate_orbit(n, ExtendedPoint::Finite(cfg.pixel_center(i, j) * w), Some(&b), &OrbitConfig::default());
            let same = match (img.get(i, j).kind, other.outcome.kind) {
                (OutcomeKind::Root { index: a, .. }, OutcomeKind::Root { index: c, .. }) => (a + 1) % 16 == c,
                (a, c) => a.name() == c.name(),
            };
            if !same {
                exact += 1;
            }
        }
    }
    let t = start.elapsed();
    check(
        bad == 0 && mismatch < 0.01 && t <= Duration::from_secs(60),
        format!(
            "{bad} theory violations; nearest-pixel rotation mismatch {:.2}% (limit 1%); mismatches against exactly rotated centers {exact}; {t:.1?}",
            100.0 * mismatch
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let n = deg(8);
    let b = annulus_bounds(n).unwrap();
    let mut cfg = RenderConfig::default_for(n);
    cfg.pixels = 500;
    cfg.half_width = 20.0;
    cfg.max_iter = 100;
    cfg.formulation = Formulation::GeneralFloat;
    let general = render(&cfg, None).unwrap().counts();
    let fraction = general.root as f64 / general.total() as f64;
    cfg.formulation = Formulation::Simplified;
    let simple = render(&cfg, Some(&b)).unwrap();
    let mut outside = 0;
    let mut wrong = 0;
    for i in 0..cfg.pixels {
        for j in 0..cfg.pixels {
            if cfg.pixel_center(i, j).norm() > 1.0 / b.s0 {
                outside += 1;
                if !simple.get(i, j).kind.is_two_cycle() {
                    wrong += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    check(
        fraction >= 0.99 && wrong == 0 && t <= Duration::from_secs(120),
        format!(
            "general form: {:.2}% root (want >= 99%), {} two-cycle, {} undecided; simplified: {wrong} of {outside} pixels beyond 1/s0 not two-cycle; {t:.1?}",
            100.0 * fraction,
            general.two_cycle,
            general.undecided
        ),
    )
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut lo, mut hi, mut bad) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for s in 0..50 {
        let n = deg([5u32, 8, 16][s % 3]);
        let j = rng.gen_range(0..n.get());
        let d = Complex64::from_polar(rng.gen_range((1e-3f64).ln()..(4e-2f64).ln()).exp(), rng.gen_range(-PI..PI));
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
    let mut kahan_bad = 0;
    let mut kahan_checked = 0;
    while kahan_checked < 1000 {
        let degree = rng.gen_range(2..=16usize);
        let roots: Vec<Complex64> = (0..degree).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let p = PolynomialCoeffs::from_roots(&roots).unwrap();
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(w) = laguerre_general(&p, z) else { continue };
        kahan_checked += 1;
        let nearest = roots.iter().map(|r| (z - r).norm()).fold(f64::INFINITY, f64::min);
        if nearest > (degree as f64).sqrt() * (z - w).norm() + 1e-9 {
            kahan_bad += 1;
        }
    }
    check(
        bad == 0 && kahan_bad == 0,
        format!("order estimates in [{lo:.6}, {hi:.6}], {bad} outside [2.5, 3.5]; Kahan bound violated at {kahan_bad} of {kahan_checked} points"),
    )
}

fn criterion_9(dir: &Path) -> Outcome {
    let mut same = true;
    let mut notes = Vec::new();
    let runs: [(&str, Vec<&str>); 3] = [
        ("basins", vec!["basins", "--n", "8", "--pixels", "200", "--overlay"]),
        ("basins-general", vec!["basins", "--n", "8", "--pixels", "200", "--frame", "20", "--formulation", "general"]),
        ("cycles", vec!["cycles", "--n", "8", "--period", "4"]),
    ];
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for threads in [1usize, 8] {
            let out = dir.join(format!("{name}-{threads}"));
            let mut a: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            a.push("--out".into());
            a.push(out.to_str().unwrap().into());
            if name.starts_with("basins") {
                a.push("--csv".into());
                a.push(format!("{}.csv", out.display()));
            }
            let refs: Vec<&str> = a.iter().map(|s| s.as_str()).collect();
            let res = laguerre(&refs, Some(threads));
            assert!(res.status.success());
            let mut bytes = std::fs::read(&out).unwrap();
            if name.starts_with("basins") {
                bytes.extend(std::fs::read(format!("{}.csv", out.display())).unwrap());
            }
            let stdout = String::from_utf8_lossy(&res.stdout).replace(out.to_str().unwrap(), "");
            outputs.push((bytes, stdout));
        }
        let equal = outputs[0] == outputs[1];
        same &= equal;
        notes.push(format!("{name}: {}", if equal { "identical" } else { "differ" }));
    }
    check(same, notes.join("; "))
}

/// Mixed root and two-cycle outcomes in zooms around a basin boundary point
/// in the outer annulus for `n = 128`.
fn fractality_probe() -> Outcome {
    let n = deg(128);
    let b = annulus_bounds(n).unwrap();
    let cfg = OrbitConfig { max_iter: 500, ..OrbitConfig::default() };
    let theta = 0.37 * PI / 128.0;
    let kind = |r: f64| iterate_orbit(n, ExtendedPoint::Finite(Complex64::from_polar(r, theta)), Some(&b), &cfg).outcome.kind;
    let (lo, hi) = (1.0 / b.r0, 1.0 / b.s0);
    let samples = 4000;
    let mut bracket = None;
    let mut prev = (lo, kind(lo));
    for s in 1..=samples {
        let r = lo + (hi - lo) * s as f64 / samples as f64;
        let k = kind(r);
        if prev.1.is_root() && k.is_two_cycle() {
            bracket = Some((prev.0, r));
            break;
        }
        prev = (r, k);
    }
    let Some((mut a, mut c)) = bracket else {
        return check(false, "no root/two-cycle transition found along the ray");
    };
    for _ in 0..60 {
        let m = 0.5 * (a + c);
        if kind(m).is_root() {
            a = m;
        } else {
            c = m;
        }
    }
    let center = Complex64::from_polar(0.5 * (a + c), theta);
    let mut ok = true;
    let mut parts = Vec::new();
    for hw in [1e-2, 1e-3, 1e-4] {
        let rc = RenderConfig {
            n,
            center,
            half_width: hw,
            pixels: 160,
            max_iter: 500,
            root_tol: 1e-9,
            formulation: Formulation::Simplified,
            overlay: false,
        };
        let counts = render(&rc, Some(&b)).unwrap().counts();
        ok &= counts.root > 0 && counts.two_cycle > 0;
        parts.push(format!("hw {hw:.0e}: {} root / {} two-cycle", counts.root, counts.two_cycle));
    }
    check(ok, format!("center |z| = {:.12}; {}", center.norm(), parts.join(", ")))
}

type Criterion<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + 'a>;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 Table 1 reproduction", Box::new(|_| criterion_1(dir.path()))),
        ("2 period-2 census", Box::new(|_| criterion_2(dir.path()))),
        ("3 characteristic function theorem", Box::new(criterion_3)),
        ("4 symmetry suite", Box::new(criterion_4)),
        ("5 unit-circle dynamics", Box::new(criterion_5)),
        ("6 basin conformance n=16", Box::new(|_| criterion_6())),
        ("7 general-form basins n=8", Box::new(|_| criterion_7())),
        ("8 cubic order and Kahan bound", Box::new(criterion_8)),
        ("9 determinism across thread counts", Box::new(|_| criterion_9(dir.path()))),
        ("fractality probe n=128", Box::new(|_| fractality_probe())),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let out = run(&mut rng);
        if !out.ok {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if out.ok { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {failed} failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
