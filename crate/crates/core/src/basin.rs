//! Basin-of-attraction rendering, overlays and PPM output.

use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::characteristic::{radial_zeros, AnnulusBounds};
use crate::complex::{ComplexPoint, Degree, ExtendedPoint};
use crate::dynamics::{iterate_with, OrbitConfig, OrbitOutcome, OutcomeKind, Stepper};
use crate::error::{Error, Result};

pub use crate::dynamics::Formulation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderConfig {
    pub n: Degree,
    pub center: ComplexPoint,
    pub half_width: f64,
    pub pixels: usize,
    pub max_iter: u32,
    pub root_tol: f64,
    pub formulation: Formulation,
    pub overlay: bool,
}

impl RenderConfig {
    /// The square `[-b, b]^2` with `b = (n-1)^{2/(n-4)}` for `n >= 5`, and
    /// `[-2, 2]^2` otherwise.
    pub fn default_for(n: Degree) -> Self {
        let half_width = if n.get() >= 5 { n.outer_radius_bound() } else { 2.0 };
        RenderConfig {
            n,
            center: Complex64::new(0.0, 0.0),
            half_width,
            pixels: 1000,
            max_iter: crate::dynamics::DEFAULT_MAX_ITER,
            root_tol: crate::dynamics::DEFAULT_ROOT_TOL,
            formulation: Formulation::Simplified,
            overlay: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pixels < 16 {
            return Err(Error::InvalidConfig(format!("pixels must be at least 16, got {}", self.pixels)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidConfig(format!("half width must be positive, got {}", self.half_width)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.root_tol.is_nan() || self.root_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("root tolerance must be positive, got {}", self.root_tol)));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(Error::InvalidConfig("center must be finite".into()));
        }
        Ok(())
    }

    /// Center of pixel `(i, j)`; row 0 is the top (largest imaginary part).
    pub fn pixel_center(&self, i: usize, j: usize) -> ComplexPoint {
        let p = self.pixels as f64;
        let hw = self.half_width;
        self.center
            + Complex64::new(
                hw * ((2 * j + 1) as f64 / p - 1.0),
                hw * (1.0 - (2 * i + 1) as f64 / p),
            )
    }

    /// Continuous `(row, column)` coordinates of `z`, in pixel units with
    /// pixel centers at integers.
    pub fn to_pixel(&self, z: ComplexPoint) -> (f64, f64) {
        let p = self.pixels as f64;
        let d = (z - self.center) / self.half_width;
        ((1.0 - d.im) * p / 2.0 - 0.5, (d.re + 1.0) * p / 2.0 - 0.5)
    }

    pub fn pixel_width(&self) -> f64 {
        2.0 * self.half_width / self.pixels as f64
    }
}

/// Row-major grid of orbit outcomes, one per pixel center.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinImage {
    pub config: RenderConfig,
    pub outcomes: Vec<OrbitOutcome>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub root: usize,
    pub two_cycle: usize,
    pub undecided: usize,
}

impl OutcomeCounts {
    pub fn total(&self) -> usize {
        self.root + self.two_cycle + self.undecided
    }
}

impl BasinImage {
    pub fn get(&self, i: usize, j: usize) -> &OrbitOutcome {
        &self.outcomes[i * self.config.pixels + j]
    }

    pub fn counts(&self) -> OutcomeCounts {
        let mut c = OutcomeCounts::default();
        for o in &self.outcomes {
            match o.kind {
                OutcomeKind::Root { .. } => c.root += 1,
                OutcomeKind::TwoCycle { .. } => c.two_cycle += 1,
                OutcomeKind::Undecided { .. } => c.undecided += 1,
            }
        }
        c
    }
}

/// Classifies the orbit of every pixel center. Rows are rendered in
/// parallel; the result does not depend on the number of workers.
///
/// `bounds` enables two-cycle detection in the proven basin and is required
/// for the simplified formulation when `n >= 5`.
pub fn render(config: &RenderConfig, bounds: Option<&AnnulusBounds>) -> Result<BasinImage> {
    config.validate()?;
    if let Some(b) = bounds {
        if b.n != config.n {
            return Err(Error::InvalidConfig(format!("bounds are for n = {}, config has n = {}", b.n, config.n)));
        }
    }
    let orbit = OrbitConfig {
        max_iter: config.max_iter,
        root_tol: config.root_tol,
        keep_trace: false,
        formulation: config.formulation,
    };
    let stepper = Stepper::new(config.n, config.formulation);
    let p = config.pixels;
    let rows: Vec<Vec<OrbitOutcome>> = (0..p)
        .into_par_iter()
        .map(|i| {
            (0..p)
                .map(|j| {
                    let z0 = ExtendedPoint::Finite(config.pixel_center(i, j));
                    iterate_with(&stepper, config.n, z0, bounds, &orbit).outcome
                })
                .collect()
        })
        .collect();
    Ok(BasinImage { config: *config, outcomes: rows.into_iter().flatten().collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCurve {
    /// The inner curve `r_D(theta)`.
    Inner,
    /// The outer curve `r_E(theta)`.
    Outer,
}

/// `samples` points of the polar curve `r_D(theta) e^{i theta}` or
/// `r_E(theta) e^{i theta}` at evenly spaced `theta` in `[0, 2 pi)`.
pub fn boundary_polyline(n: Degree, curve: BoundaryCurve, samples: usize) -> Result<Vec<ComplexPoint>> {
    if samples < 8 * n.get() as usize {
        return Err(Error::InvalidConfig(format!("need at least {} samples, got {samples}", 8 * n.get())));
    }
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let theta = TAU * s as f64 / samples as f64;
            let p = radial_zeros(n, theta)?;
            let r = match curve {
                BoundaryCurve::Inner => p.r_d,
                BoundaryCurve::Outer => p.r_e,
            };
            Ok(Complex64::from_polar(r, theta))
        })
        .collect()
}

/// An 8-bit RGB image, row-major from the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Raster {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Raster { width, height, data }
    }

    pub fn pixel(&self, i: usize, j: usize) -> [u8; 3] {
        let k = 3 * (i * self.width + j);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }

    pub fn set(&mut self, i: usize, j: usize, rgb: [u8; 3]) {
        let k = 3 * (i * self.width + j);
        self.data[k..k + 3].copy_from_slice(&rgb);
    }
}

pub const WHITE: [u8; 3] = [255, 255, 255];
pub const BLACK: [u8; 3] = [0, 0, 0];
pub const UNDECIDED_GRAY: [u8; 3] = [128, 128, 128];

fn hsv(h: f64, v: f64) -> [u8; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = h6.floor() as u32 % 6;
    let f = h6 - h6.floor();
    let (q, t) = (v * (1.0 - f), v * f);
    let (r, g, b) = match sector {
        0 => (v, t, 0.0),
        1 => (q, v, 0.0),
        2 => (0.0, v, t),
        3 => (0.0, q, v),
        4 => (t, 0.0, v),
        _ => (v, 0.0, q),
    };
    let q8 = |x: f64| (x * 255.0).round().clamp(0.0, 255.0) as u8;
    [q8(r), q8(g), q8(b)]
}

/// Brightness band `0..8` from the iteration count on a log scale.
pub fn iteration_band(iterations: u32) -> u32 {
    (32 - (iterations + 1).leading_zeros() - 1).min(7)
}

/// Color for one outcome: hue `j/n` for root `j`, darker for slower
/// convergence; white for the two-cycle; gray when undecided.
pub fn outcome_color(n: Degree, kind: OutcomeKind) -> [u8; 3] {
    match kind {
        OutcomeKind::Root { index, iterations } => {
            let v = 1.0 - 0.075 * iteration_band(iterations) as f64;
            hsv(index as f64 / n.as_f64(), v)
        }
        OutcomeKind::TwoCycle { .. } => WHITE,
        OutcomeKind::Undecided { .. } => UNDECIDED_GRAY,
    }
}

pub fn colorize(image: &BasinImage) -> Result<Raster> {
    let c = &image.config;
    let mut raster = Raster::filled(c.pixels, c.pixels, WHITE);
    for i in 0..c.pixels {
        for j in 0..c.pixels {
            raster.set(i, j, outcome_color(c.n, image.get(i, j).kind));
        }
    }
    if c.overlay {
        let mut canvas = Canvas { config: c, raster: &mut raster };
        if c.n.get() >= 5 {
            let samples = (8 * c.n.get() as usize).max(2048);
            for curve in [BoundaryCurve::Inner, BoundaryCurve::Outer] {
                canvas.polyline(&boundary_polyline(c.n, curve, samples)?, true, 0.5, BLACK);
            }
        }
        for w in c.n.roots() {
            canvas.disc(w, 2.5, BLACK);
        }
    }
    Ok(raster)
}

/// Draws into a raster using the pixel mapping of a render configuration.
pub struct Canvas<'a> {
    pub config: &'a RenderConfig,
    pub raster: &'a mut Raster,
}

impl Canvas<'_> {
    fn pixel_box(&self, lo: (f64, f64), hi: (f64, f64)) -> Option<(usize, usize, usize, usize)> {
        let max = self.config.pixels as f64 - 1.0;
        let i0 = lo.0.ceil().max(0.0);
        let j0 = lo.1.ceil().max(0.0);
        let i1 = hi.0.floor().min(max);
        let j1 = hi.1.floor().min(max);
        if i0 > i1 || j0 > j1 {
            return None;
        }
        Some((i0 as usize, i1 as usize, j0 as usize, j1 as usize))
    }

    /// Colors every pixel whose center lies within `radius` pixels of the
    /// segment `a`-`b`.
    pub fn segment(&mut self, a: ComplexPoint, b: ComplexPoint, radius: f64, rgb: [u8; 3]) {
        let pa = self.config.to_pixel(a);
        let pb = self.config.to_pixel(b);
        let lo = (pa.0.min(pb.0) - radius, pa.1.min(pb.1) - radius);
        let hi = (pa.0.max(pb.0) + radius, pa.1.max(pb.1) + radius);
        let Some((i0, i1, j0, j1)) = self.pixel_box(lo, hi) else { return };
        let d = (pb.0 - pa.0, pb.1 - pa.1);
        let len2 = d.0 * d.0 + d.1 * d.1;
        for i in i0..=i1 {
            for j in j0..=j1 {
                let q = (i as f64 - pa.0, j as f64 - pa.1);
                let t = if len2 > 0.0 { ((q.0 * d.0 + q.1 * d.1) / len2).clamp(0.0, 1.0) } else { 0.0 };
                let e = (q.0 - t * d.0, q.1 - t * d.1);
                if e.0 * e.0 + e.1 * e.1 <= radius * radius {
                    self.raster.set(i, j, rgb);
                }
            }
        }
    }

    pub fn polyline(&mut self, points: &[ComplexPoint], closed: bool, radius: f64, rgb: [u8; 3]) {
        for w in points.windows(2) {
            self.segment(w[0], w[1], radius, rgb);
        }
        if closed && points.len() > 2 {
            self.segment(points[points.len() - 1], points[0], radius, rgb);
        }
    }

    pub fn disc(&mut self, center: ComplexPoint, radius: f64, rgb: [u8; 3]) {
        self.segment(center, center, radius, rgb);
    }

    /// A circle about the origin, drawn dashed when `dash` is nonzero (number
    /// of dash pairs).
    pub fn circle(&mut self, r: f64, dash: usize, radius: f64, rgb: [u8; 3]) {
        let segments = 2048;
        for s in 0..segments {
            if dash > 0 && (s * 2 * dash / segments) % 2 == 1 {
                continue;
            }
            let a = Complex64::from_polar(r, TAU * s as f64 / segments as f64);
            let b = Complex64::from_polar(r, TAU * (s + 1) as f64 / segments as f64);
            self.segment(a, b, radius, rgb);
        }
    }
}

/// The region diagram: boundary curves, unit circle, root and bisecting
/// rays, the circles of radius `s0, r0, 1/r0, 1/s0`, and the roots.
pub fn regions_raster(n: Degree, bounds: &AnnulusBounds, pixels: usize, samples: usize) -> Result<Raster> {
    let mut config = RenderConfig::default_for(n);
    config.pixels = pixels;
    config.half_width = 1.1 * bounds.outer_escape();
    config.validate()?;
    let inner = boundary_polyline(n, BoundaryCurve::Inner, samples)?;
    let outer = boundary_polyline(n, BoundaryCurve::Outer, samples)?;
    let mut raster = Raster::filled(pixels, pixels, WHITE);
    let mut canvas = Canvas { config: &config, raster: &mut raster };
    let far = 2.0 * config.half_width;
    let nf = n.as_f64();
    for k in 0..n.get() {
        let root_ray = Complex64::from_polar(far, TAU * k as f64 / nf);
        let bisector = Complex64::from_polar(far, (2 * k + 1) as f64 * PI / nf);
        canvas.segment(Complex64::new(0.0, 0.0), root_ray, 0.5, [90, 90, 90]);
        canvas.segment(Complex64::new(0.0, 0.0), bisector, 0.5, [170, 170, 170]);
    }
    for r in [bounds.s0, bounds.r0, bounds.r0.recip(), bounds.s0.recip()] {
        canvas.circle(r, 64, 0.5, [60, 60, 200]);
    }
    canvas.circle(1.0, 0, 0.7, BLACK);
    canvas.polyline(&inner, true, 1.0, BLACK);
    canvas.polyline(&outer, true, 1.0, BLACK);
    for w in n.roots() {
        canvas.disc(w, 2.5, [200, 30, 30]);
    }
    Ok(raster)
}

pub fn write_ppm_to(raster: &Raster, mut out: impl Write) -> io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", raster.width, raster.height)?;
    out.write_all(&raster.data)?;
    out.flush()
}

/// Binary PPM (`P6`), rows from top to bottom, RGB order.
pub fn write_ppm(raster: &Raster, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_ppm_to(raster, BufWriter::new(file)).map_err(io_err)
}

/// The outcome grid as CSV with columns `i,j,kind,root_index,iterations`.
pub fn write_outcomes_csv(image: &BasinImage, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "i,j,kind,root_index,iterations")?;
    let p = image.config.pixels;
    for i in 0..p {
        for j in 0..p {
            let kind = image.get(i, j).kind;
            let index = match kind {
                OutcomeKind::Root { index, .. } => index.to_string(),
                _ => String::new(),
            };
            writeln!(out, "{i},{j},{},{index},{}", kind.name(), kind.iterations())?;
        }
    }
    out.flush()
}

/// Pixels contradicting the proven dynamics: a root outcome inside
/// `|z| < s0 - eps`, or a two-cycle outcome inside `r0 + eps < |z| < 1/r0 - eps`,
/// with `eps` two pixel widths.
pub fn theory_violations(image: &BasinImage, bounds: &AnnulusBounds) -> usize {
    let c = &image.config;
    let eps = 2.0 * c.pixel_width();
    let mut bad = 0;
    for i in 0..c.pixels {
        for j in 0..c.pixels {
            let r = c.pixel_center(i, j).norm();
            let kind = image.get(i, j).kind;
            if kind.is_root() && r < bounds.s0 - eps {
                bad += 1;
            }
            if kind.is_two_cycle() && r > bounds.r0 + eps && r < bounds.r0.recip() - eps {
                bad += 1;
            }
        }
    }
    bad
}

/// Fraction of in-frame pixels whose outcome disagrees with the outcome at
/// the nearest pixel to their center rotated by `2 pi/n`, with root indices
/// shifted accordingly.
pub fn rotation_mismatch(image: &BasinImage) -> f64 {
    let c = &image.config;
    let n = c.n.get();
    let rot = Complex64::from_polar(1.0, TAU / c.n.as_f64());
    let p = c.pixels as f64;
    let (mut compared, mut differ) = (0usize, 0usize);
    for i in 0..c.pixels {
        for j in 0..c.pixels {
            let (ri, rj) = c.to_pixel(c.pixel_center(i, j) * rot);
            let (ri, rj) = (ri.round(), rj.round());
            if ri < 0.0 || rj < 0.0 || ri >= p || rj >= p {
                continue;
            }
            compared += 1;
            let a = image.get(i, j).kind;
            let b = image.get(ri as usize, rj as usize).kind;
            let same = match (a, b) {
                (OutcomeKind::Root { index: x, .. }, OutcomeKind::Root { index: y, .. }) => (x + 1) % n == y,
                (OutcomeKind::TwoCycle { .. }, OutcomeKind::TwoCycle { .. }) => true,
                (OutcomeKind::Undecided { .. }, OutcomeKind::Undecided { .. }) => true,
                _ => false,
            };
            if !same {
                differ += 1;
            }
        }
    }
    if compared == 0 {
        0.0
    } else {
        differ as f64 / compared as f64
    }
}
