use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use laguerre_core::basin::{colorize, regions_raster, render, write_outcomes_csv, write_ppm};
use laguerre_core::characteristic::radial_zeros;
use laguerre_core::cycles::find_cycles_with_grids;
use laguerre_core::dynamics::{iterate_orbit, OrbitConfig, DEFAULT_MAX_ITER, DEFAULT_ROOT_TOL};
use laguerre_core::format::sig17;
use laguerre_core::verify::{self, VerifyOptions};
use laguerre_core::{annulus_bounds, classify, AnnulusBounds, Degree, Error, ExtendedPoint, Formulation, RenderConfig};

mod literal;

use literal::parse_complex;

#[derive(Parser)]
#[command(name = "laguerre", version, about = "Laguerre's method on z^n - 1: regions, basins, cycles and orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Simplified,
    General,
}

impl From<FormulationArg> for Formulation {
    fn from(f: FormulationArg) -> Self {
        match f {
            FormulationArg::Simplified => Formulation::Simplified,
            FormulationArg::General => Formulation::GeneralFloat,
        }
    }
}

#[derive(clap::Args)]
struct RenderArgs {
    /// Side of the square image in pixels
    #[arg(long, default_value_t = 1000)]
    pixels: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: u32,
    /// Distance to a root that counts as converged
    #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "simplified")]
    formulation: FormulationArg,
    /// Draw the boundary curves and the roots in black
    #[arg(long)]
    overlay: bool,
    /// Output image (binary PPM)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the outcome grid as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary curves, annulus radii and the region diagram
    Regions {
        #[arg(long)]
        n: u32,
        /// Angles sampled along each boundary curve
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 800)]
        pixels: usize,
        /// Output image (binary PPM)
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of theta, r_D, r_E
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Basins of attraction over a square frame centered at the origin by default
    Basins {
        #[arg(long)]
        n: u32,
        /// Half-width of the frame; defaults to (n-1)^(2/(n-4)), or 2 for n < 5
        #[arg(long)]
        frame: Option<f64>,
        /// Frame center, e.g. 1.2+0.3i or 1.05@pi/128
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Basins of attraction in a small frame around a point
    Zoom {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        half_width: f64,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Periodic cycles in the sector 0 < arg z < pi/n
    Cycles {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        period: usize,
        /// Output CSV; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scan grid sizes, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024])]
        grids: Vec<usize>,
    },
    /// Print the orbit of a starting point
    Orbit {
        #[arg(long)]
        n: u32,
        /// Starting point: a+bi, r@theta, r e^{i theta}, or s0-theta1, inv-s0-theta1, r0, inv-r0
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: u32,
        #[arg(long, default_value_t = DEFAULT_ROOT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "simplified")]
        formulation: FormulationArg,
    },
    /// Run the invariant suite and report pass or fail
    Verify {
        /// Degrees, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [5u32, 8, 16])]
        n: Vec<u32>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the report to this file
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Verification,
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn degree(n: u32, min: u32) -> Result<Degree, Failure> {
    if n < min {
        return Err(Failure::Usage(format!("n must be at least {min}, got {n}")));
    }
    Ok(Degree::new(n)?)
}

fn bounds_for(n: Degree) -> Result<Option<AnnulusBounds>, Failure> {
    if n.get() >= 5 {
        Ok(Some(annulus_bounds(n)?))
    } else {
        Ok(None)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(io_failure(path))
}

fn regions(out: &mut dyn Write, n: u32, samples: usize, pixels: usize, image: Option<PathBuf>, csv: Option<PathBuf>) -> CmdResult {
    let n = degree(n, 5)?;
    let b = annulus_bounds(n)?;
    let raster = regions_raster(n, &b, pixels, samples)?;
    let image = image.unwrap_or_else(|| PathBuf::from(format!("regions-n{n}.ppm")));
    write_ppm(&raster, &image)?;
    let csv = csv.unwrap_or_else(|| PathBuf::from(format!("regions-n{n}.csv")));
    let mut w = create(&csv)?;
    let mut rows = || -> io::Result<()> {
        writeln!(w, "theta,r_d,r_e")?;
        for s in 0..samples {
            let theta = std::f64::consts::TAU * s as f64 / samples as f64;
            let p = radial_zeros(n, theta).map_err(io::Error::other)?;
            writeln!(w, "{},{},{}", sig17(theta), sig17(p.r_d), sig17(p.r_e))?;
        }
        w.flush()
    };
    rows().map_err(io_failure(&csv))?;
    writeln!(out, "n {n}")?;
    writeln!(out, "s0 {}", sig17(b.s0))?;
    writeln!(out, "r0 {}", sig17(b.r0))?;
    writeln!(out, "1/r0 {}", sig17(b.r0.recip()))?;
    writeln!(out, "1/s0 {}", sig17(b.s0.recip()))?;
    writeln!(out, "bound {}", sig17(n.outer_radius_bound()))?;
    writeln!(out, "image {}", image.display())?;
    writeln!(out, "csv {}", csv.display())?;
    Ok(())
}

fn basins(out: &mut dyn Write, config: RenderConfig, args: &RenderArgs, default_name: &str) -> CmdResult {
    let bounds = bounds_for(config.n)?;
    let image = render(&config, bounds.as_ref())?;
    let raster = colorize(&image)?;
    let path = args.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    write_ppm(&raster, &path)?;
    if let Some(csv) = &args.csv {
        let w = create(csv)?;
        write_outcomes_csv(&image, w).map_err(io_failure(csv))?;
    }
    let c = image.counts();
    writeln!(out, "pixels {}", c.total())?;
    writeln!(out, "root {}", c.root)?;
    writeln!(out, "two-cycle {}", c.two_cycle)?;
    writeln!(out, "undecided {}", c.undecided)?;
    writeln!(out, "root fraction {}", sig17(c.root as f64 / c.total() as f64))?;
    writeln!(out, "image {}", path.display())?;
    Ok(())
}

fn render_config(n: Degree, center: laguerre_core::Complex64, half_width: f64, args: &RenderArgs) -> RenderConfig {
    RenderConfig {
        n,
        center,
        half_width,
        pixels: args.pixels,
        max_iter: args.max_iter,
        root_tol: args.tol,
        formulation: args.formulation.into(),
        overlay: args.overlay,
    }
}

fn cycles(out: &mut dyn Write, err: &mut dyn Write, n: u32, period: usize, csv: Option<PathBuf>, grids: &[usize]) -> CmdResult {
    let n = degree(n, 5)?;
    if period < 2 {
        return Err(Failure::Usage(format!("period must be at least 2, got {period}")));
    }
    if grids.is_empty() || grids.iter().any(|&g| g < 64) {
        return Err(Failure::Usage("grid sizes must be at least 64".into()));
    }
    let records = find_cycles_with_grids(n, period, grids)?;
    let write = |w: &mut dyn Write| -> io::Result<()> {
        writeln!(w, "period,n,re,im,residual")?;
        for r in &records {
            let z = r.representative;
            writeln!(w, "{},{},{},{},{}", r.period, n, sig17(z.re), sig17(z.im), sig17(r.residual))?;
        }
        w.flush()
    };
    match csv {
        Some(path) => {
            let mut w = create(&path)?;
            write(&mut w).map_err(io_failure(&path))?;
            writeln!(out, "cycles {}", records.len())?;
        }
        None => {
            write(out)?;
            writeln!(err, "cycles {}", records.len())?;
        }
    }
    Ok(())
}

fn orbit(out: &mut dyn Write, n: u32, z0: &str, max_iter: u32, tol: f64, formulation: FormulationArg) -> CmdResult {
    let n = degree(n, 2)?;
    let z = parse_complex(z0, Some(n)).map_err(Failure::Usage)?;
    if max_iter < 1 || tol.is_nan() || tol <= 0.0 {
        return Err(Failure::Usage("max-iter must be at least 1 and tol positive".into()));
    }
    let bounds = bounds_for(n)?;
    let cfg = OrbitConfig { max_iter, root_tol: tol, keep_trace: true, formulation: formulation.into() };
    let trace = iterate_orbit(n, ExtendedPoint::Finite(z), bounds.as_ref(), &cfg);
    let mut lines = || -> io::Result<()> {
        writeln!(out, "k,re,im,modulus,region")?;
        for (k, p) in trace.points.iter().enumerate() {
            let region = bounds.as_ref().map_or("-".to_string(), |b| classify(n, *p, b).to_string());
            match p {
                ExtendedPoint::Finite(w) => {
                    writeln!(out, "{k},{},{},{},{region}", sig17(w.re), sig17(w.im), sig17(w.norm()))?
                }
                ExtendedPoint::Infinity => writeln!(out, "{k},inf,inf,inf,{region}")?,
            }
        }
        writeln!(out, "outcome {}", trace.outcome)
    };
    lines().map_err(|e| Failure::Io(e.to_string()))
}

fn verify_cmd(out: &mut dyn Write, degrees: &[u32], seed: u64, report: Option<PathBuf>) -> CmdResult {
    if degrees.is_empty() {
        return Err(Failure::Usage("no degrees given".into()));
    }
    if let Some(&bad) = degrees.iter().find(|&&n| n < 2) {
        return Err(Failure::Usage(format!("n must be at least 2, got {bad}")));
    }
    let result = verify::run(degrees, seed, &VerifyOptions::default());
    let text = result.render();
    write!(out, "{text}")?;
    if let Some(path) = report {
        std::fs::write(&path, &text).map_err(io_failure(&path))?;
    }
    if result.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Regions { n, samples, pixels, out: image, csv } => regions(out, n, samples, pixels, image, csv),
        Command::Basins { n, frame, center, render } => {
            let n = degree(n, 2)?;
            let center = match center {
                Some(c) => parse_complex(&c, Some(n)).map_err(Failure::Usage)?,
                None => laguerre_core::Complex64::new(0.0, 0.0),
            };
            let half_width = frame.unwrap_or(RenderConfig::default_for(n).half_width);
            let config = render_config(n, center, half_width, &render);
            basins(out, config, &render, &format!("basins-n{n}.ppm"))
        }
        Command::Zoom { n, center, half_width, render } => {
            let n = degree(n, 2)?;
            let center = parse_complex(&center, Some(n)).map_err(Failure::Usage)?;
            let config = render_config(n, center, half_width, &render);
            basins(out, config, &render, &format!("zoom-n{n}.ppm"))
        }
        Command::Cycles { n, period, out: out_path, grids } => cycles(out, err, n, period, out_path, &grids),
        Command::Orbit { n, z0, max_iter, tol, formulation } => orbit(out, n, &z0, max_iter, tol, formulation),
        Command::Verify { n, seed, report } => verify_cmd(out, &n, seed, report),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("LAGUERRE_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Failure::Usage(format!("LAGUERRE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

/// Runs one invocation and returns the process exit code.
fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = run(cli, out, err);
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Verification) => {
            let _ = writeln!(err, "verification failed");
            2
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            3
        }
    }
}

fn main() -> ExitCode {
    if let Err(Failure::Usage(msg)) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let code = execute(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    struct Run {
        code: u8,
        stdout: String,
        stderr: String,
    }

    fn call(args: &[&str]) -> Run {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = execute(std::iter::once("laguerre").chain(args.iter().copied()), &mut out, &mut err);
        Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_exits_cleanly() {
        let out = call(&["--help"]);
        assert_eq!(out.code, 0);
        for sub in ["regions", "basins", "zoom", "cycles", "orbit", "verify"] {
            assert!(out.stdout.contains(sub), "{sub}");
        }
    }

    #[test]
    fn bad_arguments_are_usage_errors() {
        assert_eq!(call(&["basins"]).code, 1);
        assert_eq!(call(&["orbit", "--n", "8", "--z0", "nonsense"]).code, 1);
        assert_eq!(call(&["regions", "--n", "4"]).code, 1);
        assert_eq!(call(&["verify", "--n", "1"]).code, 1);
    }

    #[test]
    fn unwritable_output_is_an_io_error() {
        let out = call(&["cycles", "--n", "5", "--period", "2", "--grids", "64", "--out", "/nonexistent/dir/c.csv"]);
        assert_eq!(out.code, 3);
    }

    #[test]
    fn regions_reports_radii_and_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let ppm = dir.path().join("r.ppm");
        let csv = dir.path().join("r.csv");
        let out = call(&[
            "regions", "--n", "8", "--samples", "256", "--pixels", "64",
            "--out", ppm.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0);
        let text = out.stdout;
        let s0: f64 = text.lines().find_map(|l| l.strip_prefix("s0 ")).unwrap().parse().unwrap();
        let r0: f64 = text.lines().find_map(|l| l.strip_prefix("r0 ")).unwrap().parse().unwrap();
        assert!(0.0 < s0 && s0 < r0 && r0 < 1.0);
        assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6\n64 64\n255\n"));
        let table = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(table.lines().next(), Some("theta,r_d,r_e"));
        assert_eq!(table.lines().count(), 257);
    }

    #[test]
    fn basins_counts_add_up() {
        let dir = tempfile::tempdir().unwrap();
        let ppm = dir.path().join("b.ppm");
        let csv = dir.path().join("b.csv");
        let out = call(&[
            "basins", "--n", "5", "--pixels", "40", "--overlay",
            "--out", ppm.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0);
        let text = out.stdout;
        let field = |k: &str| -> usize {
            text.lines().find_map(|l| l.strip_prefix(k)).unwrap().trim().parse().unwrap()
        };
        assert_eq!(field("pixels "), 1600);
        assert_eq!(field("root ") + field("two-cycle ") + field("undecided "), 1600);
        let table = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(table.lines().next(), Some("i,j,kind,root_index,iterations"));
        assert_eq!(table.lines().count(), 1601);
    }

    #[test]
    fn zoom_writes_requested_size() {
        let dir = tempfile::tempdir().unwrap();
        let ppm = dir.path().join("z.ppm");
        let out = call(&[
            "zoom", "--n", "16", "--center", "1.05@0.01", "--half-width", "0.01", "--pixels", "32",
            "--out", ppm.to_str().unwrap(),
        ]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6\n32 32\n255\n"));
    }

    #[test]
    fn cycles_without_out_prints_csv() {
        let out = call(&["cycles", "--n", "10", "--period", "2"]);
        assert_eq!(out.code, 0);
        let text = out.stdout;
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("period,n,re,im,residual"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..2], ["2", "10"]);
        assert!(lines.next().is_none());
        assert!(out.stderr.contains("cycles 1"));
    }

    #[test]
    fn orbit_on_a_root_ray_converges() {
        let out = call(&["orbit", "--n", "8", "--z0", "1e^{i pi/16}"]);
        assert_eq!(out.code, 0);
        let text = out.stdout;
        assert_eq!(text.lines().next(), Some("k,re,im,modulus,region"));
        assert!(text.lines().last().unwrap().starts_with("outcome Root(0)"));
    }

    #[test]
    fn orbit_near_zero_is_two_cycle() {
        let out = call(&["orbit", "--n", "16", "--z0", "0.1+0i"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.lines().last().unwrap().starts_with("outcome TwoCycle"));
    }

    #[test]
    fn orbit_accepts_named_points() {
        let out = call(&["orbit", "--n", "8", "--z0", "inv-r0", "--max-iter", "10"]);
        assert_eq!(out.code, 0);
        let text = out.stdout;
        let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with("outcome")).collect();
        assert_eq!(rows.len(), 11);
        assert!(text.lines().last().unwrap().starts_with("outcome Undecided"));
    }

    #[test]
    fn verify_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let report = dir.path().join("report.txt");
        let a = call(&["verify", "--n", "5", "--seed", "7", "--report", report.to_str().unwrap()]);
        let b = call(&["verify", "--n", "5", "--seed", "7"]);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(std::fs::read_to_string(&report).unwrap(), a.stdout);
    }

    #[test]
    fn verify_skips_theorem_checks_below_five() {
        let out = call(&["verify", "--n", "3"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.lines().any(|l| l.starts_with("SKIP [n=3]")));
    }
}

