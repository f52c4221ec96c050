//! Command dispatch for the `tbar` binary.
//!
//! Exit codes: 0 success / suite pass, 1 verification failure, 2 usage or
//! parse error. Spec and point arguments take inline JSON or `@path` /
//! plain-path file references. `TBAR_SEED` provides the default sampler seed;
//! the `--seed` flag overrides it.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tbar::boundary::ExtPoint;
use tbar::render::{self, RenderConfig};
use tbar::transfer::{self, Delta};
use tbar::verify;
use tbar::{Dyadic, SampleConfig, SuiteReport, TreeSpec};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "tbar",
    version,
    about = "Exact dyadic geometry on a rooted tree and its boundary at infinity"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a tree spec's structural invariants and print a report.
    Validate {
        /// Tree spec: inline JSON, @path, or a plain file path.
        #[arg(long)]
        spec: String,
    },
    /// Exact compactified distance between two points of the tree or its boundary.
    Dist {
        #[arg(long)]
        spec: String,
        /// First point (inline JSON or @path).
        a: String,
        /// Second point (inline JSON or @path).
        b: String,
    },
    /// Exact extended Gromov product of two points.
    Gromov {
        #[arg(long)]
        spec: String,
        a: String,
        b: String,
    },
    /// Project a point onto the closed ball of the given radius.
    Project {
        #[arg(long)]
        spec: String,
        point: String,
        /// Radius as a dyadic, e.g. 3/2^2.
        #[arg(long)]
        sigma: String,
    },
    /// Build a retraction certificate for a control bound delta.
    Certify {
        #[arg(long)]
        spec: String,
        /// Control bound in (0, 1]: p/q, m/2^k, or an integer.
        #[arg(long)]
        delta: String,
        /// Certificate destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Run an invariant suite and print its report.
    Verify {
        suite: Suite,
        #[arg(long)]
        spec: String,
        /// Net mesh for the `net` suite, e.g. 1/2^4.
        #[arg(long)]
        eps: Option<String>,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Render the compactified tree as a radial SVG embedding.
    Render {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 6)]
        max_depth: u32,
        /// Image side length in pixels.
        #[arg(long, default_value_t = 800)]
        size: u32,
        /// First highlighted point (requires --highlight-b).
        #[arg(long)]
        highlight_a: Option<String>,
        /// Second highlighted point (requires --highlight-a).
        #[arg(long)]
        highlight_b: Option<String>,
        /// SVG destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Metric,
    Hyperbolicity,
    Boundary,
    Net,
    Contraction,
}

#[derive(Args)]
struct SampleArgs {
    /// Sampler seed; default comes from TBAR_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Address length cap for sampled points and ray prefixes.
    #[arg(long, default_value_t = 16)]
    max_depth: u32,
    /// Probability of sampling a boundary ray, as a dyadic in [0, 1].
    #[arg(long, default_value = "1/2^2")]
    boundary_fraction: String,
}

struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_text(arg: &str, what: &str) -> CliResult<String> {
    if let Some(path) = arg.strip_prefix('@') {
        return Ok(fs::read_to_string(path)?);
    }
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| CliError(format!("cannot read {what} from {arg:?}: {e}")))
}

fn load_spec(arg: &str) -> CliResult<TreeSpec> {
    let text = load_text(arg, "tree spec")?;
    let spec: TreeSpec = serde_json::from_str(&text)?;
    Ok(spec)
}

/// Loads a spec and insists it is structurally valid.
fn load_valid_spec(arg: &str) -> CliResult<TreeSpec> {
    let spec = load_spec(arg)?;
    let report = spec.validate();
    if !report.valid {
        return Err(CliError(format!(
            "invalid tree spec: {}",
            report.violations.join("; ")
        )));
    }
    Ok(spec)
}

fn load_point(arg: &str) -> CliResult<ExtPoint> {
    let text = load_text(arg, "point")?;
    let p: ExtPoint = serde_json::from_str(&text)?;
    Ok(p)
}

fn parse_dyadic(s: &str, what: &str) -> CliResult<Dyadic> {
    s.parse()
        .map_err(|e| CliError(format!("invalid {what} {s:?}: {e}")))
}

fn sample_config(args: &SampleArgs) -> CliResult<SampleConfig> {
    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var("TBAR_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| CliError(format!("TBAR_SEED is not a u64: {v:?}")))?,
            Err(_) => 1,
        },
    };
    let fraction = parse_dyadic(&args.boundary_fraction, "boundary fraction")?;
    Ok(SampleConfig::new(seed, args.count, args.max_depth, fraction)?)
}

fn emit(out: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn report_exit(report: &SuiteReport) -> i32 {
    print!("{}", report.to_json());
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.cmd {
        Cmd::Validate { spec } => {
            let spec = load_spec(&spec)?;
            let report = spec.validate();
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            print!("{json}");
            Ok(if report.valid { EXIT_PASS } else { EXIT_FAIL })
        }
        Cmd::Dist { spec, a, b } => {
            let spec = load_valid_spec(&spec)?;
            let (a, b) = (load_point(&a)?, load_point(&b)?);
            let d = tbar::boundary::dist_bar(&spec, &a, &b)?;
            println!("{d} = {}", d.to_decimal_string());
            Ok(EXIT_PASS)
        }
        Cmd::Gromov { spec, a, b } => {
            let spec = load_valid_spec(&spec)?;
            let (a, b) = (load_point(&a)?, load_point(&b)?);
            let g = tbar::boundary::gromov_ext(&spec, &a, &b)?;
            println!("{g} = {}", g.to_decimal_string());
            Ok(EXIT_PASS)
        }
        Cmd::Project { spec, point, sigma } => {
            let spec = load_valid_spec(&spec)?;
            let a = load_point(&point)?;
            let sigma = parse_dyadic(&sigma, "radius")?;
            let p = transfer::project(&spec, &a, &sigma)?;
            println!("{}", serde_json::to_string(&p)?);
            Ok(EXIT_PASS)
        }
        Cmd::Certify {
            spec,
            delta,
            out,
            sample,
        } => {
            let spec = load_valid_spec(&spec)?;
            let delta: Delta = delta
                .parse()
                .map_err(|e| CliError(format!("invalid delta: {e}")))?;
            let cfg = sample_config(&sample)?;
            let cert = transfer::certify(&spec, &delta, &cfg)?;
            emit(&out, &cert.to_json())?;
            if out.is_some() {
                eprintln!(
                    "certificate: N={} sigma={} max_track={} verdict={}",
                    cert.n,
                    cert.sigma,
                    cert.max_track_diameter,
                    if cert.passed() { "pass" } else { "fail" }
                );
            }
            Ok(if cert.passed() { EXIT_PASS } else { EXIT_FAIL })
        }
        Cmd::Verify {
            suite,
            spec,
            eps,
            sample,
        } => {
            let spec = load_valid_spec(&spec)?;
            let cfg = sample_config(&sample)?;
            let report = match suite {
                Suite::Metric => verify::check_metric_axioms(&spec, &cfg),
                Suite::Hyperbolicity => verify::check_hyperbolicity(&spec, &cfg),
                Suite::Boundary => verify::check_boundary_distances(&spec, &cfg)?,
                Suite::Contraction => verify::check_contraction(&spec, &cfg),
                Suite::Net => {
                    let eps = eps.ok_or_else(|| {
                        CliError("the net suite requires --eps".to_string())
                    })?;
                    let eps = parse_dyadic(&eps, "eps")?;
                    verify::check_net(&spec, &eps, &cfg)?
                }
            };
            Ok(report_exit(&report))
        }
        Cmd::Render {
            spec,
            max_depth,
            size,
            highlight_a,
            highlight_b,
            out,
        } => {
            let spec = load_valid_spec(&spec)?;
            let highlight = match (highlight_a, highlight_b) {
                (None, None) => None,
                (Some(a), Some(b)) => Some((load_point(&a)?, load_point(&b)?)),
                _ => {
                    return Err(CliError(
                        "--highlight-a and --highlight-b must be given together".into(),
                    ))
                }
            };
            let cfg = RenderConfig::new(max_depth, size, highlight)?;
            let svg = render::render_svg(&spec, &cfg)?;
            emit(&out, &svg)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parses the process arguments and runs one command, returning the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
