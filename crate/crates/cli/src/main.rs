use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use darboux_cli::args::{parse_interval, parse_point, parse_positive};
use darboux_cli::commands::{appendix, curvature, identities, metric, reduce, scan, DEFAULT_SEED};
use darboux_cli::Report;
use darboux_core::curvature::CurvatureConfig;
use darboux_core::embedding::Fixture;
use darboux_core::{Point, Rect};

/// Exit status for unusable input; clap uses the same code.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "darboux", version, about = "Verification suites for the Darboux equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature construction.
    #[command(subcommand)]
    Curvature(CurvatureCmd),
    /// Metrics from curvature.
    #[command(subcommand)]
    Metric(MetricCmd),
    /// Identity suites on a fixture.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Boundary scans.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Reduction to characteristic coordinates at a point.
    Reduce(ReduceArgs),
}

#[derive(Subcommand)]
enum CurvatureCmd {
    /// Build K, certify every bump, dump the field.
    Build(BuildArgs),
}

#[derive(Subcommand)]
enum MetricCmd {
    /// Integrate the warp of dx² + G² dy² for a curvature.
    FromK(FromKArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Divergence, geometric and integral identities.
    Identities(IdentitiesArgs),
    /// Normal component, flatness and development round trip.
    Appendix(AppendixArgs),
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Boundary scan and smallness certificate on family-sized squares.
    Lemma2(ScanArgs),
}

#[derive(Args)]
struct Out {
    /// Directory for report.json and CSV dumps.
    #[arg(long, default_value = "darboux-out")]
    out: PathBuf,
}

#[derive(Args)]
struct SpecArgs {
    /// Curvature spec JSON (`n_max`, `gamma_rule`, `phi`).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Number of squares; overrides the spec's value.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Spacing of the K dump.
    #[arg(long, value_parser = parse_positive)]
    h: Option<f64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct FromKArgs {
    /// Constant curvature; otherwise K comes from the spec.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["spec", "nmax"])]
    constant: Option<f64>,
    #[command(flatten)]
    spec: SpecArgs,
    /// x-range `a:b`; must contain 0.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true, default_value = "-0.4:0.4")]
    domain: (f64, f64),
    /// y-range `c:d`; defaults to the x-range.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    ydomain: Option<(f64, f64)>,
    /// RK4 step.
    #[arg(long, value_parser = parse_positive)]
    h: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct IdentitiesArgs {
    #[arg(long, value_parser = parse_fixture)]
    fixture: Fixture,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Gauss–Legendre points per cell and direction.
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long, value_parser = parse_positive)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct AppendixArgs {
    #[arg(long, value_parser = parse_fixture)]
    fixture: Fixture,
    /// Development grid spacing.
    #[arg(long, value_parser = parse_positive)]
    h: Option<f64>,
    /// Tolerance of the development round trip.
    #[arg(long, value_parser = parse_positive)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_parser = parse_fixture)]
    fixture: Fixture,
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_parser = parse_fixture)]
    fixture: Fixture,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    point: Point,
    #[arg(long, value_parser = parse_positive)]
    h: Option<f64>,
    /// Tolerance of the reduced-equation residual at `h`.
    #[arg(long, value_parser = parse_positive)]
    tol: Option<f64>,
    #[command(flatten)]
    out: Out,
}

fn parse_fixture(s: &str) -> Result<Fixture, String> {
    Fixture::parse(s).map_err(|e| e.to_string())
}

fn load_spec(args: &SpecArgs) -> Result<CurvatureConfig, String> {
    let mut cfg = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let cfg: CurvatureConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg
        }
        None => CurvatureConfig::default(),
    };
    if let Some(n) = args.nmax {
        cfg.n_max = n;
    }
    // Surface schedule and size errors as configuration errors.
    darboux_core::curvature::CurvatureSpec::from_config(&cfg).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<(Report, PathBuf), String> {
    Ok(match command {
        Command::Curvature(CurvatureCmd::Build(a)) => {
            let mut cfg = curvature::Config::new(load_spec(&a.spec)?);
            cfg.h = a.h.unwrap_or(cfg.h);
            (curvature::run(&cfg, Some(&a.out.out)), a.out.out)
        }
        Command::Metric(MetricCmd::FromK(a)) => {
            let source = match a.constant {
                Some(c) if c.is_finite() => metric::Source::Constant(c),
                Some(c) => return Err(format!("constant curvature must be finite, got {c}")),
                None => metric::Source::Spec(load_spec(&a.spec)?),
            };
            let (c, d) = a.ydomain.unwrap_or(a.domain);
            let mut cfg = metric::Config::new(source, Rect::new(a.domain.0, a.domain.1, c, d));
            cfg.step = a.h.unwrap_or(cfg.step);
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            (metric::run(&cfg, Some(&a.out.out)), a.out.out)
        }
        Command::Verify(VerifyCmd::Identities(a)) => {
            let mut cfg = identities::Config::new(a.fixture);
            cfg.seed = a.seed;
            cfg.quad_order = a.quad_order.unwrap_or(cfg.quad_order);
            if cfg.quad_order == 0 {
                return Err("quadrature order must be positive".into());
            }
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            (identities::run(&cfg, Some(&a.out.out)), a.out.out)
        }
        Command::Verify(VerifyCmd::Appendix(a)) => {
            let mut cfg = appendix::Config::new(a.fixture);
            cfg.step = a.h.unwrap_or(cfg.step);
            cfg.round_trip_tol = a.tol.unwrap_or(cfg.round_trip_tol);
            (appendix::run(&cfg, Some(&a.out.out)), a.out.out)
        }
        Command::Scan(ScanCmd::Lemma2(a)) => {
            let cfg = scan::Config { fixture: a.fixture, curvature: load_spec(&a.spec)? };
            (scan::run(&cfg, Some(&a.out.out)), a.out.out)
        }
        Command::Reduce(a) => {
            let mut cfg = reduce::Config::new(a.fixture);
            cfg.point = a.point;
            cfg.h = a.h.unwrap_or(cfg.h);
            cfg.reduced_tol = a.tol.unwrap_or(cfg.reduced_tol);
            (reduce::run(&cfg, Some(&a.out.out)), a.out.out)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, dir) = match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    print!("{}", report.to_json());
    if let Err(e) = report.write(&dir) {
        eprintln!("error: cannot write report to {}: {e}", dir.display());
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit_code() as u8)
}
