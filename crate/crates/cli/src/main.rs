//! Command-line front end: exact ball magnitudes, finite magnitudes, bound
//! reports and embedding simulations.

mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convex_magnitude::rng::DEFAULT_SEED;
use convex_magnitude::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0} sandwich violation(s)")]
    Violations(usize),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Core(Error::InvalidInput(_)) => 1,
            CliError::Core(Error::ResourceLimit(_) | Error::DimensionTooLarge { .. }) => 3,
            CliError::Core(_) | CliError::Violations(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "convex-magnitude", version, about = "Magnitude of metric spaces and convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact magnitude function of the unit ball in odd dimension d.
    BallExact(BallExactArgs),
    /// Magnitude function of a finite point cloud or distance matrix.
    FiniteMag(FiniteMagArgs),
    /// Lower and upper bounds on the magnitude of a convex body.
    BoundCheck(BoundCheckArgs),
    /// Distortion of the Rademacher embedding and convergence of the
    /// ℓ1 intrinsic volumes of its images.
    EmbedSim(EmbedSimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    L1,
    L2,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    #[arg(long = "t-start")]
    pub start: Option<f64>,
    #[arg(long = "t-stop")]
    pub stop: Option<f64>,
    #[arg(long = "t-count")]
    pub count: Option<usize>,
    /// Space the grid logarithmically.
    #[arg(long = "t-log")]
    pub log: bool,
}

impl GridArgs {
    fn is_set(&self) -> bool {
        self.start.is_some() || self.stop.is_some() || self.count.is_some()
    }

    /// Grid values, falling back to `default` for unset fields.
    pub fn values(&self, default: (f64, f64, usize, bool)) -> Result<Vec<f64>, CliError> {
        let start = self.start.unwrap_or(default.0);
        let stop = self.stop.unwrap_or(default.1);
        let count = self.count.unwrap_or(default.2);
        let log = self.log || (!self.is_set() && default.3);
        if count == 0 {
            return Err(CliError::Usage("--t-count must be at least 1".into()));
        }
        if !(start.is_finite() && stop.is_finite()) || start > stop {
            return Err(CliError::Usage(format!("bad t range [{start}, {stop}]")));
        }
        if log && start <= 0.0 {
            return Err(CliError::Usage("a log grid needs --t-start > 0".into()));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = |i: usize| i as f64 / (count - 1) as f64;
        Ok((0..count)
            .map(|i| match (i, log) {
                (0, _) => start,
                (i, _) if i == count - 1 => stop,
                (i, true) => start * (stop / start).powf(step(i)),
                (i, false) => start + (stop - start) * step(i),
            })
            .collect())
    }
}

#[derive(Debug, Args)]
struct BallExactArgs {
    #[arg(long)]
    d: u32,
    /// Exact evaluation points, e.g. `1`, `1/2` or `0.25`.
    #[arg(long, num_args = 1..)]
    eval: Vec<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct FiniteMagArgs {
    /// Point cloud file: one point per line.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Distance matrix file: square CSV.
    #[arg(long)]
    distances: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "l2")]
    metric: MetricArg,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BoundCheckArgs {
    /// Body JSON file.
    #[arg(long)]
    body: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo samples per estimated intrinsic volume.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long = "cap-points", default_value_t = convex_magnitude::bounds::DEFAULT_CAP_POINTS)]
    cap_points: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EmbedSimArgs {
    /// Dimension of the embedded point; defaults to the body dimension or 1.
    #[arg(long)]
    d: Option<usize>,
    /// Point whose distortion is measured, comma separated; defaults to e_1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Vec<f64>,
    /// Values of n, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 4, 16])]
    n: Vec<usize>,
    /// Body JSON file for the intrinsic-volume convergence table.
    #[arg(long)]
    body: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sample the distortion ratio instead of enumerating all sign patterns.
    #[arg(long)]
    statistical: bool,
    #[command(flatten)]
    common: Common,
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BallExact(a) => {
            let grid = if a.grid.is_set() { Some(a.grid.values((0.0, 1.0, 11, false))?) } else { None };
            let text = commands::ball_exact(a.d, &a.eval, grid.as_deref(), a.common.format)?;
            emit(&a.common, &text)
        }
        Command::FiniteMag(a) => {
            let metric = match a.metric {
                MetricArg::L1 => convex_magnitude::Metric::L1,
                MetricArg::L2 => convex_magnitude::Metric::L2,
            };
            let space = input::load_space(a.points.as_deref(), a.distances.as_deref(), metric)?;
            let ts = a.grid.values((0.1, 10.0, 20, true))?;
            emit(&a.common, &commands::finite_mag(&space, &ts, a.common.format)?)
        }
        Command::BoundCheck(a) => {
            let body = input::load_body(&a.body)?;
            let ts = a.grid.values((0.1, 10.0, 20, true))?;
            let (text, violations) = commands::bound_check(&body, &ts, a.seed, a.samples, a.cap_points, a.common.format)?;
            emit(&a.common, &text)?;
            if violations > 0 {
                return Err(CliError::Violations(violations));
            }
            Ok(())
        }
        Command::EmbedSim(a) => {
            let body = a.body.as_deref().map(input::load_body).transpose()?;
            let d = a.d.or(body.as_ref().map(|b| b.dim())).unwrap_or(1);
            let y = if a.point.is_empty() {
                let mut e = vec![0.0; d];
                e[0] = 1.0;
                e
            } else if a.point.len() == d || a.d.is_none() {
                a.point.clone()
            } else {
                return Err(CliError::Usage(format!("--point has {} coordinates, --d is {d}", a.point.len())));
            };
            let cfg = commands::EmbedConfig {
                y,
                ns: a.n,
                body,
                k: a.k,
                samples: a.samples,
                seed: a.seed,
                statistical: a.statistical,
            };
            emit(&a.common, &commands::embed_sim(&cfg, a.common.format)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(start: Option<f64>, stop: Option<f64>, count: Option<usize>, log: bool) -> GridArgs {
        GridArgs { start, stop, count, log }
    }

    #[test]
    fn grids() {
        assert_eq!(grid(Some(0.0), Some(1.0), Some(3), false).values((0.0, 0.0, 1, false)).unwrap(), vec![0.0, 0.5, 1.0]);
        let g = grid(Some(0.1), Some(10.0), Some(3), true).values((0.0, 0.0, 1, false)).unwrap();
        assert_eq!(g[0], 0.1);
        assert!((g[1] - 1.0).abs() < 1e-15);
        assert_eq!(g[2], 10.0);
        assert_eq!(grid(None, None, None, false).values((0.1, 10.0, 20, true)).unwrap().len(), 20);
        assert!(grid(Some(0.0), Some(1.0), Some(0), false).values((0.0, 0.0, 1, false)).is_err());
        assert!(grid(Some(0.0), Some(1.0), Some(4), true).values((0.0, 0.0, 1, false)).is_err());
        assert!(grid(Some(2.0), Some(1.0), Some(4), false).values((0.0, 0.0, 1, false)).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(Error::ResourceLimit("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(Error::ZeroQuadraticForm).exit_code(), 2);
        assert_eq!(CliError::Violations(1).exit_code(), 2);
    }
}
