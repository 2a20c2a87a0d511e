//! The `mld` command line: `estimate`, `moments` and `experiment`.
//!
//! Exit codes: 0 on success, 1 on runtime failures, 2 on usage and
//! validation errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::baselines::{self, Bandwidth, BaselineError};
use crate::curve::{linspace, DensityCurve};
use crate::distributions::Distribution;
use crate::estimators::{self, AdaptiveConfig, EstimatorError, MldConfig};
use crate::harness::{self, EstimatorKind, ExperimentSpec, GridSpec, HarnessError, Mode};
use crate::moments::{self, fmt_f64, Law, MomentError, MomentReport};
use crate::report::{self, Format, Meta, Table};
use crate::rng::derive_seed;

/// Environment variable supplying the seed when `--seed` is absent.
pub const SEED_ENV: &str = "MLD_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::Degenerate { .. } => Self::Runtime(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::ZeroSpread(_) => Self::Runtime(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Estimator(e) => e.into(),
            HarnessError::Baseline(e) => e.into(),
            HarnessError::InvalidSpec(_) | HarnessError::TooFewPoints(_) => Self::Usage(e.to_string()),
            HarnessError::TooManyDegenerate { .. } => Self::Runtime(e.to_string()),
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::Quadrature(_) | MomentError::Divergent { .. } | MomentError::Distribution(_) => {
                Self::Runtime(e.to_string())
            }
            _ => Self::Usage(e.to_string()),
        }
    }
}

/// Worker thread count; never changes numeric output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Self::Count(n)),
            _ => Err(format!("expected a positive count or `auto`, got {s:?}")),
        }
    }
}

/// `lo:hi:count` or a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaList(pub Vec<f64>);

impl FromStr for AlphaList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            let g: GridSpec = s.parse().map_err(|e: HarnessError| e.to_string())?;
            return Ok(Self(linspace(g.lo, g.hi, g.count)));
        }
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad alpha {p:?}")))
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mld,
    Knn,
    Scott,
    Iqr,
    Kde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    Quad,
    Mc,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "mld", version, about = "Minimum local distance density estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Master seed (falls back to $MLD_SEED, then to a random seed that is
    /// recorded in the output)
    #[arg(long, global = true, env = SEED_ENV)]
    pub seed: Option<u64>,

    /// Worker threads: a positive count or `auto`
    #[arg(long, global = true, default_value = "auto")]
    pub threads: Threads,

    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    pub format: String,

    /// Output file (standard output when absent)
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a density on a grid or at chosen points
    Estimate(EstimateArgs),
    /// Scaled moments of the sample minimum and their limits
    Moments(MomentsArgs),
    /// Monte Carlo convergence experiments
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// Distribution to sample from, e.g. `cauchy:0,1`
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub dist: Option<Distribution>,
    /// Sample size when sampling from --dist
    #[arg(long, requires = "dist")]
    pub n: Option<usize>,
    /// File with one observation per line (`#` starts a comment)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Evaluation grid `lo:hi:count`
    #[arg(long, allow_hyphen_values = true, conflicts_with = "points")]
    pub grid: Option<String>,
    /// Comma-separated evaluation points (sorted before use)
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub points: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub alpha: f64,
    /// Re-estimate low-density points with a larger alpha
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, value_enum, default_value = "mld")]
    pub estimator: Estimator,
    /// Neighbour count for knn (default round(sqrt(N)))
    #[arg(long)]
    pub k: Option<usize>,
    /// Kernel bandwidth for kde (default Silverman's rule)
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    /// Distribution, e.g. `exp:1`
    #[arg(long)]
    pub dist: Distribution,
    /// Ascending sample sizes
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<u64>,
    #[arg(long, value_enum, default_value = "quad")]
    pub method: MomentMethod,
    /// Study |X - x*| instead of X
    #[arg(long, allow_hyphen_values = true)]
    pub fold_at: Option<f64>,
    /// Monte Carlo trials per N
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(long, value_parser = ["pointwise", "imse", "profile", "alpha-sweep", "adaptive"])]
    pub mode: String,
    #[arg(long)]
    pub dist: Distribution,
    /// Single sample size (profile, alpha-sweep, adaptive)
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Ascending sample sizes (pointwise, imse)
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long, conflicts_with = "alphas")]
    pub alpha: Option<f64>,
    /// `lo:hi:count` or a comma-separated list
    #[arg(long)]
    pub alphas: Option<String>,
    #[arg(long, default_value_t = ExperimentSpec::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Evaluation grid `lo:hi:count` (default depends on the distribution)
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Evaluation point of the pointwise mode
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<f64>,
    /// Comma-separated estimators: mld, adaptive-mld, knn, scott, iqr, kde
    #[arg(long, value_delimiter = ',', default_value = "mld")]
    pub estimators: Vec<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

/// A finished command: the file contents and an optional line for stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub summary: Option<String>,
}

/// Reads one number per line; blank lines and `#` comments are skipped.
pub fn read_sample_file(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    parse_sample(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_sample(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let v: f64 = content.parse().map_err(|_| format!("line {}: not a number: {content:?}", i + 1))?;
        if !v.is_finite() {
            return Err(format!("line {}: non-finite value", i + 1));
        }
        values.push(v);
    }
    Ok(values)
}

fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    s.parse().map_err(|e: HarnessError| CliError::Usage(e.to_string()))
}

fn estimate(args: &EstimateArgs, seed: u64, format: Format) -> Result<Output, CliError> {
    let (sample, source) = match (&args.dist, &args.input) {
        (Some(d), None) => {
            let n = args.n.ok_or_else(|| CliError::Usage("--n is required with --dist".into()))?;
            (d.sample(n, seed, 0).values, json!({ "dist": d.to_string(), "n": n }))
        }
        (None, Some(path)) => (read_sample_file(path)?, json!({ "input": path.display().to_string() })),
        _ => return Err(CliError::Usage("exactly one of --dist and --input is required".into())),
    };
    if sample.len() < 2 {
        return Err(EstimatorError::InsufficientSample { needed: 2, got: sample.len() }.into());
    }
    let grid = match (&args.grid, &args.points) {
        (Some(g), _) => parse_grid(g)?.points(),
        (None, Some(p)) => {
            let mut p = p.clone();
            if p.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Usage("evaluation points must be finite".into()));
            }
            p.sort_by(f64::total_cmp);
            p.dedup();
            p
        }
        (None, None) => match &args.dist {
            Some(d) => GridSpec::default_for(d).points(),
            None => {
                let lo = sample.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = sample.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo < hi {
                    linspace(lo, hi, GridSpec::DEFAULT_COUNT)
                } else {
                    vec![lo]
                }
            }
        },
    };

    let partition_seed = derive_seed(&[seed, 1]);
    let curve: DensityCurve = match args.estimator {
        Estimator::Mld => {
            let cfg = MldConfig::new(args.alpha, partition_seed)?;
            if args.adaptive {
                let adaptive = AdaptiveConfig { pilot_alpha: args.alpha, ..AdaptiveConfig::default() };
                estimators::adaptive_estimate(&sample, &grid, &cfg, &adaptive)?
            } else {
                estimators::estimate_grid(&sample, &grid, &cfg)?
            }
        }
        Estimator::Knn => {
            let k = args.k.unwrap_or_else(|| baselines::default_k(sample.len()));
            baselines::knn_estimate(&sample, &grid, k)?
        }
        Estimator::Scott => baselines::scott_histogram(&sample)?.evaluate(&grid),
        Estimator::Iqr => baselines::iqr_histogram(&sample)?.evaluate(&grid),
        Estimator::Kde => {
            let bw = args.bandwidth.map(Bandwidth::Fixed).unwrap_or(Bandwidth::Silverman);
            baselines::kde_gaussian(&sample, &grid, bw)?
        }
    };
    if curve.degenerate_count() == curve.len() {
        return Err(CliError::Runtime("every evaluation point is degenerate".into()));
    }

    let rows = (0..curve.len())
        .map(|i| {
            vec![
                fmt_f64(curve.grid[i]),
                fmt_f64(curve.values[i]),
                fmt_f64(curve.inverse_values[i]),
                curve.degenerate[i].to_string(),
            ]
        })
        .collect();
    let table = Table::new(["x", "density", "inverse_scaled", "degenerate"], rows);
    let config = json!({
        "source": source,
        "sample_size": sample.len(),
        "estimator": args.estimator,
        "alpha": args.alpha,
        "adaptive": args.adaptive,
        "k": args.k,
        "bandwidth": args.bandwidth,
        "grid_points": grid.len(),
        "info": curve.info,
    });
    Ok(Output { text: report::render(&Meta::new("estimate", seed, config), &table, format), summary: None })
}

fn moments_cmd(args: &MomentsArgs, seed: u64, format: Format) -> Result<Output, CliError> {
    let law = match args.fold_at {
        Some(c) => Law::folded(args.dist.clone(), c)?,
        None => Law::raw(args.dist.clone())?,
    };
    if args.n_list.is_empty() || args.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MomentError::BadNList.into());
    }
    let mut reports: Vec<MomentReport> = Vec::new();
    for &n in &args.n_list {
        if matches!(args.method, MomentMethod::Quad | MomentMethod::Both) {
            reports.push(moments::quadrature_report(&law, n)?);
        }
        if matches!(args.method, MomentMethod::Mc | MomentMethod::Both) {
            let mc_seed = derive_seed(&[seed, n]);
            reports.push(moments::mc_order_stat_moments(&law, n, args.trials, mc_seed)?);
        }
    }
    let table = Table::new(MomentReport::CSV_HEADER, reports.iter().map(MomentReport::csv_fields).collect());
    let config = json!({
        "law": law,
        "n_list": args.n_list,
        "method": args.method,
        "trials": args.trials,
        "rtol": moments::DEFAULT_RTOL,
    });
    Ok(Output { text: report::render(&Meta::new("moments", seed, config), &table, format), summary: None })
}

fn experiment_cmd(args: &ExperimentArgs, seed: u64, format: Format) -> Result<Output, CliError> {
    let usage = |m: String| CliError::Usage(m);
    let mode: Mode = args.mode.parse()?;
    let n_list = match (&args.n, &args.n_list) {
        (Some(n), None) => vec![*n],
        (None, Some(list)) => list.clone(),
        _ => return Err(usage("one of --n and --n-list is required".into())),
    };
    let alphas = match (&args.alpha, &args.alphas) {
        (Some(a), None) => vec![*a],
        (None, Some(s)) => s.parse::<AlphaList>().map_err(usage)?.0,
        (None, None) => vec![1.0 / 3.0],
        _ => unreachable!("clap rejects --alpha with --alphas"),
    };
    let estimators = args.estimators.iter().map(|e| e.parse()).collect::<Result<Vec<EstimatorKind>, _>>()?;
    let mut spec = ExperimentSpec::new(args.dist.clone(), n_list, seed)
        .with_trials(args.trials)
        .with_alphas(alphas)
        .with_estimators(estimators);
    if let Some(g) = &args.grid {
        spec.grid = parse_grid(g)?;
    }
    spec.point = args.point;
    spec.k = args.k;
    spec.bandwidth = args.bandwidth;

    let report = harness::run(mode, &spec)?;
    let table = Table::new(report.csv_header(), report.csv_rows());
    let config = json!({ "mode": mode.name(), "spec": spec, "summary": report.summary });
    Ok(Output {
        text: report::render(&Meta::new("experiment", seed, config), &table, format),
        summary: Some(format!("{}: {}", mode.name(), report.summary_line())),
    })
}

/// Runs a parsed command line on the configured thread pool.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let seed = cli.seed.unwrap_or_else(rand::random);
    let format: Format = cli.format.parse().map_err(CliError::Usage)?;
    let threads = match cli.threads {
        Threads::Auto => 0,
        Threads::Count(n) => n,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Estimate(a) => estimate(a, seed, format),
        Command::Moments(a) => moments_cmd(a, seed, format),
        Command::Experiment(a) => experiment_cmd(a, seed, format),
    })
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|out| {
        match &cli.output {
            Some(path) => {
                fs::write(path, &out.text)
                    .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
                if let Some(s) = &out.summary {
                    println!("{s}");
                }
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(out.text.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))?;
                if let Some(s) = &out.summary {
                    eprintln!("{s}");
                }
            }
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mld: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<Output, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("mld").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn sample_file_format() {
        let v = parse_sample("# header\n1.5\n\n  -2 # trailing\n3e-1\n").unwrap();
        assert_eq!(v, vec![1.5, -2.0, 0.3]);
        assert!(parse_sample("1\nabc\n").unwrap_err().contains("line 2"));
        assert!(parse_sample("inf\n").is_err());
    }

    #[test]
    fn threads_and_alphas_parse() {
        assert_eq!("auto".parse::<Threads>().unwrap(), Threads::Auto);
        assert_eq!("8".parse::<Threads>().unwrap(), Threads::Count(8));
        assert!("0".parse::<Threads>().is_err());
        assert_eq!("0.1:0.3:3".parse::<AlphaList>().unwrap().0.len(), 3);
        assert_eq!("0.2,0.4".parse::<AlphaList>().unwrap().0, vec![0.2, 0.4]);
    }

    #[test]
    fn estimate_grid_rows() {
        let out = run(&["estimate", "--dist", "cauchy:0,1", "--n", "125", "--grid", "-10:10:256", "--seed", "7"]).unwrap();
        let (header, rows) = report::parse_csv_rows(&out.text);
        assert_eq!(header, ["x", "density", "inverse_scaled", "degenerate"]);
        assert_eq!(rows.len(), 256);
    }

    #[test]
    fn zero_sample_is_a_usage_error() {
        let err = run(&["estimate", "--dist", "beta:1,4", "--n", "0", "--points", "0.5", "--seed", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("insufficient sample"));
    }

    #[test]
    fn raw_law_must_be_nonnegative() {
        let err = run(&["moments", "--dist", "gauss:0,1", "--n-list", "10", "--seed", "1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn uniform_moments_rows() {
        let out = run(&["moments", "--dist", "uniform:0,1", "--n-list", "10,100", "--method", "quad", "--seed", "1"]).unwrap();
        let (_, rows) = report::parse_csv_rows(&out.text);
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn experiment_summary() {
        let out = run(&[
            "experiment", "--mode", "alpha-sweep", "--dist", "beta:1,4", "--n", "200", "--alphas", "0.2:0.6:3",
            "--trials", "4", "--grid", "0:1:9", "--seed", "3",
        ])
        .unwrap();
        assert!(out.summary.unwrap().starts_with("alpha-sweep: argmin alpha="));
        assert_eq!(report::parse_csv_rows(&out.text).1.len(), 3);
    }
}
