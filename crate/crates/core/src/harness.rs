//! Monte Carlo experiments: pointwise and integrated MSE convergence,
//! bias/variance profiles, alpha sweeps and the adaptive comparison.
//!
//! Every trial of a cell draws its sample from stream `trial` of a seed
//! derived from `(experiment seed, N)`, so all estimators and alphas at the
//! same `N` see the same samples. Partition seeds are derived from
//! `(experiment seed, N, alpha, estimator, trial)`. Trials run in parallel
//! and are reduced in trial order, so reports do not depend on the number
//! of worker threads.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{self, BaselineError, Bandwidth};
use crate::curve::linspace;
use crate::distributions::{Distribution, Kind};
use crate::estimators::{self, AdaptiveConfig, EstimatorError, MldConfig, Scaling};
use crate::moments::fmt_f64;
use crate::rng::derive_seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("{estimator} at N = {n}: {excluded} of {total} estimates degenerate ({:.2}%)", 100.0 * *excluded as f64 / *total as f64)]
    TooManyDegenerate { n: usize, estimator: EstimatorKind, excluded: usize, total: usize },
    #[error("slope fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
}

/// Degenerate estimates must stay below this fraction from this sample size on.
pub const DEGENERATE_CHECK_FROM: usize = 125;
pub const MAX_DEGENERATE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Mld,
    AdaptiveMld,
    Knn,
    Scott,
    Iqr,
    Kde,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mld => "mld",
            Self::AdaptiveMld => "adaptive-mld",
            Self::Knn => "knn",
            Self::Scott => "scott",
            Self::Iqr => "iqr",
            Self::Kde => "kde",
        }
    }

    pub fn uses_alpha(&self) -> bool {
        matches!(self, Self::Mld | Self::AdaptiveMld)
    }

    fn id(&self) -> u64 {
        *self as u64
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "mld" => Self::Mld,
            "adaptive-mld" | "adaptive" => Self::AdaptiveMld,
            "knn" => Self::Knn,
            "scott" => Self::Scott,
            "iqr" => Self::Iqr,
            "kde" => Self::Kde,
            other => return Err(HarnessError::InvalidSpec(format!("unknown estimator {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Pointwise,
    Imse,
    Profile,
    AlphaSweep,
    Adaptive,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::Imse => "imse",
            Self::Profile => "profile",
            Self::AlphaSweep => "alpha-sweep",
            Self::Adaptive => "adaptive",
        }
    }
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "pointwise" => Self::Pointwise,
            "imse" => Self::Imse,
            "profile" => Self::Profile,
            "alpha-sweep" => Self::AlphaSweep,
            "adaptive" => Self::Adaptive,
            other => return Err(HarnessError::InvalidSpec(format!("unknown mode {other:?}"))),
        })
    }
}

/// Evaluation interval and point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub const DEFAULT_COUNT: usize = 256;

    /// The interval experiments use for `dist` when none is given.
    pub fn default_for(dist: &Distribution) -> Self {
        let (lo, hi) = match dist.kind() {
            Kind::Uniform { a, b } => (*a, *b),
            Kind::Beta { .. } => (0.0, 1.0),
            Kind::Exponential { rate } => (0.0, 10.0 / rate),
            Kind::Gaussian { mean, sd } => (mean - 4.0 * sd, mean + 4.0 * sd),
            Kind::Cauchy { location, scale } => (location - 20.0 * scale, location + 20.0 * scale),
            Kind::GaussianMixture(_) => (-3.0, 3.0),
        };
        Self { lo, hi, count: Self::DEFAULT_COUNT }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = HarnessError;

    /// `lo:hi:count`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::InvalidSpec(format!("grid must be lo:hi:count, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let grid = Self { lo, hi, count };
        grid.validate()?;
        Ok(grid)
    }
}

impl GridSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(HarnessError::InvalidSpec(format!("grid needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.count < 2 {
            return Err(HarnessError::InvalidSpec("grid needs at least 2 points".into()));
        }
        Ok(())
    }
}

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub distribution: Distribution,
    pub estimators: Vec<EstimatorKind>,
    pub n_list: Vec<usize>,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub grid: GridSpec,
    /// Evaluation point of the pointwise mode.
    pub point: Option<f64>,
    pub seed: u64,
    /// Neighbour count for `knn`; `round(sqrt(N))` when absent.
    pub k: Option<usize>,
    /// Fixed `kde` bandwidth; Silverman's rule when absent.
    pub bandwidth: Option<f64>,
    pub scaling: Scaling,
}

impl ExperimentSpec {
    pub const DEFAULT_TRIALS: usize = 1000;

    /// MLD with alpha 1/3 over the default grid of `distribution`.
    pub fn new(distribution: Distribution, n_list: Vec<usize>, seed: u64) -> Self {
        let grid = GridSpec::default_for(&distribution);
        Self {
            distribution,
            estimators: vec![EstimatorKind::Mld],
            n_list,
            alphas: vec![1.0 / 3.0],
            trials: Self::DEFAULT_TRIALS,
            grid,
            point: None,
            seed,
            k: None,
            bandwidth: None,
            scaling: Scaling::default(),
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_alphas(mut self, alphas: Vec<f64>) -> Self {
        self.alphas = alphas;
        self
    }

    pub fn with_estimators(mut self, estimators: Vec<EstimatorKind>) -> Self {
        self.estimators = estimators;
        self
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_point(mut self, x: f64) -> Self {
        self.point = Some(x);
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.trials < 2 {
            return invalid(format!("at least 2 trials are required, got {}", self.trials));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("N list must be non-empty and strictly ascending".into());
        }
        if self.n_list[0] < 2 {
            return invalid(format!("insufficient sample: N must be at least 2, got {}", self.n_list[0]));
        }
        if self.estimators.is_empty() {
            return invalid("no estimator selected".into());
        }
        if self.alphas.is_empty() {
            return invalid("no alpha selected".into());
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                return invalid(format!("alpha must lie in (0, 1), got {a}"));
            }
        }
        if let Some(k) = self.k {
            if k == 0 {
                return invalid("k must be positive".into());
            }
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return invalid(format!("bandwidth must be positive, got {h}"));
            }
        }
        self.grid.validate()
    }

    fn sample_seed(&self, n: usize) -> u64 {
        derive_seed(&[self.seed, n as u64])
    }

    fn estimator_seed(&self, n: usize, alpha: f64, kind: EstimatorKind, trial: usize) -> u64 {
        derive_seed(&[self.seed, n as u64, alpha.to_bits(), kind.id(), trial as u64])
    }

    /// `(estimator, alpha)` pairs; alpha is `None` for estimators without one.
    fn combos(&self) -> Vec<(EstimatorKind, Option<f64>)> {
        let mut out = Vec::new();
        for &e in &self.estimators {
            if e.uses_alpha() {
                out.extend(self.alphas.iter().map(|&a| (e, Some(a))));
            } else {
                out.push((e, None));
            }
        }
        out
    }
}

/// Trial statistics at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointStats {
    pub x: f64,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    /// Population variance over the used trials.
    pub variance: f64,
    pub mse: f64,
    /// Standard error of the mean estimate.
    pub stderr: f64,
    /// Standard error of `mse`.
    pub se_mse: f64,
    /// Mean absolute error.
    pub mae: f64,
    pub used: usize,
    pub excluded: usize,
}

/// One `(N, alpha, estimator)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub n: usize,
    pub alpha: Option<f64>,
    pub estimator: EstimatorKind,
    pub trials: usize,
    pub sample_seed: u64,
    pub points: Vec<PointStats>,
    /// Trapezoid integral of the pointwise MSE (the MSE itself for a single point).
    pub imse: f64,
    /// Standard error of `imse`, from the spread of per-trial integrated errors.
    pub se_imse: f64,
    pub excluded: usize,
}

/// Least-squares line through `(log N, log error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Summary {
    Slopes { fits: Vec<(EstimatorKind, Option<f64>, SlopeFit)> },
    Argmin { alpha: f64, imse: f64 },
    Adaptive(AdaptiveSummary),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptiveSummary {
    /// Mean absolute error over the outer 20% of grid points.
    pub tail_mae_plain: f64,
    pub tail_mae_adaptive: f64,
    /// Mean absolute error over the (trial, point) pairs the pilot left unflagged.
    pub unflagged_mae_plain: f64,
    pub unflagged_mae_adaptive: f64,
    /// Average number of re-estimated grid points per trial.
    pub mean_flagged: f64,
}

impl AdaptiveSummary {
    pub fn tail_reduction(&self) -> f64 {
        1.0 - self.tail_mae_adaptive / self.tail_mae_plain
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub spec: ExperimentSpec,
    pub cells: Vec<Cell>,
    pub summary: Summary,
    /// Not part of any data file.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn cell(&self, n: usize, estimator: EstimatorKind, alpha: Option<f64>) -> Option<&Cell> {
        self.cells.iter().find(|c| c.n == n && c.estimator == estimator && c.alpha == alpha)
    }

    /// True when rows are per grid point rather than per cell.
    pub fn is_grid_mode(&self) -> bool {
        matches!(self.mode, Mode::Profile | Mode::Adaptive)
    }

    pub fn csv_header(&self) -> Vec<&'static str> {
        match self.mode {
            Mode::Pointwise => vec!["N", "alpha", "estimator", "mse", "se_mse", "trials", "excluded"],
            Mode::Imse | Mode::AlphaSweep => vec!["N", "alpha", "estimator", "imse", "se_imse", "trials", "excluded"],
            Mode::Profile | Mode::Adaptive => vec![
                "N", "alpha", "estimator", "mse", "se_mse", "trials", "excluded", "grid_index", "x", "mean", "bias",
                "stderr", "mae",
            ],
        }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for c in &self.cells {
            let alpha = c.alpha.map(fmt_f64).unwrap_or_default();
            let head = |mse: f64, se: f64, excluded: usize| {
                vec![
                    c.n.to_string(),
                    alpha.clone(),
                    c.estimator.name().to_string(),
                    fmt_f64(mse),
                    fmt_f64(se),
                    c.trials.to_string(),
                    excluded.to_string(),
                ]
            };
            if self.is_grid_mode() {
                for (i, p) in c.points.iter().enumerate() {
                    let mut row = head(p.mse, p.se_mse, p.excluded);
                    row.extend([i.to_string(), fmt_f64(p.x), fmt_f64(p.mean), fmt_f64(p.bias), fmt_f64(p.stderr), fmt_f64(p.mae)]);
                    rows.push(row);
                }
            } else {
                rows.push(head(c.imse, c.se_imse, c.excluded));
            }
        }
        rows
    }

    /// One-line human summary (slopes, argmin, tail reduction).
    pub fn summary_line(&self) -> String {
        match &self.summary {
            Summary::Slopes { fits } if !fits.is_empty() => fits
                .iter()
                .map(|(e, a, f)| {
                    let alpha = a.map(|a| format!(" alpha={a:.4}")).unwrap_or_default();
                    format!("{e}{alpha}: slope={:.4} r2={:.4}", f.slope, f.r2)
                })
                .collect::<Vec<_>>()
                .join("; "),
            Summary::Argmin { alpha, imse } => format!("argmin alpha={alpha:.4} imse={imse:.6e}"),
            Summary::Adaptive(s) => format!(
                "tail mae plain={:.6e} adaptive={:.6e} reduction={:.1}%; unflagged mae plain={:.6e} adaptive={:.6e}",
                s.tail_mae_plain,
                s.tail_mae_adaptive,
                100.0 * s.tail_reduction(),
                s.unflagged_mae_plain,
                s.unflagged_mae_adaptive
            ),
            _ => {
                let excluded: usize = self.cells.iter().map(|c| c.excluded).sum();
                format!("{} cells, {excluded} excluded estimates", self.cells.len())
            }
        }
    }
}

/// Ordinary least squares of `ys` on `xs`.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, HarnessError> {
    let n = xs.len().min(ys.len());
    if n < 3 || xs.len() != ys.len() {
        return Err(HarnessError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::InvalidSpec("slope fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(SlopeFit { slope, intercept, r2 })
}

/// Trapezoid rule over an ascending grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

// One trial of one estimator on a grid; degenerate points come back non-finite.
fn run_estimator(
    spec: &ExperimentSpec,
    kind: EstimatorKind,
    alpha: f64,
    sample: &[f64],
    grid: &[f64],
    seed: u64,
) -> Result<Vec<f64>, HarnessError> {
    let curve = match kind {
        EstimatorKind::Mld => {
            let cfg = MldConfig::new(alpha, seed)?.with_scaling(spec.scaling);
            estimators::estimate_grid(sample, grid, &cfg)?
        }
        EstimatorKind::AdaptiveMld => {
            let cfg = MldConfig::new(alpha, seed)?.with_scaling(spec.scaling);
            let adaptive = AdaptiveConfig { pilot_alpha: alpha, ..AdaptiveConfig::default() };
            estimators::adaptive_estimate(sample, grid, &cfg, &adaptive)?
        }
        EstimatorKind::Knn => {
            let k = spec.k.unwrap_or_else(|| baselines::default_k(sample.len()));
            baselines::knn_estimate(sample, grid, k)?
        }
        EstimatorKind::Scott => baselines::scott_histogram(sample)?.evaluate(grid),
        EstimatorKind::Iqr => baselines::iqr_histogram(sample)?.evaluate(grid),
        EstimatorKind::Kde => {
            let bw = spec.bandwidth.map(Bandwidth::Fixed).unwrap_or(Bandwidth::Silverman);
            baselines::kde_gaussian(sample, grid, bw)?
        }
    };
    let mut values = curve.values;
    for (v, &d) in values.iter_mut().zip(&curve.degenerate) {
        if d {
            *v = f64::INFINITY;
        }
    }
    Ok(values)
}

// Reduces per-trial estimates (in trial order) to pointwise statistics.
fn reduce(grid: &[f64], truth: &[f64], per_trial: &[Vec<f64>]) -> (Vec<PointStats>, f64, f64, usize) {
    let mut points = Vec::with_capacity(grid.len());
    for (j, (&x, &f)) in grid.iter().zip(truth).enumerate() {
        let used: Vec<f64> = per_trial.iter().map(|v| v[j]).filter(|v| v.is_finite()).collect();
        let excluded = per_trial.len() - used.len();
        let t = used.len() as f64;
        let (mean, variance, mse, stderr, se_mse, mae) = if used.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = used.iter().sum::<f64>() / t;
            let ss: f64 = used.iter().map(|v| (v - mean).powi(2)).sum();
            let sq: Vec<f64> = used.iter().map(|v| (v - f).powi(2)).collect();
            let mse = sq.iter().sum::<f64>() / t;
            let mae = used.iter().map(|v| (v - f).abs()).sum::<f64>() / t;
            let (stderr, se_mse) = if used.len() > 1 {
                let sd_sq = (sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (t - 1.0)).sqrt();
                ((ss / (t - 1.0) / t).sqrt(), sd_sq / t.sqrt())
            } else {
                (f64::NAN, f64::NAN)
            };
            (mean, ss / t, mse, stderr, se_mse, mae)
        };
        points.push(PointStats { x, truth: f, mean, bias: mean - f, variance, mse, stderr, se_mse, mae, used: used.len(), excluded });
    }
    let excluded = points.iter().map(|p| p.excluded).sum();
    if grid.len() == 1 {
        let p = points[0];
        return (points, p.mse, p.se_mse, excluded);
    }
    let mse: Vec<f64> = points.iter().map(|p| p.mse).collect();
    let imse = trapezoid(grid, &mse);
    // per-trial integrated squared error, skipping that trial's degenerate points
    let ise: Vec<f64> = per_trial
        .iter()
        .map(|v| {
            let sq: Vec<f64> =
                v.iter().zip(truth).map(|(e, f)| if e.is_finite() { (e - f).powi(2) } else { 0.0 }).collect();
            trapezoid(grid, &sq)
        })
        .collect();
    let t = ise.len() as f64;
    let mean = ise.iter().sum::<f64>() / t;
    let se = (ise.iter().map(|i| (i - mean).powi(2)).sum::<f64>() / (t - 1.0) / t).sqrt();
    (points, imse, se, excluded)
}

fn check_degenerate(n: usize, kind: EstimatorKind, excluded: usize, total: usize) -> Result<(), HarnessError> {
    if n >= DEGENERATE_CHECK_FROM && excluded as f64 >= MAX_DEGENERATE_FRACTION * total as f64 && excluded > 0 {
        return Err(HarnessError::TooManyDegenerate { n, estimator: kind, excluded, total });
    }
    Ok(())
}

fn run_cell(
    spec: &ExperimentSpec,
    n: usize,
    kind: EstimatorKind,
    alpha: Option<f64>,
    grid: &[f64],
) -> Result<Cell, HarnessError> {
    let truth: Vec<f64> = grid.iter().map(|&x| spec.distribution.pdf(x)).collect();
    let sample_seed = spec.sample_seed(n);
    let a = alpha.unwrap_or(f64::NAN);
    let per_trial: Vec<Vec<f64>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let sample = spec.distribution.sample(n, sample_seed, t as u64);
            run_estimator(spec, kind, a, sample.as_slice(), grid, spec.estimator_seed(n, a, kind, t))
        })
        .collect::<Result<_, _>>()?;
    let (points, imse, se_imse, excluded) = reduce(grid, &truth, &per_trial);
    check_degenerate(n, kind, excluded, per_trial.len() * grid.len())?;
    Ok(Cell { n, alpha, estimator: kind, trials: spec.trials, sample_seed, points, imse, se_imse, excluded })
}

fn slopes(spec: &ExperimentSpec, cells: &[Cell]) -> Summary {
    let mut fits = Vec::new();
    for (e, a) in spec.combos() {
        let (xs, ys): (Vec<f64>, Vec<f64>) = cells
            .iter()
            .filter(|c| c.estimator == e && c.alpha == a && c.imse > 0.0)
            .map(|c| ((c.n as f64).ln(), c.imse.ln()))
            .unzip();
        if let Ok(fit) = slope_fit(&xs, &ys) {
            fits.push((e, a, fit));
        }
    }
    Summary::Slopes { fits }
}

fn grid_cells(spec: &ExperimentSpec, grid: &[f64]) -> Result<Vec<Cell>, HarnessError> {
    let mut cells = Vec::new();
    for &n in &spec.n_list {
        for (e, a) in spec.combos() {
            cells.push(run_cell(spec, n, e, a, grid)?);
        }
    }
    Ok(cells)
}

/// MSE at `spec.point` for every `(N, alpha, estimator)`.
pub fn pointwise_mse_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let x = spec.point.ok_or_else(|| HarnessError::InvalidSpec("pointwise mode needs a point".into()))?;
    let start = Instant::now();
    let cells = grid_cells(spec, &[x])?;
    let summary = slopes(spec, &cells);
    Ok(ExperimentReport { mode: Mode::Pointwise, spec: spec.clone(), cells, summary, wall_clock_seconds: start.elapsed().as_secs_f64() })
}

/// Integrated MSE over the grid for every `(N, alpha, estimator)`.
pub fn imse_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let start = Instant::now();
    let cells = grid_cells(spec, &spec.grid.points())?;
    let summary = slopes(spec, &cells);
    Ok(ExperimentReport { mode: Mode::Imse, spec: spec.clone(), cells, summary, wall_clock_seconds: start.elapsed().as_secs_f64() })
}

/// Pointwise mean, bias and standard error over the grid at a single `N`
/// and alpha.
pub fn bias_variance_profile(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    if spec.n_list.len() != 1 || spec.alphas.len() != 1 {
        return Err(HarnessError::InvalidSpec("profile mode takes a single N and a single alpha".into()));
    }
    let start = Instant::now();
    let cells = grid_cells(spec, &spec.grid.points())?;
    Ok(ExperimentReport { mode: Mode::Profile, spec: spec.clone(), cells, summary: Summary::None, wall_clock_seconds: start.elapsed().as_secs_f64() })
}

/// MLD integrated MSE as a function of alpha at a single `N`.
pub fn alpha_sweep(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    if spec.n_list.len() != 1 {
        return Err(HarnessError::InvalidSpec("alpha sweep takes a single N".into()));
    }
    if spec.alphas.len() < 2 || spec.alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::InvalidSpec("alpha sweep needs at least 2 ascending alphas".into()));
    }
    let start = Instant::now();
    let spec = ExperimentSpec { estimators: vec![EstimatorKind::Mld], ..spec.clone() };
    let cells = grid_cells(&spec, &spec.grid.points())?;
    let best = cells
        .iter()
        .filter(|c| c.imse.is_finite())
        .min_by(|a, b| a.imse.total_cmp(&b.imse))
        .expect("at least two cells");
    let summary = Summary::Argmin { alpha: best.alpha.unwrap_or(f64::NAN), imse: best.imse };
    Ok(ExperimentReport { mode: Mode::AlphaSweep, spec, cells, summary, wall_clock_seconds: start.elapsed().as_secs_f64() })
}

/// Indices of the outer `fraction` of grid points, half on each side.
pub fn tail_indices(count: usize, fraction: f64) -> Vec<usize> {
    let per_side = ((count as f64 * fraction / 2.0).round() as usize).min(count / 2);
    (0..per_side).chain(count - per_side..count).collect()
}

/// Plain MLD against the adaptive procedure on the same samples and the same
/// pilot partition, at a single `N` with the pilot alpha `spec.alphas[0]`.
pub fn adaptive_comparison(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    if spec.n_list.len() != 1 || spec.alphas.len() != 1 {
        return Err(HarnessError::InvalidSpec("adaptive mode takes a single N and a single alpha".into()));
    }
    let start = Instant::now();
    let n = spec.n_list[0];
    let alpha = spec.alphas[0];
    let grid = spec.grid.points();
    let truth: Vec<f64> = grid.iter().map(|&x| spec.distribution.pdf(x)).collect();
    let sample_seed = spec.sample_seed(n);
    let adaptive = AdaptiveConfig { pilot_alpha: alpha, ..AdaptiveConfig::default() };

    type Trial = (Vec<f64>, Vec<f64>, Vec<bool>);
    let per_trial: Vec<Trial> = (0..spec.trials)
        .into_par_iter()
        .map(|t| -> Result<Trial, HarnessError> {
            let sample = spec.distribution.sample(n, sample_seed, t as u64);
            let cfg = MldConfig::new(alpha, spec.estimator_seed(n, alpha, EstimatorKind::AdaptiveMld, t))?
                .with_scaling(spec.scaling);
            let plain = estimators::estimate_grid(sample.as_slice(), &grid, &cfg)?;
            let refined = estimators::adaptive_estimate(sample.as_slice(), &grid, &cfg, &adaptive)?;
            let finite = |c: &crate::curve::DensityCurve| -> Vec<f64> {
                c.values.iter().zip(&c.degenerate).map(|(&v, &d)| if d { f64::INFINITY } else { v }).collect()
            };
            Ok((finite(&plain), finite(&refined), refined.refined))
        })
        .collect::<Result<_, _>>()?;

    let plain: Vec<Vec<f64>> = per_trial.iter().map(|t| t.0.clone()).collect();
    let adapt: Vec<Vec<f64>> = per_trial.iter().map(|t| t.1.clone()).collect();
    let mut cells = Vec::new();
    for (kind, values) in [(EstimatorKind::Mld, &plain), (EstimatorKind::AdaptiveMld, &adapt)] {
        let (points, imse, se_imse, excluded) = reduce(&grid, &truth, values);
        check_degenerate(n, kind, excluded, values.len() * grid.len())?;
        cells.push(Cell { n, alpha: Some(alpha), estimator: kind, trials: spec.trials, sample_seed, points, imse, se_imse, excluded });
    }

    let tails = tail_indices(grid.len(), 0.2);
    let tail_mae = |c: &Cell| tails.iter().map(|&i| c.points[i].mae).sum::<f64>() / tails.len() as f64;
    let (mut sum_p, mut sum_a, mut count, mut flagged) = (0.0, 0.0, 0usize, 0usize);
    for (p, a, f) in &per_trial {
        for j in 0..grid.len() {
            if f[j] {
                flagged += 1;
            } else if p[j].is_finite() && a[j].is_finite() {
                sum_p += (p[j] - truth[j]).abs();
                sum_a += (a[j] - truth[j]).abs();
                count += 1;
            }
        }
    }
    let summary = Summary::Adaptive(AdaptiveSummary {
        tail_mae_plain: tail_mae(&cells[0]),
        tail_mae_adaptive: tail_mae(&cells[1]),
        unflagged_mae_plain: sum_p / count as f64,
        unflagged_mae_adaptive: sum_a / count as f64,
        mean_flagged: flagged as f64 / spec.trials as f64,
    });
    Ok(ExperimentReport { mode: Mode::Adaptive, spec: spec.clone(), cells, summary, wall_clock_seconds: start.elapsed().as_secs_f64() })
}

/// Dispatches on `mode`.
pub fn run(mode: Mode, spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    match mode {
        Mode::Pointwise => pointwise_mse_experiment(spec),
        Mode::Imse => imse_experiment(spec),
        Mode::Profile => bias_variance_profile(spec),
        Mode::AlphaSweep => alpha_sweep(spec),
        Mode::Adaptive => adaptive_comparison(spec),
    }
}
