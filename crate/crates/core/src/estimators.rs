//! The minimum local distance (MLD) density estimator.
//!
//! The sample is split at random into `m = round(N^(1-alpha))` disjoint
//! subsets. At a point `x` the distance from `x` to its nearest neighbour is
//! found in every subset; scaling each distance by the subset size plus one
//! and averaging gives an estimate of `1 / (2 f(x))`, whose reciprocal is the
//! density estimate.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{DensityCurve, EstimatorInfo};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("insufficient sample: need at least {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("sample contains a non-finite value at index {0}")]
    NonFiniteSample(usize),
    #[error("degenerate distance at x = {x}: every subset contains x")]
    Degenerate { x: f64 },
    #[error("evaluation grid is empty")]
    EmptyGrid,
    #[error("evaluation grid must be ascending (index {0})")]
    UnsortedGrid(usize),
}

/// How subset minima are scaled before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Each subset's distance is multiplied by its own size plus one.
    #[default]
    PerSubsetSize,
    /// The average distance is multiplied by `round(N / m) + 1`.
    UniformSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MldConfig {
    pub alpha: f64,
    pub seed: u64,
    pub scaling: Scaling,
}

impl Default for MldConfig {
    fn default() -> Self {
        Self { alpha: 1.0 / 3.0, seed: 0, scaling: Scaling::PerSubsetSize }
    }
}

impl MldConfig {
    pub fn new(alpha: f64, seed: u64) -> Result<Self, EstimatorError> {
        let cfg = Self { alpha, seed, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(EstimatorError::InvalidAlpha(self.alpha))
        }
    }

    /// `m_N = round(N^(1-alpha))`, kept within `[1, N]`.
    pub fn subset_count(&self, n: usize) -> usize {
        subset_count(self.alpha, n)
    }
}

fn subset_count(alpha: f64, n: usize) -> usize {
    let m = (n as f64).powf(1.0 - alpha).round() as usize;
    m.clamp(1, n.max(1))
}

/// Stream index used for the partition of a plain estimate; the adaptive
/// refinement draws its fresh partition from the next stream.
const PARTITION_STREAM: u64 = 0;
const REFINE_STREAM: u64 = 1;

/// A seeded split of a sample into sorted subsets whose sizes differ by at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    subsets: Vec<Vec<f64>>,
    source_size: usize,
    seed: u64,
    scaling: Scaling,
}

/// Shuffles `0..n` with the given stream and deals the indices round-robin
/// into `m` groups.
fn deal_indices(n: usize, m: usize, seed: u64, stream: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, stream));
    let mut groups: Vec<Vec<usize>> = (0..m).map(|_| Vec::with_capacity(n / m + 1)).collect();
    for (j, idx) in order.into_iter().enumerate() {
        groups[j % m].push(idx);
    }
    groups
}

fn check_sample(sample: &[f64]) -> Result<(), EstimatorError> {
    if sample.len() < 2 {
        return Err(EstimatorError::InsufficientSample { needed: 2, got: sample.len() });
    }
    match sample.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(EstimatorError::NonFiniteSample(i)),
        None => Ok(()),
    }
}

fn check_grid(grid: &[f64]) -> Result<(), EstimatorError> {
    if grid.is_empty() {
        return Err(EstimatorError::EmptyGrid);
    }
    match grid.windows(2).position(|w| !(w[0] <= w[1])) {
        Some(i) => Err(EstimatorError::UnsortedGrid(i + 1)),
        None => Ok(()),
    }
}

/// Splits `sample` into `m_N` sorted subsets using stream 0 of `cfg.seed`.
pub fn partition(sample: &[f64], cfg: &MldConfig) -> Result<Partition, EstimatorError> {
    partition_on_stream(sample, cfg.alpha, cfg, PARTITION_STREAM)
}

fn partition_on_stream(sample: &[f64], alpha: f64, cfg: &MldConfig, stream: u64) -> Result<Partition, EstimatorError> {
    check_sample(sample)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(EstimatorError::InvalidAlpha(alpha));
    }
    let n = sample.len();
    let m = subset_count(alpha, n);
    let subsets = deal_indices(n, m, cfg.seed, stream)
        .into_iter()
        .map(|idx| {
            let mut s: Vec<f64> = idx.into_iter().map(|i| sample[i]).collect();
            s.sort_by(f64::total_cmp);
            s
        })
        .collect();
    Ok(Partition { subsets, source_size: n, seed: cfg.seed, scaling: cfg.scaling })
}

/// Nearest distance from `x` to a sorted slice, counting binary-search probes.
fn nearest_distance(sorted: &[f64], x: f64, probes: &mut u64) -> f64 {
    let (mut lo, mut hi) = (0usize, sorted.len());
    while lo < hi {
        *probes += 1;
        let mid = lo + (hi - lo) / 2;
        if sorted[mid] < x {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let right = sorted.get(lo).map_or(f64::INFINITY, |&v| v - x);
    let left = if lo > 0 { x - sorted[lo - 1] } else { f64::INFINITY };
    left.min(right)
}

/// The distance function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    /// Average over subsets of the nearest distance to `x`.
    pub mean: f64,
    /// Size-scaled average, the estimate of `1 / (2 f(x))`.
    pub scaled: f64,
}

impl Partition {
    pub fn subsets(&self) -> &[Vec<f64>] {
        &self.subsets
    }

    pub fn subset_sizes(&self) -> Vec<usize> {
        self.subsets.iter().map(Vec::len).collect()
    }

    pub fn subset_count(&self) -> usize {
        self.subsets.len()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `s_N = round(N / m_N)`, at least 1.
    pub fn nominal_subset_size(&self) -> usize {
        ((self.source_size as f64 / self.subsets.len() as f64).round() as usize).max(1)
    }

    pub fn distance(&self, x: f64) -> Distance {
        self.distance_counted(x).0
    }

    /// Like [`Partition::distance`], also returning the number of
    /// binary-search probes spent.
    pub fn distance_counted(&self, x: f64) -> (Distance, u64) {
        let mut probes = 0;
        let m = self.subsets.len() as f64;
        let mut sum = 0.0;
        let mut weighted = 0.0;
        for s in &self.subsets {
            let d = nearest_distance(s, x, &mut probes);
            sum += d;
            weighted += (s.len() + 1) as f64 * d;
        }
        let mean = sum / m;
        let scaled = match self.scaling {
            Scaling::PerSubsetSize => weighted / m,
            Scaling::UniformSize => (self.nominal_subset_size() + 1) as f64 * mean,
        };
        (Distance { mean, scaled }, probes)
    }

    /// Density estimate `1 / (2 · scaled distance)` at `x`.
    pub fn estimate(&self, x: f64) -> Result<f64, EstimatorError> {
        let d = self.distance(x);
        if d.scaled > 0.0 {
            Ok(1.0 / (2.0 * d.scaled))
        } else {
            Err(EstimatorError::Degenerate { x })
        }
    }

    fn info(&self, alpha: f64) -> EstimatorInfo {
        EstimatorInfo::Mld {
            alpha,
            seed: self.seed,
            scaling: self.scaling,
            subsets: self.subset_count(),
            nominal_subset_size: self.nominal_subset_size(),
        }
    }

    fn inverse_on(&self, grid: &[f64]) -> Vec<f64> {
        grid.par_iter().map(|&x| self.distance(x).scaled).collect()
    }
}

/// Average nearest distance and its scaled form at `x`.
pub fn mld_distance(p: &Partition, x: f64) -> Distance {
    p.distance(x)
}

pub fn estimate_point(p: &Partition, x: f64) -> Result<f64, EstimatorError> {
    p.estimate(x)
}

/// Estimates the density at every grid point from a single partition.
///
/// Points where every subset contains `x` come back flagged as degenerate
/// with value `+inf`.
pub fn estimate_grid(sample: &[f64], grid: &[f64], cfg: &MldConfig) -> Result<DensityCurve, EstimatorError> {
    Ok(estimate_grid_counted(sample, grid, cfg)?.0)
}

/// [`estimate_grid`] plus the total number of binary-search probes.
pub fn estimate_grid_counted(
    sample: &[f64],
    grid: &[f64],
    cfg: &MldConfig,
) -> Result<(DensityCurve, u64), EstimatorError> {
    check_grid(grid)?;
    let p = partition(sample, cfg)?;
    let counted: Vec<(f64, u64)> = grid
        .par_iter()
        .map(|&x| {
            let (d, probes) = p.distance_counted(x);
            (d.scaled, probes)
        })
        .collect();
    let probes = counted.iter().map(|c| c.1).sum();
    let inverse = counted.into_iter().map(|c| c.0).collect();
    Ok((DensityCurve::from_inverse(grid.to_vec(), inverse, p.info(cfg.alpha)), probes))
}

/// Settings of the two-pass adaptive procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub pilot_alpha: f64,
    pub refine_alpha: f64,
    /// Points whose pilot value lies within this fraction of the
    /// (max - min) gap above the minimum are re-estimated.
    pub gap_fraction: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { pilot_alpha: 1.0 / 3.0, refine_alpha: 0.5, gap_fraction: 0.2 }
    }
}

/// Flags the points of `values` at or below `min + fraction · (max - min)`,
/// with min and max taken over finite values only.
pub fn low_density_flags(values: &[f64], fraction: f64) -> Vec<bool> {
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let (min, max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !min.is_finite() {
        return vec![false; values.len()];
    }
    let threshold = min + (max - min) * fraction;
    values.iter().map(|&v| v.is_finite() && v <= threshold).collect()
}

/// Pilot estimate, then re-estimation of the low-density points with a
/// larger alpha (fewer, bigger subsets) on a fresh partition.
pub fn adaptive_estimate(
    sample: &[f64],
    grid: &[f64],
    cfg: &MldConfig,
    adaptive: &AdaptiveConfig,
) -> Result<DensityCurve, EstimatorError> {
    check_grid(grid)?;
    let pilot = partition_on_stream(sample, adaptive.pilot_alpha, cfg, PARTITION_STREAM)?;
    let mut inverse = pilot.inverse_on(grid);
    let pilot_curve = DensityCurve::from_inverse(grid.to_vec(), inverse.clone(), pilot.info(adaptive.pilot_alpha));
    let flags = low_density_flags(&pilot_curve.values, adaptive.gap_fraction);

    if flags.iter().any(|&f| f) {
        let refine = partition_on_stream(sample, adaptive.refine_alpha, cfg, REFINE_STREAM)?;
        let redone: Vec<(usize, f64)> = flags
            .par_iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| (i, refine.distance(grid[i]).scaled))
            .collect();
        for (i, v) in redone {
            inverse[i] = v;
        }
    }

    let info = EstimatorInfo::AdaptiveMld {
        pilot_alpha: adaptive.pilot_alpha,
        refine_alpha: adaptive.refine_alpha,
        gap_fraction: adaptive.gap_fraction,
        seed: cfg.seed,
        flagged: flags.iter().filter(|&&f| f).count(),
    };
    let mut curve = DensityCurve::from_inverse(grid.to_vec(), inverse, info);
    curve.refined = flags;
    Ok(curve)
}

/// Bivariate extension with the product norm `max(|dx|, |dy|)`.
///
/// Returns the size-scaled mean of squared subset minima, an estimate of
/// `1 / (4 f(point))`.
pub fn bivariate_scaled_square(
    pairs: &[(f64, f64)],
    point: (f64, f64),
    cfg: &MldConfig,
) -> Result<f64, EstimatorError> {
    if pairs.len() < 2 {
        return Err(EstimatorError::InsufficientSample { needed: 2, got: pairs.len() });
    }
    if let Some(i) = pairs.iter().position(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(EstimatorError::NonFiniteSample(i));
    }
    cfg.validate()?;
    let m = cfg.subset_count(pairs.len());
    let groups = deal_indices(pairs.len(), m, cfg.seed, PARTITION_STREAM);
    let total: f64 = groups
        .iter()
        .map(|g| {
            let z = g
                .iter()
                .map(|&i| (pairs[i].0 - point.0).abs().max((pairs[i].1 - point.1).abs()))
                .fold(f64::INFINITY, f64::min);
            (g.len() + 1) as f64 * z * z
        })
        .sum();
    Ok(total / m as f64)
}

/// Bivariate density estimate `1 / (4 · scaled mean square)`.
pub fn estimate_bivariate_point(
    pairs: &[(f64, f64)],
    point: (f64, f64),
    cfg: &MldConfig,
) -> Result<f64, EstimatorError> {
    let scaled = bivariate_scaled_square(pairs, point, cfg)?;
    if scaled > 0.0 {
        Ok(1.0 / (4.0 * scaled))
    } else {
        Err(EstimatorError::Degenerate { x: point.0 })
    }
}
