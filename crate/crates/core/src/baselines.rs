//! Comparison estimators: k-nearest-neighbour, fixed-width histograms
//! (Scott and Freedman–Diaconis bandwidths) and a Gaussian kernel estimator.
//!
//! Quartiles use linear interpolation between order statistics (the
//! "type 7" rule): the `q`-quantile of a sorted sample `x[0..n]` sits at
//! fractional index `q (n - 1)`. Histogram bins are anchored at the sample
//! minimum.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{DensityCurve, EstimatorInfo};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("insufficient sample: need at least {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("sample contains a non-finite value at index {0}")]
    NonFiniteSample(usize),
    #[error("sample has zero {0}; bandwidth would vanish")]
    ZeroSpread(&'static str),
    #[error("k must satisfy 1 <= k <= N = {n}, got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("evaluation grid is empty")]
    EmptyGrid,
}

fn check_sample(sample: &[f64], needed: usize) -> Result<(), BaselineError> {
    if sample.len() < needed {
        return Err(BaselineError::InsufficientSample { needed, got: sample.len() });
    }
    match sample.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(BaselineError::NonFiniteSample(i)),
        None => Ok(()),
    }
}

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_sd(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    (sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Type-7 quantile of an ascending slice.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Interquartile range with type-7 quartiles.
pub fn iqr(sample: &[f64]) -> f64 {
    let s = sorted(sample);
    sorted_quantile(&s, 0.75) - sorted_quantile(&s, 0.25)
}

// ---------------------------------------------------------------------------
// k nearest neighbours

/// Distance from `x` to its `k`-th nearest point in an ascending slice (`k >= 1`).
pub fn kth_nearest_distance(sorted: &[f64], x: f64, k: usize) -> f64 {
    let mut right = sorted.partition_point(|&v| v < x);
    let mut left = right;
    let mut d = 0.0;
    for _ in 0..k {
        let dl = if left > 0 { x - sorted[left - 1] } else { f64::INFINITY };
        let dr = if right < sorted.len() { sorted[right] - x } else { f64::INFINITY };
        if dl <= dr {
            d = dl;
            left -= 1;
        } else {
            d = dr;
            right += 1;
        }
    }
    d
}

/// `k`-NN estimate `(k / N) / (2 D_k(x))` on every grid point.
pub fn knn_estimate(sample: &[f64], grid: &[f64], k: usize) -> Result<DensityCurve, BaselineError> {
    check_sample(sample, 1)?;
    if grid.is_empty() {
        return Err(BaselineError::EmptyGrid);
    }
    let n = sample.len();
    if k == 0 || k > n {
        return Err(BaselineError::InvalidK { k, n });
    }
    let s = sorted(sample);
    let ratio = n as f64 / k as f64;
    let inverse = grid.par_iter().map(|&x| ratio * kth_nearest_distance(&s, x, k)).collect();
    Ok(DensityCurve::from_inverse(grid.to_vec(), inverse, EstimatorInfo::Knn { k }))
}

/// Default neighbour count `round(sqrt(N))`.
pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(1)
}

// ---------------------------------------------------------------------------
// histograms

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinRule {
    /// `h = 3.49 · sd · N^(-1/3)`
    Scott,
    /// `h = 2 · IQR · N^(-1/3)`
    FreedmanDiaconis,
}

/// Fixed-width histogram anchored at the sample minimum.
///
/// Only occupied bins are stored, so heavy-tailed samples with huge ranges
/// stay cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    anchor: f64,
    bandwidth: f64,
    bins: usize,
    occupied: Vec<(usize, u64)>,
    n: usize,
    rule: BinRule,
}

impl Histogram {
    /// Bins `sample` with width `bandwidth` starting at its minimum.
    pub fn with_bandwidth(sample: &[f64], bandwidth: f64, rule: BinRule) -> Result<Self, BaselineError> {
        check_sample(sample, 1)?;
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(BaselineError::InvalidBandwidth(bandwidth));
        }
        let s = sorted(sample);
        let anchor = s[0];
        let bins = ((s[s.len() - 1] - anchor) / bandwidth).floor() as usize + 1;
        let mut occupied: Vec<(usize, u64)> = Vec::new();
        for &x in &s {
            let b = (((x - anchor) / bandwidth).floor() as usize).min(bins - 1);
            match occupied.last_mut() {
                Some((last, c)) if *last == b => *c += 1,
                _ => occupied.push((b, 1)),
            }
        }
        Ok(Self { anchor, bandwidth, bins, occupied, n: s.len(), rule })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn bin_count(&self) -> usize {
        self.bins
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> BinRule {
        self.rule
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|i| self.anchor + i as f64 * self.bandwidth).collect()
    }

    /// Dense per-bin counts.
    pub fn counts(&self) -> Vec<u64> {
        let mut dense = vec![0; self.bins];
        for &(b, c) in &self.occupied {
            dense[b] = c;
        }
        dense
    }

    /// Total probability mass, `Σ count · h / (N h)`.
    pub fn mass(&self) -> f64 {
        self.occupied
            .iter()
            .map(|&(_, c)| c as f64 * self.bandwidth / (self.n as f64 * self.bandwidth))
            .sum()
    }

    /// Density of the bin containing `x`; zero outside all bins.
    pub fn density_at(&self, x: f64) -> f64 {
        let end = self.anchor + self.bins as f64 * self.bandwidth;
        if !(x >= self.anchor && x <= end) {
            return 0.0;
        }
        let b = (((x - self.anchor) / self.bandwidth).floor() as usize).min(self.bins - 1);
        match self.occupied.binary_search_by_key(&b, |&(bin, _)| bin) {
            Ok(i) => self.occupied[i].1 as f64 / (self.n as f64 * self.bandwidth),
            Err(_) => 0.0,
        }
    }

    pub fn evaluate(&self, grid: &[f64]) -> DensityCurve {
        let values = grid.iter().map(|&x| self.density_at(x)).collect();
        DensityCurve::from_values(
            grid.to_vec(),
            values,
            EstimatorInfo::Histogram {
                rule: self.rule,
                bandwidth: self.bandwidth,
                anchor: self.anchor,
                bins: self.bins,
            },
        )
    }
}

pub fn scott_bandwidth(sample: &[f64]) -> Result<f64, BaselineError> {
    check_sample(sample, 2)?;
    let sd = sample_sd(sample);
    if !(sd > 0.0) {
        return Err(BaselineError::ZeroSpread("standard deviation"));
    }
    Ok(3.49 * sd * (sample.len() as f64).powf(-1.0 / 3.0))
}

pub fn iqr_bandwidth(sample: &[f64]) -> Result<f64, BaselineError> {
    check_sample(sample, 4)?;
    let spread = iqr(sample);
    if !(spread > 0.0) {
        return Err(BaselineError::ZeroSpread("interquartile range"));
    }
    Ok(2.0 * (sample.len() as f64).powf(-1.0 / 3.0) * spread)
}

/// Histogram with Scott's normal-reference bandwidth.
pub fn scott_histogram(sample: &[f64]) -> Result<Histogram, BaselineError> {
    Histogram::with_bandwidth(sample, scott_bandwidth(sample)?, BinRule::Scott)
}

/// Histogram with the Freedman–Diaconis (IQR) bandwidth.
pub fn iqr_histogram(sample: &[f64]) -> Result<Histogram, BaselineError> {
    Histogram::with_bandwidth(sample, iqr_bandwidth(sample)?, BinRule::FreedmanDiaconis)
}

// ---------------------------------------------------------------------------
// Gaussian kernel

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Fixed(f64),
    /// `0.9 · min(sd, IQR / 1.34) · N^(-1/5)`
    Silverman,
}

pub fn silverman_bandwidth(sample: &[f64]) -> Result<f64, BaselineError> {
    check_sample(sample, 2)?;
    let sd = sample_sd(sample);
    let robust = iqr(sample) / 1.34;
    let spread = match (sd > 0.0, robust > 0.0) {
        (true, true) => sd.min(robust),
        (true, false) => sd,
        (false, true) => robust,
        (false, false) => return Err(BaselineError::ZeroSpread("spread")),
    };
    Ok(0.9 * spread * (sample.len() as f64).powf(-0.2))
}

/// Gaussian kernel estimate `(1 / (N h)) Σ φ((x - X_i) / h)`.
pub fn kde_gaussian(sample: &[f64], grid: &[f64], bandwidth: Bandwidth) -> Result<DensityCurve, BaselineError> {
    check_sample(sample, 1)?;
    if grid.is_empty() {
        return Err(BaselineError::EmptyGrid);
    }
    let (h, rule) = match bandwidth {
        Bandwidth::Fixed(h) => (h, None),
        Bandwidth::Silverman => (silverman_bandwidth(sample)?, Some("silverman".to_string())),
    };
    if !(h > 0.0) || !h.is_finite() {
        return Err(BaselineError::InvalidBandwidth(h));
    }
    let norm = 1.0 / (sample.len() as f64 * h * (2.0 * PI).sqrt());
    let values = grid
        .par_iter()
        .map(|&x| {
            norm * sample
                .iter()
                .map(|&xi| {
                    let u = (x - xi) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(DensityCurve::from_values(grid.to_vec(), values, EstimatorInfo::Kde { bandwidth: h, rule }))
}
