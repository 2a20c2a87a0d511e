//! Density estimates evaluated on a grid.

use serde::Serialize;

/// Which estimator produced a curve, with its resolved tuning.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "estimator", rename_all = "snake_case")]
pub enum EstimatorInfo {
    Mld {
        alpha: f64,
        seed: u64,
        scaling: crate::estimators::Scaling,
        subsets: usize,
        nominal_subset_size: usize,
    },
    AdaptiveMld {
        pilot_alpha: f64,
        refine_alpha: f64,
        gap_fraction: f64,
        seed: u64,
        flagged: usize,
    },
    Knn {
        k: usize,
    },
    Histogram {
        rule: crate::baselines::BinRule,
        bandwidth: f64,
        anchor: f64,
        bins: usize,
    },
    Kde {
        bandwidth: f64,
        rule: Option<String>,
    },
}

/// Estimated density values on ascending evaluation points.
///
/// `inverse_values[i]` holds the estimator's internal estimate of
/// `1 / (2 f(x_i))` scale (for MLD the averaged scaled distance), so that
/// `values[i] = 1 / (2 inverse_values[i])` wherever the latter is positive.
/// Points whose inverse is zero are flagged `degenerate` and carry `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub inverse_values: Vec<f64>,
    pub degenerate: Vec<bool>,
    /// Points re-estimated by the adaptive procedure.
    pub refined: Vec<bool>,
    pub info: EstimatorInfo,
}

impl DensityCurve {
    /// Builds a curve from per-point inverse estimates.
    pub fn from_inverse(grid: Vec<f64>, inverse_values: Vec<f64>, info: EstimatorInfo) -> Self {
        let values: Vec<f64> = inverse_values
            .iter()
            .map(|&inv| if inv > 0.0 { 1.0 / (2.0 * inv) } else { f64::INFINITY })
            .collect();
        let degenerate = inverse_values.iter().map(|&inv| !(inv > 0.0)).collect();
        let refined = vec![false; grid.len()];
        Self { grid, values, inverse_values, degenerate, refined, info }
    }

    /// Builds a curve from density values (histograms, kernels), where zero
    /// is a legitimate estimate rather than a degeneracy.
    pub fn from_values(grid: Vec<f64>, values: Vec<f64>, info: EstimatorInfo) -> Self {
        let inverse_values = values
            .iter()
            .map(|&v| if v > 0.0 { 1.0 / (2.0 * v) } else { f64::INFINITY })
            .collect();
        let n = grid.len();
        Self { grid, values, inverse_values, degenerate: vec![false; n], refined: vec![false; n], info }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// Value at the grid point nearest to `x` (ties go to the left point).
    pub fn interpolate_nearest(&self, x: f64) -> f64 {
        let i = self.grid.partition_point(|&g| g < x);
        if i == 0 {
            return self.values[0];
        }
        if i == self.grid.len() {
            return self.values[i - 1];
        }
        if x - self.grid[i - 1] <= self.grid[i] - x {
            self.values[i - 1]
        } else {
            self.values[i]
        }
    }
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_values_agree() {
        let c = DensityCurve::from_inverse(vec![0.0, 1.0, 2.0], vec![0.25, 0.0, 2.0], EstimatorInfo::Knn { k: 1 });
        assert_eq!(c.values, vec![2.0, f64::INFINITY, 0.25]);
        assert_eq!(c.degenerate, vec![false, true, false]);
        assert_eq!(c.degenerate_count(), 1);
    }

    #[test]
    fn nearest_interpolation() {
        let c = DensityCurve::from_values(vec![0.0, 1.0, 2.0], vec![10.0, 20.0, 30.0], EstimatorInfo::Knn { k: 1 });
        assert_eq!(c.interpolate_nearest(-5.0), 10.0);
        assert_eq!(c.interpolate_nearest(0.4), 10.0);
        assert_eq!(c.interpolate_nearest(0.5), 10.0);
        assert_eq!(c.interpolate_nearest(0.6), 20.0);
        assert_eq!(c.interpolate_nearest(1.9), 30.0);
        assert_eq!(c.interpolate_nearest(9.0), 30.0);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-10.0, 10.0, 256);
        assert_eq!(g.len(), 256);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[255], 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((linspace(0.05, 0.8, 16)[1] - 0.1).abs() < 1e-15);
    }
}
