use mld::baselines::{iqr_histogram, kth_nearest_distance, scott_histogram};
use mld::distributions::Distribution;
use mld::estimators::{estimate_grid, partition, MldConfig};
use mld::moments::{delta_weight, dirac_tail_mass};
use proptest::prelude::*;

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 2..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_preserves_multiset(sample in sample_strategy(), alpha in 0.01f64..0.99, seed: u64) {
        let cfg = MldConfig::new(alpha, seed).unwrap();
        let p = partition(&sample, &cfg).unwrap();
        prop_assert_eq!(p.subset_count(), cfg.subset_count(sample.len()));
        let mut joined = p.subsets().concat();
        let mut orig = sample.clone();
        joined.sort_by(f64::total_cmp);
        orig.sort_by(f64::total_cmp);
        prop_assert_eq!(joined, orig);
        for s in p.subsets() {
            prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
        }
        let sizes = p.subset_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn mean_subset_distance_dominates_nearest(sample in sample_strategy(), x in -1.2e3f64..1.2e3, alpha in 0.01f64..0.99, seed: u64) {
        let cfg = MldConfig::new(alpha, seed).unwrap();
        let p = partition(&sample, &cfg).unwrap();
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let d1 = kth_nearest_distance(&sorted, x, 1);
        prop_assert!(p.distance(x).mean >= d1 * (1.0 - f64::EPSILON));
    }

    #[test]
    fn estimate_is_translation_equivariant(
        ints in prop::collection::vec(-4096i64..4096, 2..200),
        shift in -1000i64..1000,
        seed: u64,
    ) {
        let sample: Vec<f64> = ints.iter().map(|&i| i as f64 / 16.0).collect();
        let grid: Vec<f64> = (0..9).map(|i| i as f64 * 13.0 - 52.0).collect();
        let cfg = MldConfig::new(0.3, seed).unwrap();
        let a = estimate_grid(&sample, &grid, &cfg).unwrap();
        let s = shift as f64;
        let moved: Vec<f64> = sample.iter().map(|v| v + s).collect();
        let mgrid: Vec<f64> = grid.iter().map(|v| v + s).collect();
        let b = estimate_grid(&moved, &mgrid, &cfg).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            prop_assert_eq!(u.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn estimate_is_scale_equivariant(sample in sample_strategy(), c in 1e-3f64..1e3, seed: u64) {
        let grid = [-500.0, -10.0, 0.5, 42.0];
        let cfg = MldConfig::new(0.4, seed).unwrap();
        let a = estimate_grid(&sample, &grid, &cfg).unwrap();
        let scaled: Vec<f64> = sample.iter().map(|v| v * c).collect();
        let sgrid: Vec<f64> = grid.iter().map(|v| v * c).collect();
        let b = estimate_grid(&scaled, &sgrid, &cfg).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            if u.is_finite() {
                prop_assert!((v * c / u - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn histograms_have_unit_mass(seed: u64, n in 5usize..3000) {
        let sample = Distribution::cauchy(0.0, 1.0).unwrap().sample(n, seed, 0);
        prop_assert!((scott_histogram(sample.as_slice()).unwrap().mass() - 1.0).abs() < 1e-9);
        prop_assert!((iqr_histogram(sample.as_slice()).unwrap().mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn delta_weight_is_nonnegative_and_decreasing(n in 0u64..10_000_000, z in 0.0f64..1.0, dz in 0.0f64..0.5) {
        let w = delta_weight(n, z);
        prop_assert!(w >= 0.0 && w <= n as f64 + 1.0);
        prop_assert!(delta_weight(n, (z + dz).min(1.0)) <= w);
    }

    #[test]
    fn tail_mass_matches_power(n in 0u64..1000, eta in 0.001f64..0.999) {
        let exact = (1.0 - eta).powi(n as i32 + 1);
        prop_assert!((dirac_tail_mass(n, eta) - exact).abs() <= 1e-12 * exact.max(1e-300) + 1e-300);
    }
}
