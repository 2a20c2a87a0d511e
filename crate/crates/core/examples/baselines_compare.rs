// MLD next to the k-nearest-neighbour, histogram and Gaussian kernel
// estimators on the claw mixture.
//
// cargo run --release --example baselines_compare

use std::error::Error;

use mld::baselines::{iqr_histogram, kde_gaussian, knn_estimate, scott_histogram, default_k, Bandwidth};
use mld::curve::linspace;
use mld::distributions::Distribution;
use mld::estimators::{estimate_grid, MldConfig};
use mld::harness::trapezoid;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let claw = Distribution::claw();
    let sample = claw.sample(4000, 3, 0);
    let x = sample.as_slice();
    let grid = linspace(-3.0, 3.0, 256);
    let truth: Vec<f64> = grid.iter().map(|&g| claw.pdf(g)).collect();

    let curves = [
        ("mld", estimate_grid(x, &grid, &MldConfig::new(0.45, 1)?)?),
        ("knn", knn_estimate(x, &grid, default_k(x.len()))?),
        ("scott", scott_histogram(x)?.evaluate(&grid)),
        ("iqr", iqr_histogram(x)?.evaluate(&grid)),
        ("kde", kde_gaussian(x, &grid, Bandwidth::Silverman)?),
    ];
    println!("integrated squared error over [-3, 3]:");
    for (name, curve) in &curves {
        let sq: Vec<f64> = curve.values.iter().zip(&truth).map(|(v, t)| (v - t).powi(2)).collect();
        println!("  {name:<6} {:.5}", trapezoid(&grid, &sq));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
