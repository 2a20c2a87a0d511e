// The two-pass adaptive estimate against plain MLD in the Cauchy tails.
//
// cargo run --release --example adaptive_cauchy

use std::error::Error;

use mld::curve::linspace;
use mld::distributions::Distribution;
use mld::estimators::{adaptive_estimate, estimate_grid, AdaptiveConfig, MldConfig};
use mld::harness::{adaptive_comparison, ExperimentSpec, Summary};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cauchy = Distribution::cauchy(0.0, 1.0)?;

    let sample = cauchy.sample(8000, 1, 0);
    let grid = linspace(-20.0, 20.0, 9);
    let cfg = MldConfig::new(1.0 / 3.0, 2)?;
    let plain = estimate_grid(sample.as_slice(), &grid, &cfg)?;
    let adaptive = adaptive_estimate(sample.as_slice(), &grid, &cfg, &AdaptiveConfig::default())?;
    println!("{:>6} {:>10} {:>10} {:>10} refined", "x", "true", "plain", "adaptive");
    for i in 0..grid.len() {
        println!(
            "{:>6.1} {:>10.5} {:>10.5} {:>10.5} {}",
            grid[i],
            cauchy.pdf(grid[i]),
            plain.values[i],
            adaptive.values[i],
            adaptive.refined[i]
        );
    }

    let spec = ExperimentSpec::new(cauchy, vec![8000], 3).with_trials(40);
    let report = adaptive_comparison(&spec)?;
    if let Summary::Adaptive(s) = &report.summary {
        println!("tail error reduced by {:.0}% over {} trials", 100.0 * s.tail_reduction(), spec.trials);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
