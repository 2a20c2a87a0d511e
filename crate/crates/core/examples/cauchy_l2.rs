// Integrated MSE on [-20, 20] for Cauchy samples: MLD keeps improving with
// N while the Scott histogram, whose bin width follows the sample standard
// deviation, does not.
//
// cargo run --release --example cauchy_l2

use std::error::Error;

use mld::distributions::Distribution;
use mld::harness::{imse_experiment, EstimatorKind, ExperimentSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = ExperimentSpec::new(Distribution::cauchy(0.0, 1.0)?, vec![125, 500, 2000], 5)
        .with_trials(50)
        .with_estimators(vec![EstimatorKind::Mld, EstimatorKind::Scott, EstimatorKind::Iqr, EstimatorKind::Kde]);
    let report = imse_experiment(&spec)?;
    println!("{:>6} {:>8} {:>12}", "N", "method", "imse");
    for c in &report.cells {
        println!("{:>6} {:>8} {:>12.4e}", c.n, c.estimator.name(), c.imse);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
