// Pointwise MSE of MLD at x = 1/2 for beta(1,4) as N grows, with the
// fitted log-log rate.
//
// cargo run --release --example pointwise_convergence

use std::error::Error;

use mld::distributions::Distribution;
use mld::harness::{pointwise_mse_experiment, ExperimentSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = ExperimentSpec::new(Distribution::beta(1.0, 4.0)?, vec![100, 316, 1000, 3162, 10_000], 2024)
        .with_trials(100)
        .with_alphas(vec![0.2, 1.0 / 3.0])
        .with_point(0.5);
    let report = pointwise_mse_experiment(&spec)?;
    for c in &report.cells {
        println!("N={:<6} alpha={:.3} mse={:.3e} (se {:.1e})", c.n, c.alpha.unwrap_or(f64::NAN), c.imse, c.se_imse);
    }
    println!("{}", report.summary_line());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
