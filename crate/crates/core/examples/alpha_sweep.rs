// Integrated MSE as a function of alpha at N = 1000.
//
// cargo run --release --example alpha_sweep

use std::error::Error;

use mld::curve::linspace;
use mld::distributions::Distribution;
use mld::harness::{alpha_sweep, ExperimentSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for dist in [Distribution::beta(1.0, 4.0)?, Distribution::claw(), Distribution::cauchy(0.0, 1.0)?] {
        let spec = ExperimentSpec::new(dist.clone(), vec![1000], 8)
            .with_trials(40)
            .with_alphas(linspace(0.05, 0.8, 16));
        let report = alpha_sweep(&spec)?;
        println!("{dist}: {}", report.summary_line());
        for c in &report.cells {
            let bar = "#".repeat(((c.imse / report.cells[0].imse).sqrt() * 40.0).min(60.0) as usize);
            println!("  {:.2} {:>10.3e} {bar}", c.alpha.unwrap_or(f64::NAN), c.imse);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
