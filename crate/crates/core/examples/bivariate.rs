// The estimator in two dimensions with the product norm max(|dx|, |dy|),
// on the uniform square [-1/2, 1/2]², where the density is 1.
//
// cargo run --release --example bivariate

use std::error::Error;

use mld::estimators::{estimate_bivariate_point, MldConfig};
use mld::rng;
use rand::Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in [1_000, 10_000, 100_000] {
        let mut r = rng::stream(11, n as u64);
        let pairs: Vec<(f64, f64)> = (0..n).map(|_| (r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect();
        let cfg = MldConfig::new(1.0 / 3.0, 5)?;
        let origin = estimate_bivariate_point(&pairs, (0.0, 0.0), &cfg)?;
        let corner = estimate_bivariate_point(&pairs, (0.3, -0.3), &cfg)?;
        println!("N={n:<7} f(0,0) ≈ {origin:.4}  f(0.3,-0.3) ≈ {corner:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
