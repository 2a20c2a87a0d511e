// MLD density estimate of a Cauchy sample on a grid.
//
// cargo run --release --example estimate_cauchy

use std::error::Error;

use mld::curve::linspace;
use mld::distributions::Distribution;
use mld::estimators::{estimate_grid, partition, MldConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cauchy: Distribution = "cauchy:0,1".parse()?;
    let sample = cauchy.sample(2000, 42, 0);
    let cfg = MldConfig::new(1.0 / 3.0, 7)?;

    let p = partition(sample.as_slice(), &cfg)?;
    println!(
        "N = {}, {} subsets of about {} points",
        p.source_size(),
        p.subset_count(),
        p.nominal_subset_size()
    );

    let grid = linspace(-5.0, 5.0, 11);
    let curve = estimate_grid(sample.as_slice(), &grid, &cfg)?;
    println!("{:>6} {:>10} {:>10}", "x", "estimate", "true");
    for (x, f) in curve.grid.iter().zip(&curve.values) {
        println!("{x:>6.1} {f:>10.5} {:>10.5}", cauchy.pdf(*x));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
