// The Dirac sequence δ_N(z) = (N+1)(1-z)^N and the moment quadratures
// checked against exact order-statistic values.
//
// cargo run --release --example moment_quadrature

use std::error::Error;

use mld::distributions::Distribution;
use mld::moments::{
    closed_form_report, delta_normalization, delta_weight, dirac_action, dirac_tail_mass, first_moment_quadrature,
    second_moment_by_parts, second_moment_quadrature, Law,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in [10, 1000, 1_000_000] {
        println!(
            "N={n:<8} δ(0)={:.0} δ(1e-3)={:.4e} ∫δ={:.12} mass beyond 0.01={:.3e} ∫cos·δ={:.10}",
            delta_weight(n, 0.0),
            delta_weight(n, 1e-3),
            delta_normalization(n)?,
            dirac_tail_mass(n, 0.01),
            dirac_action(f64::cos, n)?
        );
    }

    for law in [Law::raw(Distribution::uniform(0.0, 1.0)?)?, Law::raw(Distribution::exponential(1.0)?)?] {
        for n in [1, 10, 1000] {
            let exact = closed_form_report(&law, n).expect("closed form exists");
            println!(
                "{} N={n:<5} first {:.12} (exact {:.12})  second {:.12} (exact {:.12}, by parts {:.8})",
                law.label(),
                first_moment_quadrature(&law, n)?,
                exact.first_scaled,
                second_moment_quadrature(&law, n)?,
                exact.second_scaled,
                second_moment_by_parts(&law, n)?
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
