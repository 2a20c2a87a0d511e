// Scaled moments of the minimum of |X - x*| approaching 1/g(0), 2/g(0)²
// and 1/g(0)², by quadrature and by simulation.
//
// cargo run --release --example moment_limits

use std::error::Error;

use mld::distributions::Distribution;
use mld::harness::slope_fit;
use mld::moments::{limit_convergence_table, mc_order_stat_moments, Law};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let ns = [10, 100, 1000, 10_000];
    let laws = [
        Law::folded(Distribution::cauchy(0.0, 1.0)?, 0.0)?,
        Law::folded(Distribution::exponential(1.0)?, 0.7)?,
        Law::raw(Distribution::exponential(1.0)?)?,
    ];
    for law in &laws {
        let table = limit_convergence_table(law, &ns)?;
        println!("{}  (limits {:.6}, {:.6}, {:.6})", law.label(), table[0].limit_first, table[0].limit_second, table[0].limit_var);
        for r in &table {
            println!("  N={:<6} first={:.8} second={:.8} var={:.8} deviation={:.3e}", r.n, r.first_scaled, r.second_scaled, r.var_scaled, r.deviation);
        }
        let xs: Vec<f64> = table[1..].iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = table[1..].iter().map(|r| r.deviation.ln()).collect();
        println!("  deviation slope {:.3}", slope_fit(&xs, &ys)?.slope);

        let mc = mc_order_stat_moments(law, 50, 20_000, 1)?;
        println!(
            "  N=50 simulation: first={:.4} ± {:.4}, second={:.4} ± {:.4}",
            mc.first_scaled,
            mc.se_first.unwrap_or(f64::NAN),
            mc.second_scaled,
            mc.se_second.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
