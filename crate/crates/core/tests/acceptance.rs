//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mld::baselines::{iqr_histogram, scott_histogram, Histogram};
use mld::curve::linspace;
use mld::distributions::Distribution;
use mld::estimators::{
    bivariate_scaled_square, estimate_bivariate_point, estimate_grid, partition, MldConfig,
};
use mld::harness::{
    adaptive_comparison, alpha_sweep, bias_variance_profile, imse_experiment, pointwise_mse_experiment,
    slope_fit, EstimatorKind, ExperimentSpec, GridSpec, Summary,
};
use mld::moments::{
    delta_normalization, first_moment_quadrature, limit_convergence_table, mc_order_stat_moments,
    quadrature_report, second_moment_quadrature, Law,
};
use mld::rng;
use rand::Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn exact_identities() -> Check {
    let uniform = Law::raw(Distribution::uniform(0.0, 1.0).map_err(err)?).map_err(err)?;
    let exp1 = Law::raw(Distribution::exponential(1.0).map_err(err)?).map_err(err)?;
    let mut worst: f64 = 0.0;
    for n in [1u64, 10, 1000] {
        let nf = n as f64;
        let checks = [
            (first_moment_quadrature(&uniform, n).map_err(err)?, 1.0),
            (second_moment_quadrature(&uniform, n).map_err(err)?, 2.0 * (nf + 1.0) / (nf + 2.0)),
            (first_moment_quadrature(&exp1, n).map_err(err)?, (nf + 1.0) / nf),
        ];
        for (got, want) in checks {
            ensure(close(got, want, 1e-8), || format!("N={n}: {got} vs {want}"))?;
            worst = worst.max((got - want).abs());
        }
    }
    Ok(format!("max abs error {worst:.1e}"))
}

fn fold_cases() -> Result<Vec<Law>, String> {
    let specs = [
        ("uniform:0,1", 0.5),
        ("uniform:-2,3", 0.5),
        ("exp:1", 0.7),
        ("exp:2.5", 1.0),
        ("gauss:0,1", 0.0),
        ("gauss:1.5,0.3", 1.4),
        ("cauchy:0,1", 0.0),
        ("cauchy:-1,2", 0.3),
        ("beta:1,4", 0.5),
        ("beta:2,3", 0.4),
        ("beta:3,1", 0.6),
        ("gmix", 0.25),
    ];
    let mut laws = Vec::new();
    for (d, c) in specs {
        let dist: Distribution = d.parse().map_err(err)?;
        if dist.support().0 == 0.0 {
            laws.push(Law::raw(dist.clone()).map_err(err)?);
        }
        laws.push(Law::folded(dist, c).map_err(err)?);
    }
    Ok(laws)
}

fn quadrature_vs_mc() -> Check {
    let laws = fold_cases()?;
    let mut worst: f64 = 0.0;
    for (i, law) in laws.iter().enumerate() {
        let q = quadrature_report(law, 50).map_err(err)?;
        let mc = mc_order_stat_moments(law, 50, 100_000, 1000 + i as u64).map_err(err)?;
        let z1 = (q.first_scaled - mc.first_scaled).abs() / mc.se_first.unwrap();
        let z2 = (q.second_scaled - mc.second_scaled).abs() / mc.se_second.unwrap();
        ensure(z1 <= 4.0 && z2 <= 4.0, || {
            format!("{}: quad ({}, {}) vs mc ({}, {}), z = ({z1:.2}, {z2:.2})", law.label(), q.first_scaled, q.second_scaled, mc.first_scaled, mc.second_scaled)
        })?;
        ensure(q.var_scaled > 0.0, || format!("{}: variance {}", law.label(), q.var_scaled))?;
        worst = worst.max(z1).max(z2);
    }
    Ok(format!("{} laws, largest |quad - mc| = {worst:.2} SE", laws.len()))
}

fn log_slope(rows: &[mld::moments::MomentReport]) -> Result<f64, String> {
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.deviation.ln()).collect();
    Ok(slope_fit(&xs, &ys).map_err(err)?.slope)
}

fn corollary_limits() -> Check {
    let ns = [100, 1000, 10_000];
    let cauchy = Law::folded(Distribution::cauchy(0.0, 1.0).map_err(err)?, 0.0).map_err(err)?;
    let table = limit_convergence_table(&cauchy, &ns).map_err(err)?;
    let first = table[2].first_scaled;
    let rel = (first / std::f64::consts::FRAC_PI_2 - 1.0).abs();
    ensure(rel < 0.02, || format!("folded Cauchy first moment {first} is {rel:.3} from pi/2"))?;
    ensure(table.windows(2).all(|w| w[1].deviation < w[0].deviation), || "Cauchy deviation not decreasing".into())?;

    let folded = Law::folded(Distribution::exponential(1.0).map_err(err)?, 0.7).map_err(err)?;
    let folded_slope = log_slope(&limit_convergence_table(&folded, &ns).map_err(err)?)?;
    ensure(folded_slope <= -1.5, || format!("folded exponential slope {folded_slope}"))?;
    let raw = Law::raw(Distribution::exponential(1.0).map_err(err)?).map_err(err)?;
    let raw_slope = log_slope(&limit_convergence_table(&raw, &ns).map_err(err)?)?;
    ensure(close(raw_slope, -1.0, 1e-6), || format!("raw exponential slope {raw_slope}"))?;
    Ok(format!(
        "folded Cauchy (N=1e4) = {first:.8} ({:.1e} rel), folded exp slope {folded_slope:.3}, raw exp slope {raw_slope:.7}",
        rel
    ))
}

fn pointwise_convergence() -> Check {
    let ns: Vec<usize> = (4..=10).map(|k| 10f64.powf(k as f64 / 2.0).round() as usize).collect();
    let spec = ExperimentSpec::new(Distribution::beta(1.0, 4.0).map_err(err)?, ns, 401)
        .with_trials(200)
        .with_point(0.5);
    let report = pointwise_mse_experiment(&spec).map_err(err)?;
    let Summary::Slopes { fits } = &report.summary else { return Err("no slope".into()) };
    let fit = fits[0].2;
    ensure((-0.9..=-0.6).contains(&fit.slope) && fit.r2 >= 0.95, || format!("slope {:.4}, r2 {:.4}", fit.slope, fit.r2))?;
    Ok(format!("slope {:.4}, r2 {:.4}", fit.slope, fit.r2))
}

fn monotone_with_one_inversion(v: &[f64]) -> bool {
    v.windows(2).filter(|w| w[1] >= w[0]).count() <= 1
}

fn cauchy_robustness() -> Check {
    let spec = ExperimentSpec::new(Distribution::cauchy(0.0, 1.0).map_err(err)?, vec![125, 500, 2000, 8000], 501)
        .with_trials(200)
        .with_grid(GridSpec { lo: -20.0, hi: 20.0, count: 256 })
        .with_estimators(vec![EstimatorKind::Mld, EstimatorKind::Scott]);
    let report = imse_experiment(&spec).map_err(err)?;
    let series = |e: EstimatorKind| -> Vec<f64> { report.cells.iter().filter(|c| c.estimator == e).map(|c| c.imse).collect() };
    let mld = series(EstimatorKind::Mld);
    let scott = series(EstimatorKind::Scott);
    let mld_ratio = mld[3] / mld[0];
    let scott_ratio = scott[3] / scott[0];
    ensure(mld_ratio <= 0.25 && monotone_with_one_inversion(&mld), || format!("MLD IMSE {mld:?}"))?;
    ensure(scott_ratio > 0.5, || format!("Scott IMSE {scott:?}"))?;
    Ok(format!("MLD final/initial {mld_ratio:.3}, Scott {scott_ratio:.3}"))
}

fn alpha_sweeps() -> Check {
    let alphas = linspace(0.05, 0.8, 16);
    let mut parts = Vec::new();
    for dist in [Distribution::beta(1.0, 4.0).map_err(err)?, Distribution::claw(), Distribution::cauchy(0.0, 1.0).map_err(err)?] {
        let spec = ExperimentSpec::new(dist.clone(), vec![1000], 601).with_trials(200).with_alphas(alphas.clone());
        let report = alpha_sweep(&spec).map_err(err)?;
        let Summary::Argmin { alpha, imse } = report.summary else { return Err("no argmin".into()) };
        let last = report.cells.last().unwrap().imse;
        ensure(last > 2.0 * imse, || format!("{dist}: IMSE(0.8) = {last}, min = {imse}"))?;
        ensure((0.2..=0.6).contains(&alpha), || format!("{dist}: argmin {alpha}"))?;
        parts.push(format!("{dist} argmin {alpha:.2} (IMSE(0.8)/min {:.1})", last / imse));
    }
    Ok(parts.join(", "))
}

fn adaptive_cauchy() -> Check {
    let spec = ExperimentSpec::new(Distribution::cauchy(0.0, 1.0).map_err(err)?, vec![8000], 701).with_trials(200);
    let report = adaptive_comparison(&spec).map_err(err)?;
    let Summary::Adaptive(s) = report.summary else { return Err("no summary".into()) };
    let reduction = s.tail_reduction();
    let unflagged = (s.unflagged_mae_adaptive / s.unflagged_mae_plain - 1.0).abs();
    ensure(reduction >= 0.10, || format!("tail reduction {reduction:.3}"))?;
    ensure(unflagged <= 0.05, || format!("unflagged change {unflagged:.3}"))?;
    Ok(format!("tail MAE reduced {:.1}%, unflagged change {:.1}%", 100.0 * reduction, 100.0 * unflagged))
}

fn square_pairs(seed: u64, trial: u64, n: usize) -> Vec<(f64, f64)> {
    let mut r = rng::stream(seed, trial);
    (0..n).map(|_| (r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)).collect()
}

fn bivariate() -> Check {
    // one subset: the scaled square is (N+1) Z² itself
    let single = MldConfig::new(0.99, 0).map_err(err)?;
    let trials = 100_000u64;
    let values: Vec<f64> = (0..trials)
        .map(|t| bivariate_scaled_square(&square_pairs(801, t, 100), (0.0, 0.0), &single))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0)).sqrt();
    let se = sd / (trials as f64).sqrt();
    ensure((mean - 0.25).abs() <= 4.0 * se, || format!("mean (N+1)Z² = {mean} (se {se})"))?;

    let reps = 100u64;
    let mut total = 0.0;
    for t in 0..reps {
        let cfg = MldConfig::new(1.0 / 3.0, 900 + t).map_err(err)?;
        total += estimate_bivariate_point(&square_pairs(802, t, 100_000), (0.0, 0.0), &cfg).map_err(err)?;
    }
    let avg = total / reps as f64;
    ensure((avg - 1.0).abs() <= 0.1, || format!("density at origin {avg}"))?;
    Ok(format!("mean (N+1)Z² = {mean:.5} ± {se:.5}, f(0,0) ≈ {avg:.4}"))
}

fn invariants() -> Check {
    let cauchy = Distribution::cauchy(0.0, 1.0).map_err(err)?;
    let mut r = rng::stream(901, 0);

    // multiset preservation
    for t in 0..200u64 {
        let n = r.random_range(2..500);
        let sample = cauchy.sample(n, 902, t);
        let cfg = MldConfig::new(r.random_range(0.05..0.95), t).map_err(err)?;
        let p = partition(sample.as_slice(), &cfg).map_err(err)?;
        let mut joined: Vec<f64> = p.subsets().concat();
        let mut orig = sample.values.clone();
        joined.sort_by(f64::total_cmp);
        orig.sort_by(f64::total_cmp);
        ensure(joined == orig, || format!("partition lost values (N={n})"))?;
        let sizes = p.subset_sizes();
        ensure(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, || format!("sizes {sizes:?}"))?;
    }

    // D_MLD >= D_1
    for t in 0..10_000u64 {
        let n = r.random_range(2..200);
        let sample = cauchy.sample(n, 903, t);
        let x: f64 = r.random_range(-10.0..10.0);
        let cfg = MldConfig::new(r.random_range(0.05..0.95), t).map_err(err)?;
        let p = partition(sample.as_slice(), &cfg).map_err(err)?;
        let d_mld = p.distance(x).mean;
        let d1 = sample.values.iter().map(|v| (v - x).abs()).fold(f64::INFINITY, f64::min);
        ensure(d_mld >= d1 * (1.0 - f64::EPSILON), || format!("D_MLD {d_mld} < D_1 {d1}"))?;
    }

    // translation (exact arithmetic on dyadic values) and scale equivariance
    for t in 0..200u64 {
        let n = r.random_range(10..300);
        let sample: Vec<f64> = (0..n).map(|_| r.random_range(-4096i64..4096) as f64 / 8.0).collect();
        let grid: Vec<f64> = (0..17).map(|i| (i as f64 - 8.0) * 37.0 / 16.0).collect();
        let cfg = MldConfig::new(0.4, t).map_err(err)?;
        let base = estimate_grid(&sample, &grid, &cfg).map_err(err)?;
        let shift = r.random_range(-1000i64..1000) as f64;
        let shifted: Vec<f64> = sample.iter().map(|v| v + shift).collect();
        let sgrid: Vec<f64> = grid.iter().map(|v| v + shift).collect();
        let moved = estimate_grid(&shifted, &sgrid, &cfg).map_err(err)?;
        ensure(
            base.values.iter().zip(&moved.values).all(|(a, b)| a.to_bits() == b.to_bits()),
            || format!("translation by {shift} changed the estimate"),
        )?;
        let c: f64 = r.random_range(0.01..100.0);
        let scaled: Vec<f64> = sample.iter().map(|v| v * c).collect();
        let cgrid: Vec<f64> = grid.iter().map(|v| v * c).collect();
        let stretched = estimate_grid(&scaled, &cgrid, &cfg).map_err(err)?;
        for (a, b) in base.values.iter().zip(&stretched.values) {
            if a.is_finite() {
                ensure(((b * c) / a - 1.0).abs() <= 1e-12, || format!("scale {c}: {a} vs {}", b * c))?;
            }
        }
    }

    // a single subset reduces to the nearest-neighbour distance
    for t in 0..200u64 {
        let n = r.random_range(2..1000);
        let sample = cauchy.sample(n, 904, t);
        let cfg = MldConfig::new(0.99, t).map_err(err)?;
        ensure(cfg.subset_count(n) == 1, || format!("m = {} at N = {n}", cfg.subset_count(n)))?;
        let x: f64 = r.random_range(-3.0..3.0);
        let d1 = sample.values.iter().map(|v| (v - x).abs()).fold(f64::INFINITY, f64::min);
        let est = estimate_grid(sample.as_slice(), &[x], &cfg).map_err(err)?.values[0];
        ensure(est == 1.0 / (2.0 * (n as f64 + 1.0) * d1), || format!("m=1 estimate {est} at N={n}"))?;
    }

    for n in [1u64, 10, 1000, 1_000_000] {
        let total = delta_normalization(n).map_err(err)?;
        ensure(close(total, 1.0, 1e-10), || format!("δ_N mass {total} at N={n}"))?;
    }

    for t in 0..50u64 {
        let sample = cauchy.sample(r.random_range(10..5000), 905, t);
        let hists: [Histogram; 2] = [scott_histogram(sample.as_slice()).map_err(err)?, iqr_histogram(sample.as_slice()).map_err(err)?];
        for h in hists {
            ensure(close(h.mass(), 1.0, 1e-9), || format!("{:?} histogram mass {}", h.rule(), h.mass()))?;
        }
    }

    let spec = ExperimentSpec::new(Distribution::claw(), vec![500], 906)
        .with_trials(50)
        .with_grid(GridSpec { lo: -3.0, hi: 3.0, count: 64 })
        .with_estimators(vec![EstimatorKind::Mld, EstimatorKind::Knn, EstimatorKind::Iqr, EstimatorKind::Kde]);
    let report = bias_variance_profile(&spec).map_err(err)?;
    for c in &report.cells {
        for p in &c.points {
            let rhs = p.bias * p.bias + p.variance;
            ensure((p.mse - rhs).abs() <= 1e-10 * p.mse, || format!("{}: mse {} vs {rhs}", c.estimator, p.mse))?;
        }
    }
    Ok("partition, dominance (1e4 cases), translation, scale, m=1, δ_N mass, histogram mass, MSE split".into())
}

fn run_cli(bin: &str, args: &[String]) -> Result<(), String> {
    let out = Command::new(bin).args(args).output().map_err(err)?;
    ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))
}

fn cli_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_mld");
    let dir = tempfile::tempdir().map_err(err)?;
    let input = dir.path().join("sample.txt");
    let sample = Distribution::claw().sample(300, 5, 0);
    let text: String = std::iter::once("# claw sample\n".to_string())
        .chain(sample.values.iter().map(|v| format!("{v:?}\n")))
        .collect();
    std::fs::write(&input, text).map_err(err)?;

    let commands: Vec<Vec<String>> = [
        "estimate --dist cauchy:0,1 --n 2000 --grid -10:10:256 --seed 7",
        "estimate --dist cauchy:0,1 --n 2000 --grid -20:20:64 --adaptive --seed 7 --format json",
        "estimate --dist gmix --n 1000 --estimator kde --grid -3:3:32 --seed 8",
        "moments --dist exp:1 --n-list 10,100 --method both --trials 20000 --seed 9",
        "moments --dist cauchy:0,1 --fold-at 0 --n-list 100,1000,10000 --seed 9",
        "experiment --mode imse --dist beta:1,4 --n-list 100,200,400 --trials 30 --estimators mld,knn,iqr,kde --seed 10",
        "experiment --mode adaptive --dist cauchy:0,1 --n 2000 --trials 20 --seed 11 --format json",
    ]
    .iter()
    .map(|c| c.split(' ').map(String::from).collect())
    .chain(std::iter::once(
        ["estimate", "--input", input.to_str().unwrap(), "--points", "0.5", "--alpha", "0.3333", "--seed", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    ))
    .collect();

    let mut files = 0;
    for (i, cmd) in commands.iter().enumerate() {
        let mut reference: Option<Vec<u8>> = None;
        for (j, threads) in ["1", "2", "8", "auto", "1"].iter().enumerate() {
            let path = dir.path().join(format!("out_{i}_{j}"));
            let mut args = cmd.clone();
            args.extend(["--threads".into(), threads.to_string(), "--output".into(), path.to_str().unwrap().into()]);
            run_cli(bin, &args)?;
            let bytes = std::fs::read(Path::new(&path)).map_err(err)?;
            files += 1;
            match &reference {
                None => reference = Some(bytes),
                Some(r) => ensure(*r == bytes, || format!("{cmd:?} differs with --threads {threads}"))?,
            }
        }
    }
    Ok(format!("{} commands, {files} files byte-identical across thread counts and reruns", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("exact order-statistic identities", exact_identities),
        ("quadrature vs Monte Carlo", quadrature_vs_mc),
        ("limits of the scaled moments", corollary_limits),
        ("pointwise convergence rate", pointwise_convergence),
        ("Cauchy robustness", cauchy_robustness),
        ("alpha sweep", alpha_sweeps),
        ("adaptive Cauchy tails", adaptive_cauchy),
        ("bivariate product norm", bivariate),
        ("invariant suite", invariants),
        ("CLI determinism", cli_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
