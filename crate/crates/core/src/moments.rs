//! Moments of the first order statistic, by quadrature and by simulation.
//!
//! For a non-negative variable with density `g`, cdf `G` and quantile `Q`,
//! the minimum `X(1)` of `N` draws satisfies
//!
//! ```text
//! (N+1)   E[X(1)]   = ∫₀¹ Q'(z) δ_N(z) dz,            δ_N(z) = (N+1)(1-z)^N
//! (N+1)² E[X(1)²]   = (N+1)² ∫₀¹ 2 Q(z) Q'(z) (1-z)^N dz
//! ```
//!
//! with `Q'(z) = 1 / g(Q(z))`. As `N` grows the weight concentrates at
//! zero and the scaled moments tend to `1/g(0)` and `2/g(0)²`.
//!
//! Both integrals are evaluated after the substitution
//! `z = 1 - exp(-t / (N+1))`, which turns `δ_N(z) dz` into `e^{-t} dt` on
//! `[0, ∞)`. The range is covered by consecutive panels until a panel's
//! contribution is negligible; the last panel's size is reported as the
//! truncation estimate.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::{Distribution, DistributionError, FoldedDistribution};
use crate::quadrature::{integrate, integrate_breakpoints, QuadratureError, Tolerance};
use crate::rng::{self, StreamRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("{0} is not supported on [0, inf); fold it at a point instead")]
    NotNonNegative(String),
    #[error("density at the origin is {0}")]
    NoMassAtOrigin(f64),
    #[error("moment integral diverges or converges too slowly at N = {n}: tail panel {tail:e} after t = {t}")]
    Divergent { n: u64, tail: f64, t: f64 },
    #[error("N must be at least 1")]
    ZeroN,
    #[error("at least {needed} trials are required, got {got}")]
    TooFewTrials { needed: usize, got: usize },
    #[error("N list must be non-empty and strictly ascending")]
    BadNList,
}

/// A non-negative law whose first order statistic is studied.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Law {
    /// A distribution supported on `[0, ∞)` used as is.
    Raw { distribution: Distribution },
    /// `|X - center|`.
    Folded { folded: FoldedDistribution },
}

impl Law {
    pub fn raw(distribution: Distribution) -> Result<Self, MomentError> {
        if distribution.support().0 != 0.0 {
            return Err(MomentError::NotNonNegative(distribution.to_string()));
        }
        Ok(Self::Raw { distribution })
    }

    pub fn folded(base: Distribution, center: f64) -> Result<Self, MomentError> {
        Ok(Self::Folded { folded: FoldedDistribution::new(base, center)? })
    }

    pub fn density(&self, y: f64) -> f64 {
        match self {
            Self::Raw { distribution } => distribution.pdf(y),
            Self::Folded { folded } => folded.pdf(y),
        }
    }

    /// `g(0)`, the right limit of the density at the origin.
    pub fn density_at_zero(&self) -> f64 {
        self.density(0.0)
    }

    fn quantile(&self, z: f64) -> Result<f64, DistributionError> {
        match self {
            Self::Raw { distribution } => distribution.quantile(z),
            Self::Folded { folded } => folded.quantile(z),
        }
    }

    fn upper_quantile(&self, p: f64) -> Result<f64, DistributionError> {
        match self {
            Self::Raw { distribution } => distribution.upper_quantile(p),
            Self::Folded { folded } => folded.upper_quantile(p),
        }
    }

    /// Quantile at `z = 1 - p`, choosing whichever argument is accurate.
    fn quantile_split(&self, z: f64, p: f64) -> Result<f64, DistributionError> {
        if z <= 0.5 {
            self.quantile(z)
        } else {
            self.upper_quantile(p)
        }
    }

    fn draw(&self, rng: &mut StreamRng) -> f64 {
        match self {
            Self::Raw { distribution } => distribution.draw(rng),
            Self::Folded { folded } => folded.draw(rng),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Raw { distribution } => distribution.to_string(),
            Self::Folded { folded } => format!("|{} - {}|", folded.base, folded.center),
        }
    }

    /// `1/g(0)`, `2/g(0)²`, `1/g(0)²`; infinite when `g(0) = 0`.
    fn limits(&self) -> Result<(f64, f64, f64), MomentError> {
        let g0 = self.density_at_zero();
        if !(g0 >= 0.0) || !g0.is_finite() {
            return Err(MomentError::NoMassAtOrigin(g0));
        }
        Ok((1.0 / g0, 2.0 / (g0 * g0), 1.0 / (g0 * g0)))
    }
}

/// `δ_N(z) = (N+1)(1-z)^N`, evaluated in log space.
pub fn delta_weight(n: u64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if z >= 1.0 {
        return 0.0;
    }
    if z == 0.0 {
        return n as f64 + 1.0;
    }
    ((n as f64 + 1.0).ln() + n as f64 * (-z).ln_1p()).exp()
}

/// `∫_η^1 δ_N = (1-η)^{N+1}`.
pub fn dirac_tail_mass(n: u64, eta: f64) -> f64 {
    ((n as f64 + 1.0) * (-eta).ln_1p()).exp()
}

/// Quadrature of `δ_N` over `[0, 1]` in the original variable, with
/// breakpoints on the `1/(N+1)` scale where the weight lives.
pub fn delta_normalization(n: u64) -> Result<f64, MomentError> {
    let scale = 1.0 / (n as f64 + 1.0);
    let mut points = vec![0.0];
    let mut k = 0.125;
    while k * scale < 1.0 {
        points.push(k * scale);
        k *= 2.0;
    }
    points.push(1.0);
    let tol = Tolerance::relative(1e-13).with_abs(1e-14);
    Ok(integrate_breakpoints(|z| delta_weight(n, z), &points, tol)?.value)
}

/// `∫₀¹ H(z) δ_N(z) dz` for a function continuous at zero.
pub fn dirac_action<H: Fn(f64) -> f64>(h: H, n: u64) -> Result<f64, MomentError> {
    let n1 = n as f64 + 1.0;
    Ok(exp_weighted(|t| h(-(-t / n1).exp_m1()), n, Tolerance::relative(1e-13))?.value)
}

/// A quadrature value with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegral {
    pub value: f64,
    /// Estimated quadrature error on the covered range.
    pub abs_error: f64,
    /// Size of the last panel, bounding what lies beyond it.
    pub truncation: f64,
}

const PANEL: f64 = 40.0;
const MAX_PANELS: usize = 60;

// ∫₀^∞ f(t) e^{-t} dt, panel by panel.
fn exp_weighted<F: Fn(f64) -> f64>(f: F, n: u64, tol: Tolerance) -> Result<MomentIntegral, MomentError> {
    let integrand = |t: f64| f(t) * (-t).exp();
    let first = integrate(&integrand, 0.0, PANEL, tol)?;
    let mut value = first.value;
    let mut abs_error = first.abs_error;
    let mut truncation = (-PANEL).exp() * f(PANEL).abs();
    for k in 1..MAX_PANELS {
        let (a, b) = (PANEL * k as f64, PANEL * (k + 1) as f64);
        // stop once the weight beyond `a` is below double precision and the
        // integrand no longer outgrows it
        let at_a = integrand(a).abs();
        if at_a <= 1e-3 * tol.rel * value.abs() && at_a.is_finite() {
            truncation = at_a;
            return Ok(MomentIntegral { value, abs_error, truncation });
        }
        let panel = integrate(&integrand, a, b, Tolerance { abs: tol.rel * value.abs(), ..tol })?;
        value += panel.value;
        abs_error += panel.abs_error;
        truncation = panel.value.abs();
    }
    Err(MomentError::Divergent { n, tail: truncation, t: PANEL * MAX_PANELS as f64 })
}

/// Tolerance used by the moment quadratures (relative).
pub const DEFAULT_RTOL: f64 = 1e-12;

fn check_n(n: u64) -> Result<(), MomentError> {
    if n == 0 {
        Err(MomentError::ZeroN)
    } else {
        Ok(())
    }
}

// Evaluates `body(Q(z), Q'(z))` at the substituted point, turning inversion
// failures into NaN so that the quadrature reports them.
fn substituted<'a, F>(law: &'a Law, n1: f64, body: F) -> impl Fn(f64) -> f64 + 'a
where
    F: Fn(f64, f64) -> f64 + 'a,
{
    move |t: f64| {
        let p = (-t / n1).exp();
        let z = -(-t / n1).exp_m1();
        if p <= 0.0 {
            return 0.0;
        }
        match law.quantile_split(z, p) {
            Ok(q) => body(q, 1.0 / law.density(q)),
            Err(_) => f64::NAN,
        }
    }
}

/// `(N+1) E[X(1)]` with its error budget.
pub fn first_moment_detailed(law: &Law, n: u64, rtol: f64) -> Result<MomentIntegral, MomentError> {
    check_n(n)?;
    let n1 = n as f64 + 1.0;
    exp_weighted(substituted(law, n1, |_, dq| dq), n, Tolerance::relative(rtol))
}

/// `(N+1)² E[X(1)²]` with its error budget.
pub fn second_moment_detailed(law: &Law, n: u64, rtol: f64) -> Result<MomentIntegral, MomentError> {
    check_n(n)?;
    let n1 = n as f64 + 1.0;
    let inner = exp_weighted(substituted(law, n1, |q, dq| 2.0 * q * dq), n, Tolerance::relative(rtol))?;
    Ok(MomentIntegral {
        value: n1 * inner.value,
        abs_error: n1 * inner.abs_error,
        truncation: n1 * inner.truncation,
    })
}

/// `(N+1) E[X(1)]` by quadrature.
pub fn first_moment_quadrature(law: &Law, n: u64) -> Result<f64, MomentError> {
    Ok(first_moment_detailed(law, n, DEFAULT_RTOL)?.value)
}

/// `(N+1)² E[X(1)²]` by quadrature.
pub fn second_moment_quadrature(law: &Law, n: u64) -> Result<f64, MomentError> {
    Ok(second_moment_detailed(law, n, DEFAULT_RTOL)?.value)
}

/// `(N+1)² E[X(1)²]` through the integrated-by-parts form
/// `((N+1)/(N+2)) ∫ (Q²)'' δ_{N+1}`, with `(Q²)'' = (2 Q Q')'` taken by
/// central differences. Only meant as a cross-check (about 1e-6 relative).
pub fn second_moment_by_parts(law: &Law, n: u64) -> Result<f64, MomentError> {
    check_n(n)?;
    let n2 = n as f64 + 2.0;
    let phi = |z: f64, p: f64| -> f64 {
        match law.quantile_split(z, p) {
            Ok(q) => 2.0 * q / law.density(q),
            Err(_) => f64::NAN,
        }
    };
    let second = |t: f64| {
        let p = (-t / n2).exp();
        let z = -(-t / n2).exp_m1();
        if p <= 0.0 {
            return 0.0;
        }
        let h = 1e-4 * z.min(p);
        (phi(z + h, p - h) - phi(z - h, p + h)) / (2.0 * h)
    };
    let integral = exp_weighted(second, n + 1, Tolerance::relative(1e-9))?;
    Ok((n as f64 + 1.0) / n2 * integral.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "quad",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "mc",
        }
    }
}

/// Scaled first-order-statistic moments at one `N`, beside their limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: u64,
    pub method: Method,
    pub first_scaled: f64,
    pub second_scaled: f64,
    pub var_scaled: f64,
    pub limit_first: f64,
    pub limit_second: f64,
    pub limit_var: f64,
    /// `|first_scaled - limit_first|`
    pub deviation: f64,
    pub se_first: Option<f64>,
    pub se_second: Option<f64>,
}

impl MomentReport {
    fn new(
        n: u64,
        method: Method,
        first: f64,
        second: f64,
        limits: (f64, f64, f64),
        se: Option<(f64, f64)>,
    ) -> Self {
        Self {
            n,
            method,
            first_scaled: first,
            second_scaled: second,
            var_scaled: second - first * first,
            limit_first: limits.0,
            limit_second: limits.1,
            limit_var: limits.2,
            deviation: (first - limits.0).abs(),
            se_first: se.map(|s| s.0),
            se_second: se.map(|s| s.1),
        }
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "N",
        "method",
        "first_scaled",
        "second_scaled",
        "var_scaled",
        "limit_first",
        "limit_second",
        "limit_var",
        "deviation",
        "se_first",
        "se_second",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.method.as_str().to_string(),
            fmt_f64(self.first_scaled),
            fmt_f64(self.second_scaled),
            fmt_f64(self.var_scaled),
            fmt_f64(self.limit_first),
            fmt_f64(self.limit_second),
            fmt_f64(self.limit_var),
            fmt_f64(self.deviation),
            opt(self.se_first),
            opt(self.se_second),
        ]
    }
}

/// Shortest decimal that round-trips.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Quadrature moments at one `N`.
pub fn quadrature_report(law: &Law, n: u64) -> Result<MomentReport, MomentError> {
    let limits = law.limits()?;
    let first = first_moment_quadrature(law, n)?;
    let second = second_moment_quadrature(law, n)?;
    Ok(MomentReport::new(n, Method::Quadrature, first, second, limits, None))
}

/// Brute-force moments: `trials` independent samples of size `N`, each
/// reduced to its minimum. Trial `i` draws from stream `i` of `seed`.
pub fn mc_order_stat_moments(law: &Law, n: u64, trials: usize, seed: u64) -> Result<MomentReport, MomentError> {
    check_n(n)?;
    if trials < 100 {
        return Err(MomentError::TooFewTrials { needed: 100, got: trials });
    }
    let limits = law.limits()?;
    let minima: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i);
            (0..n).map(|_| law.draw(&mut r)).fold(f64::INFINITY, f64::min)
        })
        .collect();

    let t = trials as f64;
    let n1 = n as f64 + 1.0;
    let scaled1: Vec<f64> = minima.iter().map(|m| n1 * m).collect();
    let scaled2: Vec<f64> = scaled1.iter().map(|s| s * s).collect();
    let (m1, se1) = mean_and_se(&scaled1);
    let (m2, se2) = mean_and_se(&scaled2);
    debug_assert!(t > 1.0);
    Ok(MomentReport::new(n, Method::MonteCarlo, m1, m2, limits, Some((se1, se2))))
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Quadrature moments for each `N`, for inspecting the approach to the limits.
pub fn limit_convergence_table(law: &Law, n_list: &[u64]) -> Result<Vec<MomentReport>, MomentError> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MomentError::BadNList);
    }
    n_list.iter().map(|&n| quadrature_report(law, n)).collect()
}

/// Exact scaled moments for the laws where the minimum has a closed form.
pub fn closed_form_report(law: &Law, n: u64) -> Option<MomentReport> {
    let Law::Raw { distribution } = law else { return None };
    let limits = law.limits().ok()?;
    let nf = n as f64;
    let n1 = nf + 1.0;
    use crate::distributions::Kind;
    let (first, second) = match distribution.kind() {
        // X(1) ~ b · Beta(1, N)
        Kind::Uniform { a, b } if *a == 0.0 => (b * 1.0, b * b * 2.0 * n1 / (nf + 2.0)),
        // X(1) ~ Exponential(N λ)
        Kind::Exponential { rate } => {
            let r = rate * nf;
            (n1 / r, n1 * n1 * 2.0 / (r * r))
        }
        _ => return None,
    };
    Some(MomentReport::new(n, Method::ClosedForm, first, second, limits, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn uniform() -> Law {
        Law::raw(Distribution::uniform(0.0, 1.0).unwrap()).unwrap()
    }

    fn exp1() -> Law {
        Law::raw(Distribution::exponential(1.0).unwrap()).unwrap()
    }

    #[test]
    fn delta_weight_examples() {
        assert_eq!(delta_weight(0, 0.3), 1.0);
        assert_eq!(delta_weight(7, 0.0), 8.0);
        let w = delta_weight(1_000_000, 0.5);
        let expected = ((1e6f64 + 1.0).ln() + 1e6 * 0.5f64.ln()).exp();
        assert_eq!(w, expected);
        assert_eq!(w, 0.0); // underflows gracefully instead of producing NaN
        let w = delta_weight(1_000_000, 1e-6);
        assert!((w - 1_000_001.0 * (-1.0f64).exp()).abs() / w < 1e-6);
    }

    #[test]
    fn tail_mass_examples() {
        assert!((dirac_tail_mass(10, 0.5) - 4.8828125e-4).abs() < 1e-18);
        let masses: Vec<f64> = [10, 100, 1000].iter().map(|&n| dirac_tail_mass(n, 0.1)).collect();
        assert!(masses[0] > masses[1] && masses[1] > masses[2]);
        assert!((dirac_tail_mass(50, 1e-12) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_integrates_to_one() {
        for n in [1, 10, 1000, 1_000_000] {
            let total = delta_normalization(n).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "N={n}: {total}");
        }
    }

    #[test]
    fn raw_law_needs_nonnegative_support() {
        assert!(Law::raw(Distribution::gaussian(0.0, 1.0).unwrap()).is_err());
        assert!(Law::raw(Distribution::uniform(0.5, 1.0).unwrap()).is_err());
        assert!(Law::raw(Distribution::beta(1.0, 4.0).unwrap()).is_ok());
    }

    #[test]
    fn vanishing_density_at_origin() {
        // oracle: E[X(1)] = ∫ x N (1-F)^(N-1) f dx in the original variable
        let law = Law::raw(Distribution::beta(2.0, 3.0).unwrap()).unwrap();
        let r = quadrature_report(&law, 20).unwrap();
        assert!(r.limit_first.is_infinite());
        let d = Distribution::beta(2.0, 3.0).unwrap();
        let n = 20.0;
        let oracle = crate::quadrature::integrate(
            |x| x * n * d.sf(x).powf(n - 1.0) * d.pdf(x),
            0.0,
            1.0,
            Tolerance::relative(1e-12),
        )
        .unwrap()
        .value;
        assert!((r.first_scaled - 21.0 * oracle).abs() < 1e-9 * r.first_scaled, "{} vs {}", r.first_scaled, 21.0 * oracle);
    }

    #[test]
    fn uniform_first_moment_is_one() {
        for n in [1, 10, 1000] {
            let v = first_moment_quadrature(&uniform(), n).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "N={n}: {v}");
        }
    }

    #[test]
    fn uniform_second_moment() {
        let v = second_moment_quadrature(&uniform(), 8).unwrap();
        assert!((v - 1.8).abs() < 1e-8, "{v}");
    }

    #[test]
    fn exponential_moments() {
        let v = first_moment_quadrature(&exp1(), 10).unwrap();
        assert!((v - 1.1).abs() < 1e-8, "{v}");
        let v = second_moment_quadrature(&exp1(), 10).unwrap();
        assert!((v - 2.42).abs() < 1e-8, "{v}");
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for law in [uniform(), exp1(), Law::raw(Distribution::exponential(3.0).unwrap()).unwrap()] {
            for n in [2, 25, 400] {
                let exact = closed_form_report(&law, n).unwrap();
                let quad = quadrature_report(&law, n).unwrap();
                assert!((exact.first_scaled - quad.first_scaled).abs() < 1e-10 * exact.first_scaled);
                assert!((exact.second_scaled - quad.second_scaled).abs() < 1e-10 * exact.second_scaled);
            }
        }
    }

    #[test]
    fn folded_cauchy_close_to_limit() {
        let law = Law::folded(Distribution::cauchy(0.0, 1.0).unwrap(), 0.0).unwrap();
        let first = first_moment_quadrature(&law, 10_000).unwrap();
        assert!((first / (PI / 2.0) - 1.0).abs() < 0.02, "{first}");
        let second = second_moment_quadrature(&law, 10_000).unwrap();
        assert!((second / (PI * PI / 2.0) - 1.0).abs() < 0.04, "{second}");
    }

    #[test]
    fn folded_cauchy_with_one_draw_diverges() {
        // E|C| is infinite
        let law = Law::folded(Distribution::cauchy(0.0, 1.0).unwrap(), 0.0).unwrap();
        assert!(first_moment_quadrature(&law, 1).is_err());
    }

    #[test]
    fn by_parts_form_agrees() {
        let laws = [
            uniform(),
            exp1(),
            Law::folded(Distribution::cauchy(0.0, 1.0).unwrap(), 0.0).unwrap(),
            Law::folded(Distribution::gaussian(0.0, 1.0).unwrap(), 1.0).unwrap(),
        ];
        for law in laws {
            for n in [5, 50] {
                let direct = second_moment_quadrature(&law, n).unwrap();
                let by_parts = second_moment_by_parts(&law, n).unwrap();
                assert!((direct - by_parts).abs() < 1e-4 * direct, "{}: {direct} vs {by_parts}", law.label());
            }
        }
    }

    #[test]
    fn dirac_action_on_cosine() {
        let errs: Vec<f64> = [10, 100, 1000, 10_000]
            .iter()
            .map(|&n| (dirac_action(f64::cos, n).unwrap() - 1.0).abs())
            .collect();
        // error · N stays bounded (and is in fact ~ 1/N² · N here)
        let c = errs.iter().zip([10.0, 100.0, 1000.0, 10_000.0]).map(|(e, n)| e * n).fold(0.0, f64::max);
        assert!(c < 0.1, "{errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn mc_matches_exact_values() {
        let r = mc_order_stat_moments(&uniform(), 50, 100_000, 17).unwrap();
        assert!((r.first_scaled - 1.0).abs() < 4.0 * r.se_first.unwrap());
        let r = mc_order_stat_moments(&exp1(), 50, 100_000, 18).unwrap();
        assert!((r.first_scaled - 51.0 / 50.0).abs() < 4.0 * r.se_first.unwrap());
        assert!(r.var_scaled > 0.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_order_stat_moments(&exp1(), 20, 500, 3).unwrap();
        let b = mc_order_stat_moments(&exp1(), 20, 500, 3).unwrap();
        assert_eq!(a, b);
        assert!(mc_order_stat_moments(&exp1(), 20, 99, 3).is_err());
    }

    #[test]
    fn raw_exponential_deviation_is_one_over_n() {
        let table = limit_convergence_table(&exp1(), &[10, 100, 1000, 10_000]).unwrap();
        for r in &table {
            assert!((r.deviation - 1.0 / r.n as f64).abs() < 1e-11, "{r:?}");
            assert!((r.var_scaled - (r.second_scaled - r.first_scaled.powi(2))).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_deviation_vanishes() {
        let table = limit_convergence_table(&uniform(), &[3, 30, 300]).unwrap();
        assert!(table.iter().all(|r| r.deviation < 1e-10));
        assert!(limit_convergence_table(&uniform(), &[30, 3]).is_err());
        assert!(limit_convergence_table(&uniform(), &[]).is_err());
    }

    #[test]
    fn csv_fields_line_up() {
        let r = quadrature_report(&uniform(), 4).unwrap();
        assert_eq!(r.csv_fields().len(), MomentReport::CSV_HEADER.len());
        assert_eq!(r.csv_fields()[1], "quad");
        assert_eq!(r.csv_fields()[9], "");
    }
}
