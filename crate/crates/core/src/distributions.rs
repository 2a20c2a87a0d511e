//! Reference distributions: samplers, exact pdf/cdf/quantile evaluation, and
//! the folded transform `Y = |X - x*|`.
//!
//! Every distribution parses from the compact grammar used on the command
//! line: `uniform:a,b`, `exp:lambda`, `gauss:mu,sigma`, `cauchy:x0,gamma`,
//! `beta:a,b` and `gmix` (the fixed five-peak "claw" mixture).

use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::{erfc, erfc_inv};
use thiserror::Error;

use crate::rng::{self, StreamRng};
use crate::roots::{self, RootError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("probability {0} is outside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("quantile inversion failed at z = {z} in bracket [{lo}, {hi}]: {source}")]
    Inversion { z: f64, lo: f64, hi: f64, source: RootError },
    #[error("cannot parse distribution `{0}`; expected uniform:a,b | exp:lambda | gauss:mu,sigma | cauchy:x0,gamma | beta:a,b | gmix")]
    Parse(String),
}

/// Weighted sum of Gaussian components.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    weights: Vec<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64>) -> Result<Self, DistributionError> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != sds.len() {
            return Err(DistributionError::InvalidParameter(
                "mixture needs equally many weights, means and sds".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(DistributionError::InvalidParameter("mixture weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(DistributionError::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        if sds.iter().any(|&s| !(s > 0.0) || !s.is_finite()) || means.iter().any(|m| !m.is_finite()) {
            return Err(DistributionError::InvalidParameter(
                "mixture components need finite means and positive sds".into(),
            ));
        }
        Ok(Self { weights, means, sds })
    }

    /// `0.5 N(0,1) + 0.1 Σ_{i=0}^{4} N(i/2 - 1, 0.1²)`.
    pub fn claw() -> Self {
        let mut weights = vec![0.5];
        let mut means = vec![0.0];
        let mut sds = vec![1.0];
        for i in 0..5 {
            weights.push(0.1);
            means.push(i as f64 / 2.0 - 1.0);
            sds.push(0.1);
        }
        Self { weights, means, sds }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sds(&self) -> &[f64] {
        &self.sds
    }

    fn components(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.sds)
            .map(|((&w, &m), &s)| (w, m, s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Gaussian { mean: f64, sd: f64 },
    Cauchy { location: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    GaussianMixture(Mixture),
}

/// A validated univariate distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    kind: Kind,
}

fn positive(name: &str, v: f64) -> Result<f64, DistributionError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(DistributionError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, DistributionError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DistributionError::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn check_probability(z: f64) -> Result<(), DistributionError> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        Err(DistributionError::ProbabilityOutOfRange(z))
    }
}

fn std_normal_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

fn std_normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / SQRT_2)
}

fn std_normal_sf(u: f64) -> f64 {
    0.5 * erfc(u / SQRT_2)
}

impl Distribution {
    pub fn uniform(a: f64, b: f64) -> Result<Self, DistributionError> {
        finite("a", a)?;
        finite("b", b)?;
        if !(a < b) {
            return Err(DistributionError::InvalidParameter(format!("uniform needs a < b, got [{a}, {b}]")));
        }
        Ok(Self { kind: Kind::Uniform { a, b } })
    }

    pub fn exponential(rate: f64) -> Result<Self, DistributionError> {
        Ok(Self { kind: Kind::Exponential { rate: positive("rate", rate)? } })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self, DistributionError> {
        Ok(Self { kind: Kind::Gaussian { mean: finite("mean", mean)?, sd: positive("sd", sd)? } })
    }

    pub fn cauchy(location: f64, scale: f64) -> Result<Self, DistributionError> {
        Ok(Self {
            kind: Kind::Cauchy { location: finite("location", location)?, scale: positive("scale", scale)? },
        })
    }

    /// Beta(a, b) with `a, b >= 1`.
    pub fn beta(a: f64, b: f64) -> Result<Self, DistributionError> {
        positive("a", a)?;
        positive("b", b)?;
        if a < 1.0 || b < 1.0 {
            return Err(DistributionError::InvalidParameter(format!("beta shapes must be >= 1, got ({a}, {b})")));
        }
        Ok(Self { kind: Kind::Beta { a, b } })
    }

    pub fn mixture(mixture: Mixture) -> Self {
        Self { kind: Kind::GaussianMixture(mixture) }
    }

    /// The fixed claw mixture (`gmix`).
    pub fn claw() -> Self {
        Self::mixture(Mixture::claw())
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Closed interval outside of which the density vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            Kind::Uniform { a, b } => (a, b),
            Kind::Exponential { .. } => (0.0, f64::INFINITY),
            Kind::Beta { .. } => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// A length scale used to seed bracket searches.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            Kind::Uniform { a, b } => b - a,
            Kind::Exponential { rate } => 1.0 / rate,
            Kind::Gaussian { sd, .. } => *sd,
            Kind::Cauchy { scale, .. } => *scale,
            Kind::Beta { .. } => 1.0,
            Kind::GaussianMixture(m) => m.sds.iter().copied().fold(0.0, f64::max),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Kind::Exponential { rate } => {
                if x >= 0.0 {
                    rate * (-rate * x).exp()
                } else {
                    0.0
                }
            }
            Kind::Gaussian { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Kind::Cauchy { location, scale } => {
                let u = (x - location) / scale;
                FRAC_1_PI / (scale * (1.0 + u * u))
            }
            Kind::Beta { a, b } => beta_pdf(*a, *b, x),
            Kind::GaussianMixture(m) => m
                .components()
                .map(|(w, mu, s)| w * std_normal_pdf((x - mu) / s) / s)
                .sum(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Kind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Kind::Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
            Kind::Cauchy { location, scale } => {
                let u = (x - location) / scale;
                if u < 0.0 {
                    (-1.0 / u).atan() * FRAC_1_PI
                } else {
                    0.5 + u.atan() * FRAC_1_PI
                }
            }
            Kind::Beta { a, b } => beta_cdf(*a, *b, x),
            Kind::GaussianMixture(m) => m.components().map(|(w, mu, s)| w * std_normal_cdf((x - mu) / s)).sum(),
        }
    }

    /// Survival function `1 - cdf(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            Kind::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Kind::Gaussian { mean, sd } => std_normal_sf((x - mean) / sd),
            Kind::Cauchy { location, scale } => {
                let u = (x - location) / scale;
                if u > 0.0 {
                    (1.0 / u).atan() * FRAC_1_PI
                } else {
                    0.5 - u.atan() * FRAC_1_PI
                }
            }
            Kind::Beta { a, b } => {
                if x <= 0.0 {
                    1.0
                } else if x >= 1.0 {
                    0.0
                } else if *a == 1.0 {
                    (b * (-x).ln_1p()).exp()
                } else {
                    beta_reg(*b, *a, 1.0 - x)
                }
            }
            Kind::GaussianMixture(m) => m.components().map(|(w, mu, s)| w * std_normal_sf((x - mu) / s)).sum(),
        }
    }

    /// Inverse cdf for `z` in (0, 1).
    ///
    /// Closed forms where available; otherwise Brent inversion of the cdf
    /// (or of the survival function for `z > 1/2`).
    pub fn quantile(&self, z: f64) -> Result<f64, DistributionError> {
        check_probability(z)?;
        if z > 0.5 {
            return self.upper_quantile_unchecked(1.0 - z, z);
        }
        Ok(match &self.kind {
            Kind::Uniform { a, b } => a + z * (b - a),
            Kind::Exponential { rate } => -(-z).ln_1p() / rate,
            Kind::Gaussian { mean, sd } => {
                let u = -SQRT_2 * erfc_inv(2.0 * z);
                let u = u - (std_normal_cdf(u) - z) / std_normal_pdf(u);
                mean + sd * u
            }
            Kind::Cauchy { location, scale } => location - scale / (PI * z).tan(),
            Kind::Beta { a, b } if *a == 1.0 => -((-z).ln_1p() / b).exp_m1(),
            Kind::Beta { a, b } if *b == 1.0 => z.powf(1.0 / a),
            _ => {
                let (lo, hi) = self.bracket();
                invert(|x| self.cdf(x) - z, lo, hi, z)?
            }
        })
    }

    /// The value `x` with `sf(x) = p`, i.e. `quantile(1 - p)` without the
    /// cancellation of forming `1 - p`.
    pub fn upper_quantile(&self, p: f64) -> Result<f64, DistributionError> {
        check_probability(p)?;
        if p > 0.5 {
            return self.quantile(1.0 - p);
        }
        self.upper_quantile_unchecked(p, 1.0 - p)
    }

    fn upper_quantile_unchecked(&self, p: f64, z: f64) -> Result<f64, DistributionError> {
        Ok(match &self.kind {
            Kind::Uniform { a, b } => b - p * (b - a),
            Kind::Exponential { rate } => -p.ln() / rate,
            Kind::Gaussian { mean, sd } => {
                let u = SQRT_2 * erfc_inv(2.0 * p);
                let u = u + (std_normal_sf(u) - p) / std_normal_pdf(u);
                mean + sd * u
            }
            Kind::Cauchy { location, scale } => location + scale / (PI * p).tan(),
            Kind::Beta { a, b } if *a == 1.0 => -(p.ln() / b).exp_m1(),
            _ => {
                let (lo, hi) = self.bracket();
                invert(|x| p - self.sf(x), lo, hi, z)?
            }
        })
    }

    fn bracket(&self) -> (f64, f64) {
        match &self.kind {
            Kind::Beta { .. } => (0.0, 1.0),
            Kind::GaussianMixture(m) => {
                let lo = m.components().map(|(_, mu, s)| mu - 40.0 * s).fold(f64::INFINITY, f64::min);
                let hi = m.components().map(|(_, mu, s)| mu + 40.0 * s).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            _ => self.support(),
        }
    }

    /// One draw from the stream.
    pub fn draw(&self, rng: &mut StreamRng) -> f64 {
        match &self.kind {
            Kind::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Kind::Exponential { rate } => -(1.0 - rng.random::<f64>()).ln() / rate,
            Kind::Gaussian { mean, sd } => mean + sd * rng.sample::<f64, _>(StandardNormal),
            Kind::Cauchy { location, scale } => {
                let u: f64 = rng.sample(Open01);
                location + scale * (PI * (u - 0.5)).tan()
            }
            Kind::Beta { a, b } if *a == 1.0 => {
                let u = 1.0 - rng.random::<f64>();
                -(u.ln() / b).exp_m1()
            }
            Kind::Beta { a, b } => {
                let beta = rand_distr::Beta::new(*a, *b).expect("validated shapes");
                rng.sample(beta)
            }
            Kind::GaussianMixture(m) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = m.weights.len() - 1;
                for (i, w) in m.weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                m.means[pick] + m.sds[pick] * rng.sample::<f64, _>(StandardNormal)
            }
        }
    }

    /// `n` independent draws from stream `stream_index` of `seed`.
    pub fn sample(&self, n: usize, seed: u64, stream_index: u64) -> Sample {
        let mut rng = rng::stream(seed, stream_index);
        let values = (0..n).map(|_| self.draw(&mut rng)).collect();
        Sample {
            values,
            provenance: Provenance::Drawn { distribution: self.to_string(), seed, stream: stream_index },
        }
    }

    /// Population mean, when it exists.
    pub fn mean(&self) -> Option<f64> {
        match &self.kind {
            Kind::Uniform { a, b } => Some(0.5 * (a + b)),
            Kind::Exponential { rate } => Some(1.0 / rate),
            Kind::Gaussian { mean, .. } => Some(*mean),
            Kind::Cauchy { .. } => None,
            Kind::Beta { a, b } => Some(a / (a + b)),
            Kind::GaussianMixture(m) => Some(m.components().map(|(w, mu, _)| w * mu).sum()),
        }
    }
}

fn beta_pdf(a: f64, b: f64, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    if a == 1.0 {
        return b * (1.0 - x).powf(b - 1.0);
    }
    if b == 1.0 {
        return a * x.powf(a - 1.0);
    }
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(a, b)).exp()
}

fn beta_cdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if a == 1.0 {
        -(b * (-x).ln_1p()).exp_m1()
    } else if b == 1.0 {
        x.powf(a)
    } else {
        beta_reg(a, b, x)
    }
}

fn invert<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, z: f64) -> Result<f64, DistributionError> {
    roots::brent(f, lo, hi, 0.0, roots::MAX_ITERATIONS)
        .map_err(|source| DistributionError::Inversion { z, lo, hi, source })
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Kind::Exponential { rate } => write!(f, "exp:{rate}"),
            Kind::Gaussian { mean, sd } => write!(f, "gauss:{mean},{sd}"),
            Kind::Cauchy { location, scale } => write!(f, "cauchy:{location},{scale}"),
            Kind::Beta { a, b } => write!(f, "beta:{a},{b}"),
            Kind::GaussianMixture(m) if *m == Mixture::claw() => write!(f, "gmix"),
            Kind::GaussianMixture(m) => write!(f, "mixture({} components)", m.weights.len()),
        }
    }
}

impl FromStr for Distribution {
    type Err = DistributionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "gmix" {
            return Ok(Self::claw());
        }
        let bad = || DistributionError::Parse(s.to_string());
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let params = args
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        match (name.trim(), params.as_slice()) {
            ("uniform", &[a, b]) => Self::uniform(a, b),
            ("exp", &[rate]) => Self::exponential(rate),
            ("gauss", &[mu, sigma]) => Self::gaussian(mu, sigma),
            ("cauchy", &[x0, gamma]) => Self::cauchy(x0, gamma),
            ("beta", &[a, b]) => Self::beta(a, b),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Distribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where a sample came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Drawn { distribution: String, seed: u64, stream: u64 },
    File { path: String },
    Inline,
}

/// An ordered collection of observations plus where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl Sample {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values, provenance: Provenance::Inline }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Law of `Y = |X - center|` for `X` drawn from `base`.
///
/// The density is `g(y) = f(center + y) + f(center - y)` on `y >= 0`, so
/// `g(0) = 2 f(center)` whenever `f` is continuous at the center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldedDistribution {
    pub base: Distribution,
    pub center: f64,
}

impl FoldedDistribution {
    pub fn new(base: Distribution, center: f64) -> Result<Self, DistributionError> {
        finite("center", center)?;
        Ok(Self { base, center })
    }

    // Exponential folded at a positive point has closed forms for g, G and Q.
    fn exponential_rate(&self) -> Option<f64> {
        match self.base.kind {
            Kind::Exponential { rate } if self.center > 0.0 => Some(rate),
            _ => None,
        }
    }

    pub fn pdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        let c = self.center;
        if let Some(rate) = self.exponential_rate() {
            return if y <= c {
                2.0 * rate * (-rate * c).exp() * (rate * y).cosh()
            } else {
                rate * (-rate * (c + y)).exp()
            };
        }
        self.base.pdf(c + y) + self.base.pdf(c - y)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let c = self.center;
        if let Some(rate) = self.exponential_rate() {
            return if y <= c {
                2.0 * (-rate * c).exp() * (rate * y).sinh()
            } else {
                -(-rate * (c + y)).exp_m1()
            };
        }
        // difference of whichever tail function is small at the center
        if self.base.cdf(c) > 0.5 {
            (self.base.sf(c - y) - self.base.sf(c + y)).max(0.0)
        } else {
            (self.base.cdf(c + y) - self.base.cdf(c - y)).max(0.0)
        }
    }

    /// `P(Y > y)`, accurate in the upper tail.
    pub fn sf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        let c = self.center;
        if let Some(rate) = self.exponential_rate() {
            return if y <= c { 1.0 - self.cdf(y) } else { (-rate * (c + y)).exp() };
        }
        self.base.sf(c + y) + self.base.cdf(c - y)
    }

    /// Inverse of the folded cdf on (0, 1).
    pub fn quantile(&self, z: f64) -> Result<f64, DistributionError> {
        check_probability(z)?;
        if z > 0.5 {
            return self.upper_quantile_inner(1.0 - z, z);
        }
        if let Some(rate) = self.exponential_rate() {
            let c = self.center;
            let z_splice = -(-2.0 * rate * c).exp_m1();
            return Ok(if z <= z_splice {
                (z * (rate * c).exp() / 2.0).asinh() / rate
            } else {
                -(c + (-z).ln_1p() / rate)
            });
        }
        let hi = self.upper_bracket(|y| self.cdf(y) - z)?;
        invert(|y| self.cdf(y) - z, 0.0, hi, z)
    }

    /// The value `y` with `sf(y) = p`.
    pub fn upper_quantile(&self, p: f64) -> Result<f64, DistributionError> {
        check_probability(p)?;
        if p > 0.5 {
            return self.quantile(1.0 - p);
        }
        self.upper_quantile_inner(p, 1.0 - p)
    }

    fn upper_quantile_inner(&self, p: f64, z: f64) -> Result<f64, DistributionError> {
        if let Some(rate) = self.exponential_rate() {
            let c = self.center;
            return Ok(if p >= (-2.0 * rate * c).exp() {
                ((1.0 - p) * (rate * c).exp() / 2.0).asinh() / rate
            } else {
                -(c + p.ln() / rate)
            });
        }
        let hi = self.upper_bracket(|y| p - self.sf(y))?;
        invert(|y| p - self.sf(y), 0.0, hi, z)
    }

    fn upper_bracket<F: FnMut(f64) -> f64>(&self, f: F) -> Result<f64, DistributionError> {
        let start = self.base.scale().max(f64::MIN_POSITIVE);
        roots::expand_upper(f, 0.0, start).ok_or_else(|| DistributionError::Inversion {
            z: f64::NAN,
            lo: 0.0,
            hi: f64::INFINITY,
            source: RootError::NoConvergence { lo: 0.0, hi: f64::INFINITY, iterations: 0 },
        })
    }

    pub fn draw(&self, rng: &mut StreamRng) -> f64 {
        (self.base.draw(rng) - self.center).abs()
    }
}
