//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge: estimated error {achieved:e} exceeds requested {requested:e} \
         after {intervals} subintervals (value {value})"
    )]
    NotConverged { value: f64, achieved: f64, requested: f64, intervals: usize },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel, max_intervals: 4000 }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::relative(1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, QuadratureError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { at: x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral, QuadratureError> {
    integrate_breakpoints(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// subintervals delimited by `points` (which must be strictly increasing).
/// Breakpoints let the caller place panels where the integrand concentrates.
pub fn integrate_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Integral, QuadratureError> {
    if points.len() < 2 {
        return Err(QuadratureError::BadInterval {
            a: points.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(QuadratureError::BadInterval { a: w[0], b: w[1] });
        }
    }

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(kronrod15(&f, w[0], w[1])?);
    }
    let mut evaluations = 15 * heap.len();

    loop {
        let (value, error) = totals(&heap);
        let target = tol.target(value);
        if error <= target {
            return Ok(Integral { value, abs_error: error, evaluations, intervals: heap.len() });
        }
        if heap.len() >= tol.max_intervals {
            return Err(QuadratureError::NotConverged {
                value,
                achieved: error,
                requested: target,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval cannot be split further in floating point
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(QuadratureError::NotConverged {
                value,
                achieved: error,
                requested: tol.target(value),
                intervals: heap.len(),
            });
        }
        heap.push(kronrod15(&f, worst.a, mid)?);
        heap.push(kronrod15(&f, mid, worst.b)?);
        evaluations += 30;
    }
}

// Sums panels in left-to-right order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::relative(1e-12)).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn peaked_integrand_adapts() {
        // ∫_0^1 50 / (1 + (50 x)^2) dx = atan(50)
        let r = integrate(|x| 50.0 / (1.0 + 2500.0 * x * x), 0.0, 1.0, Tolerance::relative(1e-12)).unwrap();
        assert!((r.value - 50f64.atan()).abs() < 1e-11);
        assert!(r.intervals > 1);
    }

    #[test]
    fn endpoint_singularity_integrable() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, Tolerance::relative(1e-9)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn breakpoints_capture_narrow_mass() {
        // all the mass of exp(-1e6 x) sits within 1e-5 of the origin
        let k = 1e6;
        let pts = [0.0, 1e-6, 1e-5, 1e-4, 1.0];
        let r = integrate_breakpoints(|x| k * (-k * x).exp(), &pts, Tolerance::relative(1e-12)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, Tolerance::default()).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }) || matches!(err, QuadratureError::NotConverged { .. }));
    }

    #[test]
    fn budget_exhaustion_reports_achieved_error() {
        let tol = Tolerance { abs: 0.0, rel: 1e-15, max_intervals: 3 };
        let err = integrate(|x| (1.0 / (x + 1e-3)).sin(), 0.0, 1.0, tol).unwrap_err();
        match err {
            QuadratureError::NotConverged { achieved, requested, intervals, .. } => {
                assert!(achieved > requested);
                assert!(intervals >= 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
