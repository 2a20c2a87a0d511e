//! Bracketed scalar root finding (Brent's method).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("no convergence after {iterations} iterations; last bracket [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },
    #[error("function returned a non-finite value at {at}")]
    NonFinite { at: f64 },
}

/// Maximum iterations used by the distribution inverses.
pub const MAX_ITERATIONS: usize = 200;

/// Finds a zero of `f` in `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
/// Iteration stops when the bracket is narrower than
/// `xtol + 4·eps·|x|`, or when `f` vanishes exactly.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() {
        return Err(RootError::NonFinite { at: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NonFinite { at: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when a == c
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NonFinite { at: b });
        }
    }
    Err(RootError::NoConvergence { lo: b.min(c), hi: b.max(c), iterations: max_iter })
}

/// Doubles `hi` (starting from `start > lo`) until `f(hi) >= 0`, for
/// nondecreasing `f` with `f(lo) <= 0`. Returns `None` if no sign change is
/// found before overflow.
pub fn expand_upper<F>(mut f: F, lo: f64, start: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut width = (start - lo).max(f64::MIN_POSITIVE);
    loop {
        let hi = lo + width;
        if !hi.is_finite() {
            return None;
        }
        if f(hi) >= 0.0 {
            return Some(hi);
        }
        width *= 2.0;
    }
}
