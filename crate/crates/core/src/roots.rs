//! Bracketing root finders for scalar functions.

use crate::error::{Error, Result};

/// Bisection on a sign change of `f` over `[lo, hi]`.
///
/// Runs until the bracket stops shrinking in floating point (or `abs_tol` is
/// reached) and returns the endpoint with the smaller `|f|`. An exact zero at
/// an endpoint is returned as is.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, abs_tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket { lo: a, hi: b });
    }
    let mut fb = fb;
    for _ in 0..400 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b || b - a <= abs_tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Sub-intervals `[x_i, x_{i+1}]` of a uniform scan on which `f` changes sign
/// (an exact zero at a scan point opens a bracket on its right).
pub fn sign_change_brackets(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if steps == 0 || hi <= lo {
        return out;
    }
    let at = |i: usize| lo + (hi - lo) * (i as f64 / steps as f64);
    let mut x0 = at(0);
    let mut f0 = f(x0);
    for i in 1..=steps {
        let x1 = at(i);
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push((x0, x0));
        } else if f1 != 0.0 && f0.signum() != f1.signum() {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        out.push((x0, x0));
    }
    out
}
