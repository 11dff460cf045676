//! Transcendental eigenvalue equations for `n = 2` and `n = 3`.
//!
//! For `n = 2` the negative eigenvalue is `-τ*²` with `τ* = 4 tanh(τ*/2)`
//! and the positive ones solve `τ = 4 tan(τ/2)`. For `n = 3` the two negative
//! eigenvalues are `-τ_g² < -τ_f²` from the maps `f`, `g` below and the
//! positive ones are the zeros of an odd trigonometric polynomial.

use crate::error::{Error, Result};
use crate::roots::{bisect, sign_change_brackets};
use std::f64::consts::PI;

/// `τ - 4 tanh(τ/2)`.
pub fn tanh_equation_n2(tau: f64) -> f64 {
    tau - 4.0 * (tau / 2.0).tanh()
}

/// `τ cos(τ/2) - 4 sin(τ/2)`, the pole-free form of `τ = 4 tan(τ/2)`.
pub fn tan_equation_n2(tau: f64) -> f64 {
    let (s, c) = (tau / 2.0).sin_cos();
    tau * c - 4.0 * s
}

/// `f(τ) = τ - (τ+12) tanh(τ/3) - e^{τ/3} (τ + (τ-12) tanh(τ/3))`.
pub fn f_n3(tau: f64) -> f64 {
    let t = (tau / 3.0).tanh();
    tau - (tau + 12.0) * t - (tau / 3.0).exp() * (tau + (tau - 12.0) * t)
}

/// `g(τ) = τ - (τ+12) tanh(τ/3) + e^{τ/3} (τ + (τ-12) tanh(τ/3))`.
pub fn g_n3(tau: f64) -> f64 {
    let t = (tau / 3.0).tanh();
    tau - (tau + 12.0) * t + (tau / 3.0).exp() * (tau + (tau - 12.0) * t)
}

/// `108 sin(τ/3) - 36 sin τ + 12τ cos τ - 12τ cos(τ/3) + τ² sin τ`, whose
/// positive zeros `τₖ` give the positive eigenvalues `τₖ²` for `n = 3`.
pub fn closed_form_positive_equation_n3(tau: f64) -> f64 {
    let (s3, c3) = (tau / 3.0).sin_cos();
    let (s, c) = tau.sin_cos();
    108.0 * s3 - 36.0 * s + 12.0 * tau * c - 12.0 * tau * c3 + tau * tau * s
}

/// Unique positive root on `[lo, hi]`, checked by a fine sign-change scan.
fn unique_root(f: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64) -> Result<f64> {
    let brackets = sign_change_brackets(f, lo, hi, 20_000);
    match brackets.as_slice() {
        [(a, b)] => bisect(f, *a, *b, 0.0),
        [] => Err(Error::NoBracket { lo, hi }),
        _ => Err(Error::InvalidArgument(format!(
            "expected one root in [{lo}, {hi}], found {}",
            brackets.len()
        ))),
    }
}

/// Positive `τ` values of the negative eigenvalues `λ = -τ²`.
///
/// `n = 2` gives `[τ*]`; `n = 3` gives `[τ_f, τ_g]` with `τ_f < τ_g`.
pub fn closed_form_negative_roots(n: usize) -> Result<Vec<f64>> {
    match n {
        2 => Ok(vec![unique_root(tanh_equation_n2, 0.1, 20.0)?]),
        3 => {
            let tf = unique_root(f_n3, 0.1, 50.0)?;
            let tg = unique_root(g_n3, 0.1, 50.0)?;
            Ok(vec![tf, tg])
        }
        _ => Err(Error::InvalidArgument(format!("closed forms exist for n = 2, 3 only, got {n}"))),
    }
}

/// Negative eigenvalues from the closed forms, ascending.
pub fn closed_form_negative_eigenvalues(n: usize) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = closed_form_negative_roots(n)?.iter().map(|t| -t * t).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Roots of `τ = 4 tan(τ/2)` in `((2k-3)π, (2k-1)π)`, `k = 2, 3, …`, up to `tau_max`.
pub fn tan_roots_n2(tau_max: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut k = 2;
    loop {
        let lo = (2 * k - 3) as f64 * PI;
        let hi = (2 * k - 1) as f64 * PI;
        if lo >= tau_max {
            break;
        }
        let r = bisect(tan_equation_n2, lo, hi, 0.0)?;
        if r <= tau_max {
            out.push(r);
        }
        k += 1;
    }
    Ok(out)
}

/// Positive zeros of [`closed_form_positive_equation_n3`] in `(0, tau_max)`.
pub fn positive_roots_n3(tau_max: f64) -> Result<Vec<f64>> {
    let steps = ((tau_max / 1e-3).ceil() as usize).max(100);
    sign_change_brackets(closed_form_positive_equation_n3, 1e-3, tau_max, steps)
        .into_iter()
        .map(|(a, b)| bisect(closed_form_positive_equation_n3, a, b, 0.0))
        .collect()
}

/// Eigenvalues in `[-(4n)², lambda_max]` from the closed forms.
///
/// For `n = 2` the `τ = 4 tan(τ/2)` roots are merged with the family
/// `(2πm)²` (eigenfunctions `sin(2πmx)`), which that equation does not list.
pub fn closed_form_spectrum(n: usize, lambda_max: f64) -> Result<Vec<f64>> {
    let mut out = closed_form_negative_eigenvalues(n)?;
    if lambda_max > 0.0 {
        let tau_max = lambda_max.sqrt();
        let positive = match n {
            2 => {
                let mut taus = tan_roots_n2(tau_max)?;
                let mut m = 1;
                while 2.0 * PI * m as f64 <= tau_max {
                    taus.push(2.0 * PI * m as f64);
                    m += 1;
                }
                taus
            }
            3 => positive_roots_n3(tau_max)?,
            _ => unreachable!("checked by closed_form_negative_eigenvalues"),
        };
        out.extend(positive.into_iter().map(|t| t * t));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_negative_root() {
        let t = closed_form_negative_roots(2).unwrap()[0];
        assert!((t - 3.8300).abs() < 5e-5, "{t}");
        assert!(tanh_equation_n2(t).abs() <= 1e-12);
        assert!((-t * t + 14.67).abs() < 5e-3);
    }

    #[test]
    fn n3_negative_roots_are_ordered() {
        let r = closed_form_negative_roots(3).unwrap();
        assert!(0.0 < r[0] && r[0] < r[1]);
        assert!(f_n3(r[0]).abs() < 1e-9 && g_n3(r[1]).abs() < 1e-9);
    }

    #[test]
    fn positive_equation_is_odd_and_vanishes_at_zero() {
        assert_eq!(closed_form_positive_equation_n3(0.0), 0.0);
        for i in 1..200 {
            let t = i as f64 * 0.173;
            let (a, b) = (closed_form_positive_equation_n3(t), closed_form_positive_equation_n3(-t));
            assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn tan_roots_lie_in_their_intervals() {
        let roots = tan_roots_n2(40.0).unwrap();
        assert!(!roots.is_empty());
        for (i, r) in roots.iter().enumerate() {
            let k = i + 2;
            assert!(((2 * k - 3) as f64 * PI) < *r && *r < ((2 * k - 1) as f64 * PI));
            assert!((r - 4.0 * (r / 2.0).tan()).abs() < 1e-9);
        }
    }

    #[test]
    fn other_n_rejected() {
        assert!(closed_form_negative_roots(4).is_err());
    }
}
