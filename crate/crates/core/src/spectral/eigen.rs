//! Eigenvalues and eigenfunctions of `L` from the shooter.

use serde::Serialize;

use super::transfer::{CharacteristicEvaluator, ShotProfile};
use crate::discretize::{norm, NormKind, OperatorMatrices};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Cap on step halvings when a scan misses roots.
pub const MAX_HALVINGS: usize = 12;

/// Relative tolerance on `|D(λ)| / scale` for accepting `λ` as an eigenvalue.
pub const ROOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct EigenSearch {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    /// `|D(λ)| / scale` at each returned root.
    pub residuals: Vec<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub warnings: Vec<String>,
}

/// Signed square root: the scan runs uniformly in `s` with `λ = s|s|`.
fn to_lambda(s: f64) -> f64 {
    s * s.abs()
}

fn to_s(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

/// Roots of `D` in `[-(4n)², lambda_max]`, at most `how_many` of them.
///
/// With `lambda_max = None` the upper end grows until `how_many` eigenvalues
/// lie below it. Roots are bracketed by a sign-change scan and refined by
/// bisection; the number found on each run is checked against the Sturm
/// oscillation count and the scan step is halved on a mismatch.
pub fn find_eigenvalues(n: usize, how_many: usize, lambda_max: Option<f64>) -> Result<EigenSearch> {
    if how_many == 0 {
        return Err(Error::InvalidArgument("how_many must be >= 1".into()));
    }
    let ev = CharacteristicEvaluator::new(n)?;
    let mut warnings = Vec::new();

    let mut floor = -((4 * n) as f64).powi(2);
    while ev.count_below(floor) > 0 {
        warnings.push(format!("spectrum extends below {floor}; widening the scan floor"));
        floor *= 4.0;
    }

    let upper = match lambda_max {
        Some(l) => l,
        None => {
            let mut hi: f64 = 1.0;
            while ev.count_below(hi) < how_many {
                hi *= 2.0;
            }
            hi
        }
    };
    if upper <= floor {
        return Err(Error::InvalidArgument(format!("lambda_max {upper} is below the scan floor")));
    }

    let expected = ev.count_below(upper);
    let (s_lo, s_hi) = (to_s(floor), to_s(upper));
    let mut step = 0.02;
    let mut roots = Vec::new();
    for attempt in 0..=MAX_HALVINGS {
        roots = scan(&ev, s_lo, s_hi, step)?;
        if roots.len() == expected {
            break;
        }
        if attempt == MAX_HALVINGS {
            warnings.push(format!(
                "found {} roots but the oscillation count is {expected}: possible multiple root",
                roots.len()
            ));
        }
        step *= 0.5;
    }

    let negative_count = roots.iter().filter(|&&l| l < 0.0).count();
    roots.truncate(how_many);
    let residuals = roots
        .iter()
        .map(|&l| {
            let shot = ev.shoot(l);
            shot.terminal().abs() / shot.scale()
        })
        .collect();
    Ok(EigenSearch {
        n,
        eigenvalues: roots,
        negative_count,
        residuals,
        lower_bound: floor,
        upper_bound: upper,
        warnings,
    })
}

fn scan(ev: &CharacteristicEvaluator, s_lo: f64, s_hi: f64, step: f64) -> Result<Vec<f64>> {
    let d = |lambda: f64| ev.value(lambda);
    let steps = ((s_hi - s_lo) / step).ceil() as usize;
    let mut out = Vec::new();
    let mut prev_s = s_lo;
    let mut prev = d(to_lambda(s_lo));
    for i in 1..=steps {
        let s = if i == steps { s_hi } else { s_lo + step * i as f64 };
        let cur = d(to_lambda(s));
        if prev == 0.0 {
            out.push(to_lambda(prev_s));
        } else if cur != 0.0 && prev.signum() != cur.signum() {
            out.push(bisect(d, to_lambda(prev_s), to_lambda(s), 0.0)?);
        }
        prev_s = s;
        prev = cur;
    }
    if prev == 0.0 {
        out.push(to_lambda(prev_s));
    }
    Ok(out)
}

/// Nodal samples of the eigenfunction for `lambda`, unit discrete `L²` norm,
/// `U'(0) > 0`.
pub fn eigenfunction(n: usize, lambda: f64, ops: &OperatorMatrices) -> Result<Vec<f64>> {
    let shot = checked_shot(n, lambda)?;
    sample_normalized(&shot, ops)
}

/// The shot for an eigenvalue, rejecting `λ` that is not a root.
pub fn checked_shot(n: usize, lambda: f64) -> Result<ShotProfile> {
    let shot = CharacteristicEvaluator::new(n)?.shoot(lambda);
    let residual = shot.terminal().abs() / shot.scale();
    if !(residual <= ROOT_TOLERANCE) {
        return Err(Error::NotAnEigenvalue { lambda, residual });
    }
    Ok(shot)
}

pub(crate) fn sample_normalized(shot: &ShotProfile, ops: &OperatorMatrices) -> Result<Vec<f64>> {
    let mut u = ops.grid.sample(|x| shot.value_at(x));
    let nrm = norm(&u, ops, NormKind::L2)?;
    if nrm == 0.0 {
        return Err(Error::InvalidArgument("eigenfunction vanishes on the grid".into()));
    }
    u.iter_mut().for_each(|v| *v /= nrm);
    Ok(u)
}

/// Direction `e_index` (1-based) of the linearization at `vₙ±`.
///
/// For `n ≥ 2` this is the shooter eigenfunction; for `n ≤ 1` the
/// linearization is the Dirichlet Laplacian and the direction is
/// `sin(index·πx)`, both normalized in discrete `L²`.
pub fn perturbation_direction(n: usize, index: usize, ops: &OperatorMatrices) -> Result<Vec<f64>> {
    if index == 0 {
        return Err(Error::InvalidArgument("eigen index is 1-based".into()));
    }
    if n <= 1 {
        let shot = CharacteristicEvaluator::with_intervals(1)
            .shoot((index as f64 * std::f64::consts::PI).powi(2));
        return sample_normalized(&shot, ops);
    }
    let search = find_eigenvalues(n, index, None)?;
    let lambda = *search.eigenvalues.get(index - 1).ok_or(Error::TooManyEigenpairs {
        requested: index,
        available: search.eigenvalues.len(),
    })?;
    eigenfunction(n, lambda, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{assemble, Grid};
    use crate::spectral::closed_form::{closed_form_negative_eigenvalues, tan_roots_n2};
    use std::f64::consts::PI;

    #[test]
    fn n2_one_negative_eigenvalue() {
        let s = find_eigenvalues(2, 8, None).unwrap();
        assert_eq!(s.negative_count, 1);
        assert_eq!(s.eigenvalues.len(), 8);
        let cf = closed_form_negative_eigenvalues(2).unwrap()[0];
        assert!((s.eigenvalues[0] - cf).abs() < 1e-8);
        assert!(s.residuals.iter().all(|r| *r <= 1e-12), "{:?}", s.residuals);
    }

    #[test]
    fn n2_positive_spectrum_contains_both_families() {
        let s = find_eigenvalues(2, 40, Some(2000.0)).unwrap();
        let taus = tan_roots_n2(2000f64.sqrt()).unwrap();
        for t in taus {
            assert!(s.eigenvalues.iter().any(|l| (l - t * t).abs() < 1e-8), "tan root {t}");
        }
        for m in 1..=7 {
            let l = (2.0 * PI * m as f64).powi(2);
            assert!(s.eigenvalues.iter().any(|e| (e - l).abs() < 1e-8), "(2πm)² m={m}");
        }
    }

    #[test]
    fn n3_two_negative_eigenvalues() {
        let s = find_eigenvalues(3, 6, None).unwrap();
        assert_eq!(s.negative_count, 2);
    }

    #[test]
    fn eigenfunction_examples() {
        let ops = assemble(&Grid::new(2, 128).unwrap());
        let e = eigenfunction(2, 4.0 * PI * PI, &ops).unwrap();
        let s = ops.grid.sample(|x| (2.0 * PI * x).sin() * 2f64.sqrt());
        let nrm = norm(&s, &ops, NormKind::L2).unwrap();
        for (a, b) in e.iter().zip(&s) {
            assert!((a - b / nrm).abs() < 1e-12);
        }

        let l1 = find_eigenvalues(2, 1, None).unwrap().eigenvalues[0];
        let e1 = eigenfunction(2, l1, &ops).unwrap();
        let len = e1.len();
        for i in 0..len {
            assert!((e1[i] - e1[len - 1 - i]).abs() <= 1e-10);
        }
        assert!(e1[0] > 0.0);
    }

    #[test]
    fn non_root_is_rejected() {
        let ops = assemble(&Grid::new(2, 8).unwrap());
        assert!(matches!(eigenfunction(2, 3.0, &ops), Err(Error::NotAnEigenvalue { .. })));
    }

    #[test]
    fn sine_directions_for_small_n() {
        let ops = assemble(&Grid::new(1, 64).unwrap());
        let e = perturbation_direction(1, 1, &ops).unwrap();
        assert!(e.iter().all(|&v| v > 0.0));
        assert!((norm(&e, &ops, NormKind::L2).unwrap() - 1.0).abs() < 1e-14);
    }
}
