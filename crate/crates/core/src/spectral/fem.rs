//! Lowest eigenpairs of the pencil `(K - 4n Σ eₖeₖᵀ, Mₕ)` on an aligned grid.
//!
//! Eigenvalues come from bisection on the Sylvester inertia of
//! `A - σ Mₕ`; eigenvectors from inverse iteration with a pivoted
//! tridiagonal solve, `Mₕ`-orthonormalized inside clusters.

use super::decomposition::{Method, SpectralDecomposition};
use crate::discretize::{OperatorMatrices, SymTridiagonal};
use crate::error::{Error, Result};

pub fn fem_spectrum(ops: &OperatorMatrices, how_many: usize) -> Result<SpectralDecomposition> {
    let len = ops.grid.interior_len();
    if how_many == 0 || how_many > len {
        return Err(Error::TooManyEigenpairs { requested: how_many, available: len });
    }
    let a = ops.linearized();
    let m = &ops.mass;
    let values = lowest_eigenvalues(&a, m, how_many);
    let vectors = eigenvectors(&a, m, &values)?;
    SpectralDecomposition::new(ops, values, vectors, Method::FiniteElement)
}

/// The `count` smallest generalized eigenvalues of `(a, m)`, ascending.
pub fn lowest_eigenvalues(a: &SymTridiagonal, m: &SymTridiagonal, count: usize) -> Vec<f64> {
    let mut lo = -1.0;
    while a.inertia_below(m, lo) > 0 {
        lo *= 2.0;
    }
    let mut hi = 1.0;
    while a.inertia_below(m, hi) < count {
        hi *= 2.0;
    }
    (0..count)
        .map(|k| {
            // smallest σ with more than k eigenvalues below it
            let (mut l, mut h) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if mid <= l || mid >= h {
                    break;
                }
                if a.inertia_below(m, mid) > k {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

fn eigenvectors(a: &SymTridiagonal, m: &SymTridiagonal, values: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (k, &lambda) in values.iter().enumerate() {
        let shifted = a.combine(1.0, m, -lambda);
        let lu = PivotedTridiagonal::factor(&shifted);
        // deterministic start with components along every mode
        let mut x: Vec<f64> =
            (0..n).map(|i| 1.0 + 0.5 * ((i * 7 + k * 3) % 11) as f64 / 11.0).collect();
        let cluster: Vec<usize> = (0..k)
            .filter(|&j| (values[j] - lambda).abs() <= 1e-8 * lambda.abs().max(1.0))
            .collect();
        for _ in 0..4 {
            let rhs = m.mul_vec(&x);
            x = lu.solve(&rhs);
            for &j in &cluster {
                let c = m.bilinear(&out[j], &x);
                x.iter_mut().zip(&out[j]).for_each(|(xi, qi)| *xi -= c * qi);
            }
            let nrm = m.bilinear(&x, &x).sqrt();
            if !(nrm > 0.0) || !nrm.is_finite() {
                return Err(Error::SingularMatrix { row: k, pivot: nrm });
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        fix_sign(&mut x);
        out.push(x);
    }
    Ok(out)
}

/// Makes the first entry above `1e-8·max` positive.
pub(crate) fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > 1e-8 * max) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// LU of a tridiagonal matrix with partial pivoting (one extra super-diagonal).
struct PivotedTridiagonal {
    l: Vec<f64>,
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagonal {
    fn factor(a: &SymTridiagonal) -> Self {
        let n = a.len();
        let tiny = f64::EPSILON * a.diag.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let mut d = a.diag.clone();
        let mut du = a.off.clone();
        let mut dl = a.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                l[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                swapped[i] = true;
                let f = d[i] / dl[i];
                l[i] = f;
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
            }
            dl[i] = 0.0;
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { l, d, u1: du, u2: du2, swapped }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.d[i];
        }
        x
    }
}

/// `max_k ‖A vₖ - λₖ Mₕ vₖ‖∞`; diagnostic for tests and reports.
pub fn pencil_residual(ops: &OperatorMatrices, dec: &SpectralDecomposition) -> f64 {
    let a = ops.linearized();
    dec.eigenvalues
        .iter()
        .zip(&dec.eigenfunctions)
        .map(|(&l, v)| {
            let av = a.mul_vec(v);
            let mv = ops.mass.mul_vec(v);
            av.iter().zip(&mv).map(|(x, y)| (x - l * y).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
