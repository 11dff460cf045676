//! The `λ = 0` test: a zero mode of `L` is piecewise affine,
//! `U = Aₖ + Bₖ x` on `[(k-1)/n, k/n]` with `A₁ = 0`, and continuity, the
//! jump conditions and `U(1) = 0` give a square system `M z = 0` in
//! `z = (B₁, A₂, B₂, …, Aₙ, Bₙ)`. Gaussian elimination without row swaps
//! brings `M` to upper-triangular form with pivots
//!
//! * row `2k+1`: `(k+1) / ((2(k+1)-1) n)`,
//! * row `2k+2`: `-(1 + 2(k+1)) n / (k+1)`,
//! * last row: `1 / (2n-1)`,
//!
//! so `det M = (-1)^{n-1} ≠ 0` and `0` is never an eigenvalue.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeSystem {
    pub n: usize,
    /// `(2n-1) × (2n-1)`, unknown order `(B₁, A₂, B₂, …, Aₙ, Bₙ)`.
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroModeVerdict {
    pub n: usize,
    pub determinant: f64,
    /// Pivots of the triangularized matrix, top to bottom.
    pub diagonal: Vec<f64>,
    pub zero_is_eigenvalue: bool,
}

/// Column of `Aₖ` (`k ≥ 2`) and `Bₖ` (`k ≥ 1`), 0-based.
fn col_a(k: usize) -> usize {
    2 * k - 3
}

fn col_b(k: usize) -> usize {
    2 * k - 2
}

pub fn zero_mode_matrix(n: usize) -> Result<ZeroModeSystem> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("zero-mode system needs n >= 2, got {n}")));
    }
    let size = 2 * n - 1;
    let nf = n as f64;
    let mut m = DMatrix::zeros(size, size);
    for k in 1..n {
        let x = k as f64 / nf;
        let cont = 2 * (k - 1);
        let jump = cont + 1;
        // Aₖ + (k/n) Bₖ - A_{k+1} - (k/n) B_{k+1} = 0   (A₁ = 0)
        if k >= 2 {
            m[(cont, col_a(k))] = 1.0;
        }
        m[(cont, col_b(k))] = x;
        m[(cont, col_a(k + 1))] = -1.0;
        m[(cont, col_b(k + 1))] = -x;
        // Bₖ - B_{k+1} - 4n (A_{k+1} + (k/n) B_{k+1}) = 0
        m[(jump, col_b(k))] = 1.0;
        m[(jump, col_a(k + 1))] = -4.0 * nf;
        m[(jump, col_b(k + 1))] = -1.0 - 4.0 * k as f64;
    }
    // Aₙ + Bₙ = 0
    m[(size - 1, col_a(n))] = 1.0;
    m[(size - 1, col_b(n))] = 1.0;
    Ok(ZeroModeSystem { n, matrix: m })
}

impl ZeroModeSystem {
    /// Forward elimination with the natural pivot order; no row swaps.
    pub fn triangularize(&self) -> Result<DMatrix<f64>> {
        let mut u = self.matrix.clone();
        let size = u.nrows();
        let scale = u.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        for j in 0..size {
            let pivot = u[(j, j)];
            if pivot.abs() <= 1e-13 * scale {
                return Err(Error::PivotBreakdown { row: j });
            }
            for i in j + 1..size {
                let factor = u[(i, j)] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for c in j..size {
                    let v = u[(j, c)];
                    u[(i, c)] -= factor * v;
                }
                u[(i, j)] = 0.0;
            }
        }
        Ok(u)
    }
}

/// Pivots predicted by the closed-form recursion.
pub fn expected_diagonal(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(2 * n - 1);
    for k in 0..n - 1 {
        let kp = (k + 1) as f64;
        out.push(kp / ((2.0 * kp - 1.0) * nf));
        out.push(-(1.0 + 2.0 * kp) / kp * nf);
    }
    out.push(1.0 / (2.0 * nf - 1.0));
    out
}

pub fn zero_not_eigenvalue(n: usize) -> Result<ZeroModeVerdict> {
    let upper = zero_mode_matrix(n)?.triangularize()?;
    let diagonal: Vec<f64> = upper.diagonal().iter().copied().collect();
    let determinant = diagonal.iter().product::<f64>();
    Ok(ZeroModeVerdict { n, determinant, diagonal, zero_is_eigenvalue: determinant == 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_matrix() {
        let m = zero_mode_matrix(2).unwrap().matrix;
        let expected = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, -0.5, 1.0, -8.0, -5.0, 0.0, 1.0, 1.0]);
        assert_eq!(m, expected);
        assert!((m.determinant() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn n2_diagonal() {
        let v = zero_not_eigenvalue(2).unwrap();
        let want = [0.5, -6.0, 1.0 / 3.0];
        for (a, b) in v.diagonal.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((v.determinant + 1.0).abs() < 1e-14);
        assert!(!v.zero_is_eigenvalue);
    }

    #[test]
    fn trailing_pivot() {
        let v = zero_not_eigenvalue(4).unwrap();
        assert!((v.diagonal.last().unwrap() - 1.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn row_pattern_general_n() {
        let n = 5;
        let m = zero_mode_matrix(n).unwrap().matrix;
        for k in 1..n {
            let (c, j) = (2 * (k - 1), 2 * k - 1);
            assert_eq!(m[(c, col_b(k))], k as f64 / n as f64);
            assert_eq!(m[(j, col_a(k + 1))], -20.0);
            assert_eq!(m[(j, col_b(k + 1))], -1.0 - 4.0 * k as f64);
        }
    }

    #[test]
    fn rejects_n_below_two() {
        assert!(zero_mode_matrix(1).is_err());
    }
}
