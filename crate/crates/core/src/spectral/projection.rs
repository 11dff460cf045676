//! Spectral projections `E₁` (onto the span of the negative-eigenvalue
//! eigenfunctions) and `E₂ = I - E₁`.
//!
//! Coordinates in the retained eigenbasis come from the Gram system of the
//! chosen inner product. In discrete `L²` the Gram matrix is the identity up
//! to roundoff; in `H⁻¹` it is not diagonal and the split is oblique.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::decomposition::{condition_number, InnerProduct, SpectralDecomposition, MAX_GRAM_CONDITION};
use crate::discretize::{inner, OperatorMatrices};
use crate::error::{Error, Result};

/// Retained eigenfunctions required beyond the unstable ones.
pub const MIN_STABLE_RETAINED: usize = 10;

pub struct SpectralProjector<'a> {
    ops: &'a OperatorMatrices,
    basis: &'a [Vec<f64>],
    unstable: usize,
    inner: InnerProduct,
    factor: Cholesky<f64, Dyn>,
    pub condition: f64,
}

/// Builds `E₁`, `E₂` for `dec` on the grid of `ops`.
pub fn projections<'a>(
    dec: &'a SpectralDecomposition,
    ops: &'a OperatorMatrices,
    inner: InnerProduct,
) -> Result<SpectralProjector<'a>> {
    let m = dec.negative_count;
    if dec.len() < m + MIN_STABLE_RETAINED {
        return Err(Error::InvalidArgument(format!(
            "projections need at least {} retained eigenfunctions, got {}",
            m + MIN_STABLE_RETAINED,
            dec.len()
        )));
    }
    let g: &DMatrix<f64> = dec.gram(inner);
    let condition = condition_number(g);
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::IllConditionedGram(condition));
    }
    let factor = g.clone().cholesky().ok_or(Error::IllConditionedGram(condition))?;
    Ok(SpectralProjector { ops, basis: &dec.eigenfunctions, unstable: m, inner, factor, condition })
}

impl SpectralProjector<'_> {
    pub fn unstable_dimension(&self) -> usize {
        self.unstable
    }

    /// Coordinates of the best approximation of `u` in the retained span.
    pub fn coordinates(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.ops.grid.check_len(u.len())?;
        let kind = self.inner.norm_kind();
        let rhs = self
            .basis
            .iter()
            .map(|e| inner(e, u, self.ops, kind))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.factor.solve(&DVector::from_vec(rhs)))
    }

    fn combine(&self, coeffs: &DVector<f64>, range: std::ops::Range<usize>) -> Vec<f64> {
        let mut out = vec![0.0; self.ops.grid.interior_len()];
        for i in range {
            let c = coeffs[i];
            out.iter_mut().zip(&self.basis[i]).for_each(|(o, e)| *o += c * e);
        }
        out
    }

    /// `E₁ u`.
    pub fn unstable_part(&self, u: &[f64]) -> Result<Vec<f64>> {
        let c = self.coordinates(u)?;
        Ok(self.combine(&c, 0..self.unstable))
    }

    /// `E₂ u = u - E₁ u`.
    pub fn stable_part(&self, u: &[f64]) -> Result<Vec<f64>> {
        let p1 = self.unstable_part(u)?;
        Ok(u.iter().zip(&p1).map(|(a, b)| a - b).collect())
    }

    /// `(E₁u, E₂u)` with `E₂` restricted to the retained span.
    pub fn split_in_span(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = self.coordinates(u)?;
        Ok((self.combine(&c, 0..self.unstable), self.combine(&c, self.unstable..self.basis.len())))
    }
}
