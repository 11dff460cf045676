use nalgebra::DMatrix;
use serde::Serialize;

use super::eigen::{find_eigenvalues, sample_normalized};
use super::transfer::CharacteristicEvaluator;
use crate::discretize::{inner, NormKind, OperatorMatrices};
use crate::error::{Error, Result};

/// Largest Gram condition number a projector accepts.
pub const MAX_GRAM_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Shooting,
    FiniteElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerProduct {
    #[default]
    L2,
    Hminus1,
}

impl InnerProduct {
    pub fn norm_kind(self) -> NormKind {
        match self {
            InnerProduct::L2 => NormKind::L2,
            InnerProduct::Hminus1 => NormKind::Hminus1,
        }
    }
}

/// Sorted eigenpairs of `L` sampled on a grid, with their Gram matrices.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub method: Method,
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    /// Interior nodal samples, unit discrete `L²` norm.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub gram_l2: DMatrix<f64>,
    pub gram_hminus1: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub(crate) fn new(
        ops: &OperatorMatrices,
        eigenvalues: Vec<f64>,
        eigenfunctions: Vec<Vec<f64>>,
        method: Method,
    ) -> Result<Self> {
        if let Some(&zero) = eigenvalues.iter().find(|l| **l == 0.0) {
            return Err(Error::InvalidArgument(format!("eigenvalue {zero} is not separated from 0")));
        }
        let gram_l2 = gram(ops, &eigenfunctions, NormKind::L2)?;
        let gram_hminus1 = gram(ops, &eigenfunctions, NormKind::Hminus1)?;
        let negative_count = eigenvalues.iter().filter(|l| **l < 0.0).count();
        Ok(Self { method, eigenvalues, negative_count, eigenfunctions, gram_l2, gram_hminus1 })
    }

    /// Shooter eigenfunctions sampled on the grid of `ops`.
    pub fn from_shooting(ops: &OperatorMatrices, how_many: usize) -> Result<Self> {
        let n = ops.grid.mode_n();
        let search = find_eigenvalues(n, how_many, None)?;
        let ev = CharacteristicEvaluator::new(n)?;
        let functions = search
            .eigenvalues
            .iter()
            .map(|&l| sample_normalized(&ev.shoot(l), ops))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops, search.eigenvalues, functions, Method::Shooting)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn gram(&self, inner: InnerProduct) -> &DMatrix<f64> {
        match inner {
            InnerProduct::L2 => &self.gram_l2,
            InnerProduct::Hminus1 => &self.gram_hminus1,
        }
    }

    /// Off-diagonal Frobenius mass of the unit-diagonal-scaled Gram matrix.
    pub fn off_diagonal_mass(&self, inner: InnerProduct) -> f64 {
        let g = self.gram(inner);
        let mut acc = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                if i != j {
                    let c = g[(i, j)] / (g[(i, i)] * g[(j, j)]).sqrt();
                    acc += c * c;
                }
            }
        }
        acc.sqrt()
    }
}

pub(crate) fn gram(ops: &OperatorMatrices, basis: &[Vec<f64>], kind: NormKind) -> Result<DMatrix<f64>> {
    let k = basis.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = inner(&basis[i], &basis[j], ops, kind)?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

pub(crate) fn condition_number(g: &DMatrix<f64>) -> f64 {
    let ev = g.clone().symmetric_eigen().eigenvalues;
    let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
