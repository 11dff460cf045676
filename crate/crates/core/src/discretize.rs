//! Uniform P1 meshes aligned with the interior zeros `k/n`, tridiagonal
//! assembly and solves, and the discrete norms every other module measures
//! with.
//!
//! Nodal functions are stored as slices over the interior nodes only: entry
//! `i` holds the value at node `i + 1`, the Dirichlet values at `x = 0` and
//! `x = 1` are implicit zeros.

use crate::error::{Error, Result};

/// Uniform mesh of `[0, 1]` with `M` cells on each subinterval `[k/n, (k+1)/n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    per_subinterval: usize,
    mode_n: usize,
    cells: usize,
    cell_width: f64,
}

impl Grid {
    /// Builds the grid with `N = n·M` cells. Every `k/n` is node `k·M`.
    pub fn new(mode_n: usize, per_subinterval: usize) -> Result<Self> {
        if mode_n < 1 {
            return Err(Error::InvalidMesh(format!("mode n must be >= 1, got {mode_n}")));
        }
        if per_subinterval < 2 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 cells per subinterval, got {per_subinterval}"
            )));
        }
        let cells = mode_n * per_subinterval;
        Ok(Self { per_subinterval, mode_n, cells, cell_width: 1.0 / cells as f64 })
    }

    pub fn mode_n(&self) -> usize {
        self.mode_n
    }

    pub fn per_subinterval(&self) -> usize {
        self.per_subinterval
    }

    /// Number of cells `N`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        self.cell_width
    }

    /// `N - 1`, the length of every nodal vector.
    pub fn interior_len(&self) -> usize {
        self.cells - 1
    }

    /// Coordinate of global node `i` (`0 ..= N`).
    ///
    /// Computed as `i / N` so that node `k·M` is bit-identical to `k / n`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.cells as f64
    }

    pub fn node_coordinates(&self) -> Vec<f64> {
        (0..=self.cells).map(|i| self.node(i)).collect()
    }

    pub fn interior_coordinates(&self) -> Vec<f64> {
        (1..self.cells).map(|i| self.node(i)).collect()
    }

    /// Global indices of the nodes at `k/n`, `k = 1..n-1`.
    pub fn delta_node_indices(&self) -> Vec<usize> {
        (1..self.mode_n).map(|k| k * self.per_subinterval).collect()
    }

    /// Positions of the `k/n` nodes inside a nodal (interior) vector.
    pub fn delta_interior_indices(&self) -> Vec<usize> {
        self.delta_node_indices().into_iter().map(|i| i - 1).collect()
    }

    /// Samples `f` at the interior nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (1..self.cells).map(|i| f(self.node(i))).collect()
    }

    /// Pads a nodal vector with the two Dirichlet zeros.
    pub fn with_boundary(&self, u: &[f64]) -> Vec<f64> {
        let mut full = Vec::with_capacity(u.len() + 2);
        full.push(0.0);
        full.extend_from_slice(u);
        full.push(0.0);
        full
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.interior_len() {
            return Err(Error::DimensionMismatch { expected: self.interior_len(), got: len });
        }
        Ok(())
    }
}

/// Symmetric tridiagonal matrix, `diag.len() == off.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(diag.len(), off.len() + 1, "off-diagonal must be one shorter");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * u[i];
            if i > 0 {
                acc += self.off[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * u[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// `uᵀ A v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.mul_vec(v))
    }

    /// `a·self + b·other`, entrywise.
    pub fn combine(&self, a: f64, other: &SymTridiagonal, b: f64) -> SymTridiagonal {
        let diag = self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect();
        let off = self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect();
        SymTridiagonal { diag, off }
    }

    /// Thomas algorithm on a scratch copy, no pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let scale = self.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom.abs() <= 1e-14 * scale || !denom.is_finite() {
            return Err(Error::SingularMatrix { row: 0, pivot: denom });
        }
        if n > 1 {
            c[0] = self.off[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            if denom.abs() <= 1e-14 * scale || !denom.is_finite() {
                return Err(Error::SingularMatrix { row: i, pivot: denom });
            }
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }

    /// Cholesky factor `A = L Lᵀ` with `L` lower bidiagonal.
    pub fn cholesky(&self) -> Result<BidiagonalCholesky> {
        let n = self.len();
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut pivot = self.diag[i];
            if i > 0 {
                sub[i - 1] = self.off[i - 1] / diag[i - 1];
                pivot -= sub[i - 1] * sub[i - 1];
            }
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { row: i, pivot });
            }
            diag[i] = pivot.sqrt();
        }
        Ok(BidiagonalCholesky { diag, sub })
    }

    /// Number of negative pivots in the `LDLᵀ` factorization of `self - σ·other`,
    /// i.e. the number of generalized eigenvalues of `(self, other)` below `σ`
    /// when `other` is positive definite (Sylvester's law of inertia).
    pub fn inertia_below(&self, other: &SymTridiagonal, sigma: f64) -> usize {
        let n = self.len();
        let mut count = 0;
        let mut prev = 1.0;
        for i in 0..n {
            let mut d = self.diag[i] - sigma * other.diag[i];
            if i > 0 {
                let b = self.off[i - 1] - sigma * other.off[i - 1];
                d -= b * b / prev;
            }
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + sigma.abs() * other.diag[i].abs());
            }
            if d < 0.0 {
                count += 1;
            }
            prev = d;
        }
        count
    }

    /// Dense row-major copy; for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            out[i][i] = self.diag[i];
            if i + 1 < n {
                out[i][i + 1] = self.off[i];
                out[i + 1][i] = self.off[i];
            }
        }
        out
    }
}

/// Lower-bidiagonal Cholesky factor of a symmetric positive definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct BidiagonalCholesky {
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl BidiagonalCholesky {
    /// Solves `L y = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; b.len()];
        for i in 0..b.len() {
            let mut acc = b[i];
            if i > 0 {
                acc -= self.sub[i - 1] * y[i - 1];
            }
            y[i] = acc / self.diag[i];
        }
        y
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.forward(b);
        let n = x.len();
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= self.sub[i] * x[i + 1];
            }
            x[i] /= self.diag[i];
        }
        x
    }

    /// Solves in place; the factor is reused across time steps.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            if i > 0 {
                x[i] -= self.sub[i - 1] * x[i - 1];
            }
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= self.sub[i] * x[i + 1];
            }
            x[i] /= self.diag[i];
        }
    }

    /// `bᵀ A⁻¹ b = ‖L⁻¹ b‖²`.
    pub fn inverse_quadratic_form(&self, b: &[f64]) -> f64 {
        let y = self.forward(b);
        dot(&y, &y)
    }
}

/// Duality pairings `⟨F, φᵢ⟩` against the interior hat functions: the
/// discrete carrier of an element of `H⁻¹(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalVector(pub Vec<f64>);

impl FunctionalVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairing with a nodal function `w`: `⟨F, Σ wᵢ φᵢ⟩`.
    pub fn pair(&self, w: &[f64]) -> f64 {
        dot(&self.0, w)
    }
}

/// Assembled P1 operators on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrices {
    pub grid: Grid,
    /// `K`: `2/h` on the diagonal, `-1/h` off it.
    pub stiffness: SymTridiagonal,
    /// `Mₕ`: `4h/6` on the diagonal, `h/6` off it.
    pub mass: SymTridiagonal,
    /// `4n`, the weight of each `δ_{k/n}` in the linearization.
    pub delta_strength: f64,
    /// Interior indices of the `k/n` nodes.
    pub delta_nodes: Vec<usize>,
}

/// Standard P1 assembly; the delta term is kept as strength plus node list.
pub fn assemble(grid: &Grid) -> OperatorMatrices {
    let h = grid.h();
    let len = grid.interior_len();
    let stiffness = SymTridiagonal::new(vec![2.0 / h; len], vec![-1.0 / h; len - 1]);
    let mass = SymTridiagonal::new(vec![4.0 * h / 6.0; len], vec![h / 6.0; len - 1]);
    OperatorMatrices {
        grid: grid.clone(),
        stiffness,
        mass,
        delta_strength: 4.0 * grid.mode_n() as f64,
        delta_nodes: grid.delta_interior_indices(),
    }
}

impl OperatorMatrices {
    /// `K - 4n Σ eₖ eₖᵀ`, the discrete linearized operator.
    pub fn linearized(&self) -> SymTridiagonal {
        let mut op = self.stiffness.clone();
        for &k in &self.delta_nodes {
            op.diag[k] -= self.delta_strength;
        }
        op
    }

    /// `Mₕ u`, the load vector of a nodal function.
    pub fn load_of(&self, u: &[f64]) -> FunctionalVector {
        FunctionalVector(self.mass.mul_vec(u))
    }

    pub fn norm(&self, u: &[f64], kind: NormKind) -> Result<f64> {
        norm(u, self, kind)
    }

    pub fn inner(&self, u: &[f64], v: &[f64], kind: NormKind) -> Result<f64> {
        inner(u, v, self, kind)
    }
}

/// Solves `K w = F`.
pub fn solve_stiffness(stiffness: &SymTridiagonal, rhs: &FunctionalVector) -> Result<Vec<f64>> {
    stiffness.solve(&rhs.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum NormKind {
    L2,
    H01,
    Hminus1,
}

/// Discrete norm of a nodal function. For `Hminus1` the function is first
/// mapped to its load vector `Mₕ u`.
pub fn norm(u: &[f64], ops: &OperatorMatrices, kind: NormKind) -> Result<f64> {
    Ok(inner(u, u, ops, kind)?.max(0.0).sqrt())
}

pub fn inner(u: &[f64], v: &[f64], ops: &OperatorMatrices, kind: NormKind) -> Result<f64> {
    ops.grid.check_len(u.len())?;
    ops.grid.check_len(v.len())?;
    match kind {
        NormKind::L2 => Ok(ops.mass.bilinear(u, v)),
        NormKind::H01 => Ok(ops.stiffness.bilinear(u, v)),
        NormKind::Hminus1 => {
            let fu = ops.load_of(u);
            let fv = ops.load_of(v);
            functional_inner(&fu, &fv, ops)
        }
    }
}

/// `H⁻¹` norm of a functional: `sqrt(Fᵀ K⁻¹ F)`.
pub fn functional_norm(f: &FunctionalVector, ops: &OperatorMatrices) -> Result<f64> {
    Ok(functional_inner(f, f, ops)?.max(0.0).sqrt())
}

pub fn functional_inner(
    f: &FunctionalVector,
    g: &FunctionalVector,
    ops: &OperatorMatrices,
) -> Result<f64> {
    ops.grid.check_len(f.len())?;
    ops.grid.check_len(g.len())?;
    let w = solve_stiffness(&ops.stiffness, g)?;
    Ok(f.pair(&w))
}

/// Exact `∫₀¹ |I_h u| dx` for the piecewise-linear interpolant: the
/// trapezoid rule with each sign-changing cell split at its zero.
pub fn integral_abs(u: &[f64], grid: &Grid) -> Result<f64> {
    grid.check_len(u.len())?;
    let h = grid.h();
    let full = grid.with_boundary(u);
    let total = full
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
                0.5 * h * (a * a + b * b) / (a - b).abs()
            } else {
                0.5 * h * (a.abs() + b.abs())
            }
        })
        .sum();
    Ok(total)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}
