//! Time integration of `u_t - u_xx ∈ H₀(u)` on `(0, 1)` with homogeneous
//! Dirichlet data, and the linearization remainder
//! `g(z) = H₀(vₙ± + z) - H₀(vₙ±) - 4n Σ δ_{j/n} z`.
//!
//! One step solves `(Mₕ + dt K) u⁺ = Mₕ u + dt F(u)` with
//! `Fᵢ = ∫ sign(I_h ũ) φᵢ` integrated exactly, cells split at the zero of the
//! interpolant. `ũ` is `u` with entries of size at most the selection
//! tolerance set to `0`, so the zero state selects `0`. `F` is the gradient of
//! the convex functional `∫ |I_h u|`, which makes the step a convex-concave
//! splitting of the energy `½ uᵀKu - ∫ |I_h u|`: the energy cannot increase
//! for any `dt > 0`.

use serde::{Deserialize, Serialize};

use crate::discretize::{
    functional_norm, norm, BidiagonalCholesky, FunctionalVector, Grid, NormKind, OperatorMatrices,
};
use crate::equilibria::{energy, Equilibrium, Sign};
use crate::error::{Error, Result};
use crate::roots::bisect;

pub const DEFAULT_SELECTION_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_tolerance")]
    pub selection_tolerance: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_tolerance() -> f64 {
    DEFAULT_SELECTION_TOLERANCE
}

fn default_stride() -> usize {
    1
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            t_end,
            selection_tolerance: DEFAULT_SELECTION_TOLERANCE,
            record_stride: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.record_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_end must be at least dt, got t_end = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        if !(self.selection_tolerance >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "selection_tolerance must be >= 0, got {}",
                self.selection_tolerance
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps to reach `t_end`, the last one landing on or past it.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

fn sign_of(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `∫ₐᵇ φ` over one cell of length `h` in the local coordinate `t ∈ [0, 1]`,
/// for the hat decreasing from the left node (`left`) or increasing to the
/// right node.
fn cell_hat_integral(h: f64, left: bool, a: f64, b: f64) -> f64 {
    if left {
        h * ((b - 0.5 * b * b) - (a - 0.5 * a * a))
    } else {
        h * 0.5 * (b * b - a * a)
    }
}

/// `Fᵢ = ∫ sign(I_h ũ) φᵢ`, exact for the piecewise-linear interpolant.
pub fn heaviside_load(u: &[f64], grid: &Grid, tolerance: f64) -> Result<FunctionalVector> {
    grid.check_len(u.len())?;
    let h = grid.h();
    let cut = |v: f64| if v.abs() <= tolerance { 0.0 } else { v };
    let full: Vec<f64> = grid.with_boundary(u).into_iter().map(cut).collect();
    let mut f = vec![0.0; u.len()];
    // cell j spans global nodes j, j+1; interior index of global node i is i-1
    for j in 0..grid.cells() {
        let (a, b) = (full[j], full[j + 1]);
        let (sa, sb) = (sign_of(a), sign_of(b));
        let (left, right) = if sa * sb < 0.0 {
            let t = a / (a - b);
            (
                sa * cell_hat_integral(h, true, 0.0, t) + sb * cell_hat_integral(h, true, t, 1.0),
                sa * cell_hat_integral(h, false, 0.0, t) + sb * cell_hat_integral(h, false, t, 1.0),
            )
        } else {
            let s = if sa != 0.0 { sa } else { sb };
            (0.5 * h * s, 0.5 * h * s)
        };
        if j >= 1 {
            f[j - 1] += left;
        }
        if j + 1 < grid.cells() {
            f[j] += right;
        }
    }
    Ok(FunctionalVector(f))
}

/// Factored `Mₕ + dt K` for repeated steps on one grid.
pub struct Stepper<'a> {
    ops: &'a OperatorMatrices,
    cfg: SolverConfig,
    factor: BidiagonalCholesky,
}

impl<'a> Stepper<'a> {
    pub fn new(ops: &'a OperatorMatrices, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let factor = ops.mass.combine(1.0, &ops.stiffness, cfg.dt).cholesky()?;
        Ok(Self { ops, cfg, factor })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn ops(&self) -> &OperatorMatrices {
        self.ops
    }

    pub fn step(&self, u: &[f64]) -> Result<Vec<f64>> {
        let load = heaviside_load(u, &self.ops.grid, self.cfg.selection_tolerance)?;
        let mut rhs = self.ops.mass.mul_vec(u);
        rhs.iter_mut().zip(&load.0).for_each(|(r, f)| *r += self.cfg.dt * f);
        self.factor.solve_in_place(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix { row: 0, pivot: f64::NAN });
        }
        Ok(rhs)
    }
}

/// One step from `u`; see [`Stepper`] for repeated use.
pub fn step(u: &[f64], cfg: &SolverConfig, ops: &OperatorMatrices) -> Result<Vec<f64>> {
    Stepper::new(ops, *cfg)?.step(u)
}

/// Stored snapshots of a run with distances to a reference equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub reference: Equilibrium,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dist_l2: Vec<f64>,
    pub dist_h01: Vec<f64>,
    pub dist_hm1: Vec<f64>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    fn empty(reference: Equilibrium) -> Self {
        Self {
            reference,
            times: Vec::new(),
            states: Vec::new(),
            dist_l2: Vec::new(),
            dist_h01: Vec::new(),
            dist_hm1: Vec::new(),
            energies: Vec::new(),
        }
    }

    fn record(&mut self, t: f64, u: Vec<f64>, v: &[f64], ops: &OperatorMatrices) -> Result<()> {
        let z: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
        self.dist_l2.push(norm(&z, ops, NormKind::L2)?);
        self.dist_h01.push(norm(&z, ops, NormKind::H01)?);
        self.dist_hm1.push(norm(&z, ops, NormKind::Hminus1)?);
        self.energies.push(energy(&u, ops)?);
        self.times.push(t);
        self.states.push(u);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }
}

/// Runs from `u0` to `t_end`, storing `t = 0`, every `record_stride`-th step
/// and the final step.
pub fn simulate(
    u0: &[f64],
    cfg: &SolverConfig,
    ops: &OperatorMatrices,
    reference: Equilibrium,
) -> Result<Trajectory> {
    ops.grid.check_len(u0.len())?;
    let stepper = Stepper::new(ops, *cfg)?;
    let v = reference.sample(&ops.grid);
    let mut traj = Trajectory::empty(reference);
    traj.record(0.0, u0.to_vec(), &v, ops)?;
    let steps = cfg.steps();
    let mut u = u0.to_vec();
    for k in 1..=steps {
        u = stepper.step(&u)?;
        if k % cfg.record_stride == 0 || k == steps {
            traj.record(k as f64 * cfg.dt, u.clone(), &v, ops)?;
        }
    }
    Ok(traj)
}

/// `⟨g(z), φᵢ⟩` for the interior hats.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector(pub FunctionalVector);

impl ResidualVector {
    pub fn entries(&self) -> &[f64] {
        self.0.entries()
    }

    pub fn hminus1_norm(&self, ops: &OperatorMatrices) -> Result<f64> {
        functional_norm(&self.0, ops)
    }
}

/// `v(x) + (I_h z)(x)` with the exact equilibrium.
fn perturbed_value(v: &Equilibrium, z_full: &[f64], grid: &Grid, x: f64) -> f64 {
    let h = grid.h();
    let j = ((x / h).floor() as usize).min(grid.cells() - 1);
    let t = (x - grid.node(j)) / h;
    v.value_unchecked(x) + (1.0 - t) * z_full[j] + t * z_full[j + 1]
}

/// `∫ₐᵇ φᵢ` for the hat at global node `i`, `a ≤ b`.
pub(crate) fn hat_integral(grid: &Grid, i: usize, a: f64, b: f64) -> f64 {
    let h = grid.h();
    let xi = grid.node(i);
    let mut total = 0.0;
    // left half on [x_{i-1}, x_i], right half on [x_i, x_{i+1}]
    let lo = a.max(xi - h);
    let hi = b.min(xi);
    if hi > lo {
        total += cell_hat_integral(h, false, (lo - (xi - h)) / h, (hi - (xi - h)) / h);
    }
    let lo = a.max(xi);
    let hi = b.min(xi + h);
    if hi > lo {
        total += cell_hat_integral(h, true, (lo - xi) / h, (hi - xi) / h);
    }
    total
}

/// The perturbed zeros `x_w^j`, `j = 1..n-1`, of `w = vₙ± + I_h z`.
///
/// `w` is sampled at every node and cell midpoint; it must change sign
/// exactly `n - 1` times in `(0, 1)` with one change inside each window
/// `(j/n - 1/(2n), j/n + 1/(2n))`, and keep the sign of `vₙ±` at the window
/// edges. Each zero is then refined by bisection.
pub fn perturbed_zeros(z: &[f64], n: usize, sign: Sign, grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(z.len())?;
    if n < 1 || grid.mode_n() != n {
        return Err(Error::InvalidArgument(format!(
            "grid is aligned for n = {}, residual requested for n = {n}",
            grid.mode_n()
        )));
    }
    let v = Equilibrium::new(n, sign);
    let z_full = grid.with_boundary(z);
    let w = |x: f64| perturbed_value(&v, &z_full, grid, x);
    let h = grid.h();
    let samples: Vec<(f64, f64)> = (1..2 * grid.cells())
        .map(|k| {
            let x = 0.5 * h * k as f64;
            (x, w(x))
        })
        .collect();
    let mut changes = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for &(x, val) in &samples {
        if val == 0.0 {
            continue;
        }
        if let Some((px, pv)) = last {
            if pv.signum() != val.signum() {
                changes.push((px, x));
            }
        }
        last = Some((x, val));
    }
    if changes.len() != n - 1 {
        return Err(Error::ZeroCountMismatch { expected: n - 1, found: changes.len() });
    }
    let nf = n as f64;
    let mut zeros = Vec::with_capacity(n - 1);
    for (j, &(lo, hi)) in changes.iter().enumerate() {
        let node = (j + 1) as f64 / nf;
        let (left, right) = (node - 0.5 / nf, node + 0.5 / nf);
        let inside = lo >= left && hi <= right;
        let edges_agree = sign_of(w(left)) == sign_of(v.value_unchecked(left))
            && sign_of(w(right)) == sign_of(v.value_unchecked(right));
        if !inside || !edges_agree {
            return Err(Error::ZeroCountMismatch { expected: n - 1, found: changes.len() });
        }
        zeros.push(bisect(w, lo, hi, 0.0)?);
    }
    Ok(zeros)
}

/// Assembles `⟨g(z), φᵢ⟩`.
///
/// `H₀(w) - H₀(v)` is nonzero only on the slivers between `j/n` and the
/// shifted zero `x_w^j`, where it equals `±2`; its pairing with each hat is
/// integrated exactly. The delta term contributes `-4n z(j/n)` at the node
/// `j/n`.
pub fn residual_g(z: &[f64], n: usize, sign: Sign, ops: &OperatorMatrices) -> Result<ResidualVector> {
    let grid = &ops.grid;
    let zeros = perturbed_zeros(z, n, sign, grid)?;
    let v = Equilibrium::new(n, sign);
    let h = grid.h();
    let mut g = vec![0.0; z.len()];
    let nf = n as f64;
    let delta_nodes = grid.delta_node_indices();
    for (j, &xw) in zeros.iter().enumerate() {
        let node = (j + 1) as f64 / nf;
        if xw == node {
            continue;
        }
        // sign(w) - sign(v) on the sliver: w carries the sign of the arc on
        // the far side of j/n
        let (a, b, jump) = if xw > node {
            (node, xw, 2.0 * v.value_unchecked(node - 0.25 / nf).signum())
        } else {
            (xw, node, 2.0 * v.value_unchecked(node + 0.25 / nf).signum())
        };
        let first = ((a / h).floor() as usize).max(1);
        let last = ((b / h).ceil() as usize + 1).min(grid.cells() - 1);
        for i in first..=last {
            g[i - 1] += jump * hat_integral(grid, i, a, b);
        }
    }
    for &k in &delta_nodes {
        g[k - 1] -= ops.delta_strength * z[k - 1];
    }
    Ok(ResidualVector(FunctionalVector(g)))
}

/// `‖g(z₁) - g(z₂)‖_{H⁻¹} / ((‖z₁‖^{1/2} + ‖z₂‖^{1/2}) ‖z₁ - z₂‖_{H₀¹})`
/// with `H₀¹` norms throughout; `0` when `z₁ = z₂`.
pub fn lipschitz_probe(
    z1: &[f64],
    z2: &[f64],
    n: usize,
    sign: Sign,
    ops: &OperatorMatrices,
) -> Result<f64> {
    let g1 = residual_g(z1, n, sign, ops)?;
    let g2 = residual_g(z2, n, sign, ops)?;
    let diff: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| a - b).collect();
    let dz = norm(&diff, ops, NormKind::H01)?;
    if dz == 0.0 {
        return Ok(0.0);
    }
    let dg: Vec<f64> = g1.entries().iter().zip(g2.entries()).map(|(a, b)| a - b).collect();
    let num = functional_norm(&FunctionalVector(dg), ops)?;
    let den = norm(z1, ops, NormKind::H01)?.sqrt() + norm(z2, ops, NormKind::H01)?.sqrt();
    Ok(num / (den * dz))
}
