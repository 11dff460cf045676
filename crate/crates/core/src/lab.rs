//! Desk-scale experiments around the equilibria: escape rates from `vₙ±`,
//! decay towards `v₁⁺`, the `3/2` law of the linearization remainder,
//! tangency of the unstable and stable sets, and heteroclinic probes.
//!
//! Each experiment is a pure function of its parameters and returns an
//! [`ExperimentReport`]; sweeps run in parallel on the rayon pool and are
//! collected in input order, so reports are bit-identical across runs and
//! thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::discretize::{assemble, norm, Grid, NormKind, OperatorMatrices};
use crate::equilibria::{energy, nearest_equilibrium, Equilibrium, Sign};
use crate::error::{Error, Result};
use crate::inclusion::{residual_g, SolverConfig, Stepper};
use crate::spectral::{
    closed_form_negative_roots, fem_spectrum, find_eigenvalues, perturbation_direction, projections,
    InnerProduct, SpectralDecomposition, SpectralProjector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// Range of the fit variable over which a measurement was taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub variable: String,
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(variable: &str, lo: f64, hi: f64) -> Self {
        Self { variable: variable.into(), lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub window: Window,
    /// RMS residual of the fit in the fitted coordinates; `0` for maxima.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A table written next to the report as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: serde_json::Value,
    pub measurements: Vec<Measurement>,
    pub checks: Vec<Check>,
    pub status: Status,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl ExperimentReport {
    fn new(experiment: &str, parameters: &impl Serialize) -> Result<Self> {
        Ok(Self {
            experiment: experiment.into(),
            parameters: serde_json::to_value(parameters)?,
            measurements: Vec::new(),
            checks: Vec::new(),
            status: Status::Pass,
            notes: Vec::new(),
            series: Vec::new(),
        })
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    /// Pass iff every check passed; `Inconclusive` is sticky.
    fn finish(mut self) -> Self {
        if self.status != Status::Inconclusive {
            self.status = if self.checks.iter().all(|c| c.passed) { Status::Pass } else { Status::Fail };
        }
        self
    }

    pub fn measurement(&self, name: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.name == name)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Least-squares line `y ≈ slope·x + intercept` with RMS residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::EmptyWindow(format!("{} points, need at least 2", x.len())));
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::EmptyWindow("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Ok(LinearFit { slope, intercept, residual: (ss / k).sqrt() })
}

fn distance(u: &[f64], v: &[f64], ops: &OperatorMatrices, kind: NormKind) -> Result<f64> {
    let z: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    norm(&z, ops, kind)
}

/// `≈ 1024` cells, aligned with the zeros of `vₙ`.
fn default_per_subinterval(n: usize) -> usize {
    let n = n.max(1);
    (1024 + n / 2) / n
}

/// Most negative eigenvalue of `L` at `vₙ±`, from the shooter.
fn lambda_one(n: usize) -> Result<f64> {
    let l = find_eigenvalues(n, 1, None)?.eigenvalues[0];
    if l >= 0.0 {
        return Err(Error::InvalidArgument(format!("v{n} has no unstable direction")));
    }
    Ok(l)
}

// ---------------------------------------------------------------- growth

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthParams {
    pub n: usize,
    pub sign: Sign,
    pub eps: f64,
    /// Sign of the initial kick along `e₁`.
    pub direction: Sign,
    pub per_subinterval: Option<usize>,
    pub dt: f64,
    pub delta0: f64,
    pub t_max: f64,
    pub relative_tolerance: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self {
            n: 2,
            sign: Sign::Plus,
            eps: 1e-5,
            direction: Sign::Plus,
            per_subinterval: None,
            dt: 1e-5,
            delta0: 1e-2,
            t_max: 5.0,
            relative_tolerance: 0.10,
        }
    }
}

/// Fits `d/dt log ‖z‖_{L²}` on `10ε ≤ ‖z‖ ≤ δ₀/10` for the run from
/// `vₙ± ± ε e₁`, against `|λ₁|`.
pub fn growth_rate(p: &GrowthParams) -> Result<ExperimentReport> {
    let mut params = p.clone();
    params.per_subinterval = Some(p.per_subinterval.unwrap_or_else(|| default_per_subinterval(p.n)));
    let mut report = ExperimentReport::new("growth", &params)?;
    if p.n < 2 {
        return Err(Error::InvalidArgument("growth needs n >= 2".into()));
    }
    let (lo, hi) = (10.0 * p.eps, p.delta0 / 10.0);
    if !(p.eps > 0.0) || lo >= hi {
        return Err(Error::EmptyWindow(format!("10 eps = {lo} is not below delta0/10 = {hi}")));
    }
    let grid = Grid::new(p.n, params.per_subinterval.unwrap_or_default())?;
    let ops = assemble(&grid);
    let eq = Equilibrium::new(p.n, p.sign);
    let v = eq.sample(&grid);
    let e1 = perturbation_direction(p.n, 1, &ops)?;
    let kick = p.direction.value() * p.eps;
    let mut u: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a + kick * b).collect();
    let stepper = Stepper::new(&ops, SolverConfig::new(p.dt, p.t_max)?)?;

    let mut series = Series::new("growth", &["t", "dist_L2"]);
    let (mut ts, mut logs) = (Vec::new(), Vec::new());
    let mut t = 0.0;
    let mut d = distance(&u, &v, &ops, NormKind::L2)?;
    series.rows.push(vec![t, d]);
    let mut k = 0usize;
    while d <= p.delta0 && t < p.t_max {
        u = stepper.step(&u)?;
        k += 1;
        t = k as f64 * p.dt;
        d = distance(&u, &v, &ops, NormKind::L2)?;
        if d >= lo && d <= hi {
            ts.push(t);
            logs.push(d.ln());
        }
        if k % 10 == 0 {
            series.rows.push(vec![t, d]);
        }
    }
    report.check(
        "exits the delta0 ball",
        d > p.delta0,
        format!("dist_L2 = {d:.6e} at t = {t:.6}"),
    );
    let reference = -lambda_one(p.n)?;
    let fit = linear_fit(&ts, &logs)?;
    report.measurements.push(Measurement {
        name: "slope".into(),
        value: fit.slope,
        reference: Some(reference),
        window: Window::new("dist_L2", lo, hi),
        residual: fit.residual,
        points: ts.len(),
    });
    report.measurements.push(Measurement {
        name: "fit_time_window".into(),
        value: ts.last().copied().unwrap_or(0.0) - ts[0],
        reference: None,
        window: Window::new("t", ts[0], *ts.last().unwrap_or(&ts[0])),
        residual: 0.0,
        points: ts.len(),
    });
    let rel = (fit.slope - reference).abs() / reference;
    report.check(
        "slope matches |lambda_1|",
        rel <= p.relative_tolerance,
        format!(
            "slope {:.6}, |lambda_1| {:.6}, relative error {:.4} (tolerance {})",
            fit.slope, reference, rel, p.relative_tolerance
        ),
    );
    if let Ok(roots) = closed_form_negative_roots(p.n) {
        let tau = roots.iter().cloned().fold(0.0, f64::max);
        report.notes.push(format!(
            "closed-form reference tau = {tau:.12}, tau^2 = {:.12}; shooter |lambda_1| = {reference:.12}",
            tau * tau
        ));
    }
    report.series.push(series);
    Ok(report.finish())
}

// ---------------------------------------------------------------- decay

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayParams {
    pub eps: f64,
    /// `w = sin(mode·πx)`.
    pub mode: usize,
    pub cells: usize,
    pub dt: f64,
    pub t_end: f64,
    pub ball: f64,
    pub relative_tolerance: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self { eps: 1e-3, mode: 1, cells: 256, dt: 1e-4, t_end: 1.5, ball: 1e-2, relative_tolerance: 0.05 }
    }
}

/// Run from `v₁⁺ + ε sin(mode·πx)`; fits the late decay slope of
/// `log ‖z‖_{L²}` on `ε·10⁻⁶ ≤ ‖z‖ ≤ ε·10⁻²` against `-π²`.
pub fn decay_rate(p: &DecayParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("decay", p)?;
    if p.mode == 0 {
        return Err(Error::InvalidArgument("mode is 1-based".into()));
    }
    if p.mode > 1 {
        // the selection is frozen near v₁⁺, so z follows the heat semigroup
        // and a single sine never excites sin(πx)
        report.notes.push(format!(
            "sin({}πx) is a heat eigenfunction: the decay stays at -({}π)²",
            p.mode, p.mode
        ));
    }
    let grid = Grid::new(1, p.cells)?;
    let ops = assemble(&grid);
    let v = Equilibrium::plus(1).sample(&grid);
    let w = grid.sample(|x| (p.mode as f64 * std::f64::consts::PI * x).sin());
    let mut u: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + p.eps * b).collect();
    let cfg = SolverConfig::new(p.dt, p.t_end)?;
    let stepper = Stepper::new(&ops, cfg)?;

    let mut series = Series::new("decay", &["t", "dist_L2"]);
    let d0 = distance(&u, &v, &ops, NormKind::L2)?;
    series.rows.push(vec![0.0, d0]);
    let (lo, hi) = (p.eps.abs() * 1e-6, p.eps.abs() * 1e-2);
    let (mut ts, mut logs) = (Vec::new(), Vec::new());
    let (mut max_d, mut prev, mut increases) = (d0, d0, 0usize);
    let mut positive = u.iter().all(|x| *x > 0.0);
    for k in 1..=cfg.steps() {
        u = stepper.step(&u)?;
        let t = k as f64 * p.dt;
        let d = distance(&u, &v, &ops, NormKind::L2)?;
        positive &= u.iter().all(|x| *x > 0.0);
        max_d = max_d.max(d);
        if d > prev * (1.0 + 1e-12) + 1e-300 {
            increases += 1;
        }
        prev = d;
        if d >= lo && d <= hi {
            ts.push(t);
            logs.push(d.ln());
        }
        if k % 10 == 0 {
            series.rows.push(vec![t, d]);
        }
    }
    report.series.push(series);
    report.check(
        "stays in the ball",
        max_d <= p.ball,
        format!("max dist_L2 = {max_d:.6e}, ball {:.1e}", p.ball),
    );
    if !positive {
        report.status = Status::Inconclusive;
        report.notes.push(
            "the perturbed profile lost positivity inside (0, 1); the selection is no longer frozen"
                .into(),
        );
        return Ok(report.finish());
    }
    if p.eps == 0.0 {
        report.check(
            "steady",
            d0 == 0.0 && max_d <= 1e-12,
            format!("max dist_L2 = {max_d:.3e} (roundoff only)"),
        );
        report.notes.push("eps = 0: z is zero up to roundoff, the decay slope is undefined".into());
        return Ok(report.finish());
    }
    report.check(
        "distance decreases monotonically",
        increases == 0,
        format!("{increases} increasing steps"),
    );
    let fit = linear_fit(&ts, &logs)?;
    let reference = -std::f64::consts::PI.powi(2);
    report.measurements.push(Measurement {
        name: "slope".into(),
        value: fit.slope,
        reference: Some(reference),
        window: Window::new("dist_L2", lo, hi),
        residual: fit.residual,
        points: ts.len(),
    });
    let rel = (fit.slope - reference).abs() / reference.abs();
    report.check(
        "slope matches -pi^2",
        rel <= p.relative_tolerance,
        format!("slope {:.6}, relative error {:.4} (tolerance {})", fit.slope, rel, p.relative_tolerance),
    );
    Ok(report.finish())
}

// ---------------------------------------------------------------- residual

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Direction {
    /// `eᵢ` of `L` at `vₙ±`, 1-based.
    Eigen { index: usize },
    /// `sin(k·πx)`.
    Sine { k: usize },
}

impl Direction {
    fn sample(&self, n: usize, ops: &OperatorMatrices) -> Result<Vec<f64>> {
        match *self {
            Direction::Eigen { index } => perturbation_direction(n, index, ops),
            Direction::Sine { k } => {
                Ok(ops.grid.sample(|x| (k as f64 * std::f64::consts::PI * x).sin()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualParams {
    pub n: usize,
    pub sign: Sign,
    pub eps_list: Vec<f64>,
    pub direction: Direction,
    pub per_subinterval: usize,
    pub slope_lo: f64,
    pub slope_hi: f64,
}

impl Default for ResidualParams {
    fn default() -> Self {
        Self {
            n: 2,
            sign: Sign::Plus,
            eps_list: vec![1e-2, 1e-3, 1e-4, 1e-5],
            direction: Direction::Eigen { index: 1 },
            per_subinterval: 8192,
            slope_lo: 1.3,
            slope_hi: 1.7,
        }
    }
}

/// Log-log slope of `‖g(ε·w)‖_{H⁻¹}` against `ε`.
///
/// When `w` vanishes at every `j/n` the zeros do not move at first order and
/// the check becomes one-sided: slope at least `slope_hi`.
pub fn residual_scaling(p: &ResidualParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("residual", p)?;
    let grid = Grid::new(p.n, p.per_subinterval)?;
    let ops = assemble(&grid);
    let mut w = p.direction.sample(p.n, &ops)?;
    let peak = w.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let pinned = grid
        .delta_interior_indices()
        .iter()
        .all(|&k| w[k].abs() <= 1e-12 * peak);
    if pinned {
        // sin(kπ·j/n) comes out as ~1e-16, not 0; left alone it feeds a
        // residual linear in eps through the delta term
        for k in grid.delta_interior_indices() {
            w[k] = 0.0;
        }
    }
    let norms = p
        .eps_list
        .par_iter()
        .map(|&eps| {
            let z: Vec<f64> = w.iter().map(|x| eps * x).collect();
            residual_g(&z, p.n, p.sign, &ops)?.hminus1_norm(&ops)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut series = Series::new("residual", &["eps", "residual_Hm1"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&eps, &r) in p.eps_list.iter().zip(&norms) {
        series.rows.push(vec![eps, r]);
        if eps > 0.0 && r > 0.0 {
            xs.push(eps.ln());
            ys.push(r.ln());
        } else if eps == 0.0 {
            report.check("zero amplitude gives zero residual", r == 0.0, format!("residual {r:e}"));
        }
    }
    report.series.push(series);
    let positive_eps = p.eps_list.iter().filter(|e| **e > 0.0).count();
    let (lo_eps, hi_eps) = p
        .eps_list
        .iter()
        .filter(|e| **e > 0.0)
        .fold((f64::INFINITY, 0.0_f64), |(a, b), e| (a.min(*e), b.max(*e)));
    if xs.is_empty() && positive_eps > 0 {
        report.notes.push("residual vanishes identically along this direction".into());
        report.check(
            "faster than the 3/2 power",
            pinned,
            "g(eps w) = 0 for every eps".into(),
        );
        return Ok(report.finish());
    }
    let fit = linear_fit(&xs, &ys)?;
    report.measurements.push(Measurement {
        name: "exponent".into(),
        value: fit.slope,
        reference: Some(1.5),
        window: Window::new("eps", lo_eps, hi_eps),
        residual: fit.residual,
        points: xs.len(),
    });
    if pinned {
        report.notes.push("direction vanishes at every j/n: the bound is one-sided".into());
        report.check(
            "faster than the 3/2 power",
            fit.slope >= p.slope_hi,
            format!("slope {:.4} (need >= {})", fit.slope, p.slope_hi),
        );
    } else {
        report.check(
            "exponent in range",
            fit.slope >= p.slope_lo && fit.slope <= p.slope_hi,
            format!("slope {:.4} (range [{}, {}])", fit.slope, p.slope_lo, p.slope_hi),
        );
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------- tangency

fn projector_for<'a>(
    dec: &'a SpectralDecomposition,
    ops: &'a OperatorMatrices,
    inner: InnerProduct,
) -> Result<SpectralProjector<'a>> {
    projections(dec, ops, inner)
}

/// `(‖E₁z‖, ‖E₂z‖)` in `kind`, with `E₂ = I - E₁`.
fn split_norms(p: &SpectralProjector, z: &[f64], ops: &OperatorMatrices, kind: NormKind) -> Result<(f64, f64)> {
    let e1 = p.unstable_part(z)?;
    let e2: Vec<f64> = z.iter().zip(&e1).map(|(a, b)| a - b).collect();
    Ok((norm(&e1, ops, kind)?, norm(&e2, ops, kind)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TangencyUnstableParams {
    pub n: usize,
    pub sign: Sign,
    pub eps: f64,
    pub delta0: f64,
    pub per_subinterval: Option<usize>,
    pub dt: f64,
    pub inner: InnerProduct,
    pub retained: usize,
    pub record_stride: usize,
    /// `‖z‖_{H₀¹}` range over which the headline `K` is taken.
    pub window_lo: f64,
    pub window_hi: f64,
    pub t_max: f64,
}

impl Default for TangencyUnstableParams {
    fn default() -> Self {
        Self {
            n: 2,
            sign: Sign::Plus,
            eps: 1e-6,
            delta0: 1e-2,
            per_subinterval: None,
            dt: 1e-5,
            inner: InnerProduct::L2,
            retained: 16,
            record_stride: 10,
            window_lo: 1e-5,
            window_hi: 1e-3,
            t_max: 5.0,
        }
    }
}

fn max_ratio(rows: &[Vec<f64>], lo: f64, hi: f64) -> (f64, usize) {
    rows.iter()
        .filter(|r| r[1] >= lo && r[1] <= hi)
        .fold((0.0_f64, 0), |(m, c), r| (m.max(r[3] / r[1].sqrt()), c + 1))
}

/// Grows the unstable branch from `z(0) = ε e₁` and tabulates
/// `r = ‖E₂z‖/‖E₁z‖` while `‖z‖_{H₀¹} ≤ δ₀`. The headline bound is
/// `K = max r/‖z‖^{1/2}` over the window, all norms `H₀¹`.
pub fn tangency_unstable(p: &TangencyUnstableParams) -> Result<ExperimentReport> {
    let mut params = p.clone();
    params.per_subinterval = Some(p.per_subinterval.unwrap_or_else(|| default_per_subinterval(p.n)));
    let mut report = ExperimentReport::new("tangency-u", &params)?;
    if !(p.eps > 0.0) || p.eps >= p.delta0 {
        return Err(Error::InvalidArgument("need 0 < eps < delta0".into()));
    }
    let grid = Grid::new(p.n, params.per_subinterval.unwrap_or_default())?;
    let ops = assemble(&grid);
    let dec = fem_spectrum(&ops, p.retained)?;
    let proj = projector_for(&dec, &ops, p.inner)?;
    let m = dec.negative_count;
    report.notes.push(format!(
        "{} unstable directions; projector Gram condition {:.3e}; H^-1 Gram off-diagonal mass {:.3e}",
        m,
        proj.condition,
        dec.off_diagonal_mass(InnerProduct::Hminus1)
    ));
    let v = Equilibrium::new(p.n, p.sign).sample(&grid);
    let e1 = dec.eigenfunctions[0].clone();
    let mut u: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a + p.eps * b).collect();
    let stepper = Stepper::new(&ops, SolverConfig::new(p.dt, p.t_max)?)?;

    let mut series = Series::new("tangency_u", &["t", "z_H01", "z_L2", "r_H01", "r_L2"]);
    let mut row = |t: f64, u: &[f64]| -> Result<f64> {
        let z: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        let (a1, a2) = split_norms(&proj, &z, &ops, NormKind::H01)?;
        let (b1, b2) = split_norms(&proj, &z, &ops, NormKind::L2)?;
        let zh = norm(&z, &ops, NormKind::H01)?;
        series.rows.push(vec![t, zh, norm(&z, &ops, NormKind::L2)?, a2 / a1, b2 / b1]);
        Ok(zh)
    };
    let mut zh = row(0.0, &u)?;
    let mut k = 0usize;
    loop {
        u = stepper.step(&u)?;
        k += 1;
        let t = k as f64 * p.dt;
        if t > p.t_max {
            break;
        }
        if k % p.record_stride == 0 {
            zh = row(t, &u)?;
            if zh > p.delta0 {
                series.rows.pop();
                break;
            }
        }
    }
    let rows = &series.rows;
    let r0 = rows[0][3];
    report.check("r(0) vanishes", r0 <= 1e-8, format!("r(0) = {r0:.3e}"));
    report.check(
        "reaches delta0",
        zh > p.delta0,
        format!("last ||z||_H01 = {zh:.4e}"),
    );
    let (k_window, count) = max_ratio(rows, p.window_lo, p.window_hi);
    let z_min = rows.iter().map(|r| r[1]).filter(|z| *z >= p.window_lo).fold(f64::INFINITY, f64::min);
    let z_max = rows.iter().map(|r| r[1]).filter(|z| *z <= p.window_hi).fold(0.0, f64::max);
    report.measurements.push(Measurement {
        name: "K".into(),
        value: k_window,
        reference: None,
        window: Window::new("z_H01", p.window_lo, p.window_hi),
        residual: 0.0,
        points: count,
    });
    report.check(
        "finite K across the window",
        k_window.is_finite() && count >= 2 && z_min <= 2.0 * p.window_lo && z_max >= 0.5 * p.window_hi,
        format!("K = {k_window:.4e} from {count} rows covering [{z_min:.3e}, {z_max:.3e}]"),
    );
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r[1] >= p.window_lo && r[1] <= p.window_hi && r[3] > 0.0)
        .map(|r| (r[1].ln(), r[3].ln()))
        .unzip();
    if let Ok(fit) = linear_fit(&xs, &ys) {
        report.measurements.push(Measurement {
            name: "ratio_exponent".into(),
            value: fit.slope,
            reference: Some(0.5),
            window: Window::new("z_H01", p.window_lo, p.window_hi),
            residual: fit.residual,
            points: xs.len(),
        });
    }
    let (k_full, _) = max_ratio(rows, p.window_lo, p.delta0);
    let (k_half, _) = max_ratio(rows, p.window_lo, 0.5 * p.delta0);
    report.measurements.push(Measurement {
        name: "K_delta0".into(),
        value: k_full,
        reference: None,
        window: Window::new("z_H01", p.window_lo, p.delta0),
        residual: 0.0,
        points: rows.len(),
    });
    report.measurements.push(Measurement {
        name: "K_half_delta0".into(),
        value: k_half,
        reference: None,
        window: Window::new("z_H01", p.window_lo, 0.5 * p.delta0),
        residual: 0.0,
        points: rows.len(),
    });
    report.check(
        "halving delta0 keeps K within 2x",
        k_half <= 2.0 * k_full,
        format!("K(delta0) = {k_full:.4e}, K(delta0/2) = {k_half:.4e}"),
    );
    report.series.push(series);
    Ok(report.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TangencyStableParams {
    pub n: usize,
    pub sign: Sign,
    pub eps_list: Vec<f64>,
    /// 1-based eigen index of the initial direction; `None` is the first
    /// stable one, `m + 1`.
    pub initial_index: Option<usize>,
    pub per_subinterval: Option<usize>,
    pub dt: f64,
    pub inner: InnerProduct,
    pub retained: usize,
    pub slope_lo: f64,
    pub slope_hi: f64,
}

impl Default for TangencyStableParams {
    fn default() -> Self {
        Self {
            n: 2,
            sign: Sign::Plus,
            eps_list: vec![1e-3, 1e-4, 1e-5],
            initial_index: None,
            per_subinterval: None,
            dt: 1e-5,
            inner: InnerProduct::L2,
            retained: 16,
            slope_lo: 0.35,
            slope_hi: 0.65,
        }
    }
}

/// Window length `T` with `e^{|λ₁|T} ε^{3/2} = ε/10`.
pub fn stable_window(eps: f64, lambda1: f64) -> Result<f64> {
    let t = (eps.powf(-0.5) / 10.0).ln() / lambda1.abs();
    if !(t > 0.0) {
        return Err(Error::EmptyWindow(format!("eps = {eps} leaves no time before unstable growth")));
    }
    Ok(t)
}

/// For each `ε`, runs from `vₙ± + ε e_{m+1}` over `[0, T]` and records
/// `max ‖E₁z‖/‖E₂z‖` in `H₀¹`; the maxima should scale like `ε^{1/2}`.
pub fn tangency_stable(p: &TangencyStableParams) -> Result<ExperimentReport> {
    let mut params = p.clone();
    params.per_subinterval = Some(p.per_subinterval.unwrap_or_else(|| default_per_subinterval(p.n)));
    let mut report = ExperimentReport::new("tangency-s", &params)?;
    let grid = Grid::new(p.n, params.per_subinterval.unwrap_or_default())?;
    let ops = assemble(&grid);
    let dec = fem_spectrum(&ops, p.retained)?;
    let proj = projector_for(&dec, &ops, p.inner)?;
    let m = dec.negative_count;
    let index = p.initial_index.unwrap_or(m + 1);
    if index == 0 || index > dec.len() {
        return Err(Error::InvalidArgument(format!("initial_index {index} outside 1..={}", dec.len())));
    }
    let lambda1 = dec.eigenvalues[0];
    let dir = &dec.eigenfunctions[index - 1];
    let v = Equilibrium::new(p.n, p.sign).sample(&grid);
    let stepper = Stepper::new(&ops, SolverConfig::new(p.dt, p.dt)?)?;

    let runs = p
        .eps_list
        .par_iter()
        .map(|&eps| -> Result<(f64, f64, f64, f64)> {
            let t_window = stable_window(eps, lambda1)?;
            let mut u: Vec<f64> = v.iter().zip(dir).map(|(a, b)| a + eps * b).collect();
            let ratio = |u: &[f64]| -> Result<(f64, f64)> {
                let z: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
                let (a1, a2) = split_norms(&proj, &z, &ops, NormKind::H01)?;
                let (b1, b2) = split_norms(&proj, &z, &ops, NormKind::L2)?;
                Ok((a1 / a2, b1 / b2))
            };
            let (r0, _) = ratio(&u)?;
            let (mut best_h, mut best_l) = ratio(&u)?;
            let steps = (t_window / p.dt).ceil() as usize;
            for _ in 0..steps {
                u = stepper.step(&u)?;
                let (rh, rl) = ratio(&u)?;
                best_h = best_h.max(rh);
                best_l = best_l.max(rl);
            }
            Ok((t_window, r0, best_h, best_l))
        })
        .collect::<Vec<_>>();

    let mut series = Series::new("tangency_s", &["eps", "T", "ratio_0", "max_ratio_H01", "max_ratio_L2"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&eps, run) in p.eps_list.iter().zip(runs) {
        match run {
            Ok((t, r0, rh, rl)) => {
                series.rows.push(vec![eps, t, r0, rh, rl]);
                xs.push(eps.ln());
                ys.push(rh.ln());
                report.measurements.push(Measurement {
                    name: format!("K(eps={eps:e})"),
                    value: rh / eps.sqrt(),
                    reference: None,
                    window: Window::new("t", 0.0, t),
                    residual: 0.0,
                    points: (t / p.dt).ceil() as usize + 1,
                });
                if index <= m {
                    report.check(
                        &format!("control ratio >= 1 at eps = {eps:e}"),
                        r0 >= 1.0,
                        format!("ratio(0) = {r0:.4e}"),
                    );
                }
            }
            Err(Error::EmptyWindow(msg)) => {
                report.status = Status::Inconclusive;
                report.notes.push(msg);
            }
            Err(e) => return Err(e),
        }
    }
    report.series.push(series);
    if index > m && xs.len() >= 2 {
        let fit = linear_fit(&xs, &ys)?;
        let lo = p.eps_list.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.eps_list.iter().cloned().fold(0.0, f64::max);
        report.measurements.push(Measurement {
            name: "max_ratio_exponent".into(),
            value: fit.slope,
            reference: Some(0.5),
            window: Window::new("eps", lo, hi),
            residual: fit.residual,
            points: xs.len(),
        });
        report.check(
            "max ratio scales like eps^(1/2)",
            fit.slope >= p.slope_lo && fit.slope <= p.slope_hi,
            format!("log-log slope {:.4} (range [{}, {}])", fit.slope, p.slope_lo, p.slope_hi),
        );
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------- connections

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConnectParams {
    pub n_from: usize,
    pub sign: Sign,
    pub direction: Sign,
    pub eps: f64,
    /// Total cells; must be a multiple of `max(n_from, 1)`.
    pub cells: usize,
    pub dt: f64,
    pub t_end: f64,
    pub n_max: usize,
    pub distance_tolerance: f64,
    /// Settled once the energy drops by less than this fraction over
    /// `plateau_steps` steps.
    pub plateau_tolerance: f64,
    pub plateau_steps: usize,
}

impl Default for ConnectParams {
    fn default() -> Self {
        Self {
            n_from: 2,
            sign: Sign::Plus,
            direction: Sign::Plus,
            eps: 1e-3,
            cells: 120,
            dt: 1e-4,
            t_end: 20.0,
            n_max: 6,
            distance_tolerance: 1e-3,
            plateau_tolerance: 1e-10,
            plateau_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionOutcome {
    pub source: Equilibrium,
    pub settled: bool,
    pub settle_time: f64,
    pub target: Equilibrium,
    pub distance: f64,
    pub source_energy: f64,
    pub final_energy: f64,
}

/// Runs from `v_{n_from}^sign + direction·ε e₁` (`ε sin(πx)` from `v₀`)
/// until the energy plateaus, then names the nearest equilibrium.
pub fn connection_probe(p: &ConnectParams) -> Result<(ExperimentReport, ConnectionOutcome)> {
    let mut report = ExperimentReport::new("connect", p)?;
    let base = p.n_from.max(1);
    if p.cells % base != 0 {
        return Err(Error::InvalidArgument(format!("cells = {} is not a multiple of {base}", p.cells)));
    }
    let grid = Grid::new(base, p.cells / base)?;
    let ops = assemble(&grid);
    let source = Equilibrium::new(p.n_from, p.sign);
    let v = source.sample(&grid);
    let e1 = perturbation_direction(p.n_from, 1, &ops)?;
    let kick = p.direction.value() * p.eps;
    let mut u: Vec<f64> = v.iter().zip(&e1).map(|(a, b)| a + kick * b).collect();
    let cfg = SolverConfig::new(p.dt, p.t_end)?;
    let stepper = Stepper::new(&ops, cfg)?;

    let source_energy = energy(&v, &ops)?;
    let mut history: VecDeque<f64> = VecDeque::with_capacity(p.plateau_steps + 1);
    history.push_back(energy(&u, &ops)?);
    let mut series = Series::new("connect", &["t", "energy", "dist_source_L2"]);
    series.rows.push(vec![0.0, history[0], distance(&u, &v, &ops, NormKind::L2)?]);
    let (mut settled, mut settle_time) = (false, p.t_end);
    for k in 1..=cfg.steps() {
        u = stepper.step(&u)?;
        let e = energy(&u, &ops)?;
        history.push_back(e);
        if history.len() > p.plateau_steps + 1 {
            history.pop_front();
        }
        let t = k as f64 * p.dt;
        if k % 100 == 0 {
            series.rows.push(vec![t, e, distance(&u, &v, &ops, NormKind::L2)?]);
        }
        if history.len() == p.plateau_steps + 1 {
            let drop = history[0] - e;
            if drop <= p.plateau_tolerance * e.abs().max(f64::MIN_POSITIVE) {
                settled = true;
                settle_time = t;
                break;
            }
        }
    }
    report.series.push(series);
    let (target, dist) = nearest_equilibrium(&u, &ops, p.n_max)?;
    let final_energy = energy(&u, &ops)?;
    let outcome = ConnectionOutcome {
        source,
        settled,
        settle_time,
        target,
        distance: dist,
        source_energy,
        final_energy,
    };
    report.measurements.push(Measurement {
        name: "distance_to_target".into(),
        value: dist,
        reference: None,
        window: Window::new("t", 0.0, settle_time),
        residual: 0.0,
        points: 1,
    });
    report.notes.push(format!("{source} -> {target} (settled: {settled}, t = {settle_time:.4})"));
    if !settled {
        report.status = Status::Inconclusive;
        report.notes.push("energy still decreasing at t_end; no endpoint is claimed".into());
        return Ok((report.finish(), outcome));
    }
    report.check("no homoclinic", target != source, format!("{source} -> {target}"));
    report.check(
        "energy decreases",
        final_energy < source_energy,
        format!("E(source) = {source_energy:.10e}, E(end) = {final_energy:.10e}"),
    );
    report.check(
        "lower index",
        target.n < p.n_from || p.n_from == 0,
        format!("{source} -> {target}"),
    );
    report.check(
        "close to target",
        dist <= p.distance_tolerance,
        format!("distance {dist:.3e} (tolerance {:.1e})", p.distance_tolerance),
    );
    Ok((report.finish(), outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|t| 2.5 * t - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!(f.residual < 1e-14);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn empty_growth_window() {
        let p = GrowthParams { eps: 1e-3, delta0: 1e-2, ..Default::default() };
        assert!(matches!(growth_rate(&p), Err(Error::EmptyWindow(_))));
    }

    #[test]
    fn stable_window_length() {
        let t = stable_window(1e-4, -14.669).unwrap();
        assert!((t - 10f64.ln() / 14.669).abs() < 1e-12);
        assert!(stable_window(1e-1, -14.669).is_err());
    }

    #[test]
    fn decay_steady_at_zero_eps() {
        let p = DecayParams { eps: 0.0, t_end: 0.01, ..Default::default() };
        let r = decay_rate(&p).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.measurements.is_empty());
    }

    #[test]
    fn residual_zero_eps_entry() {
        let p = ResidualParams {
            eps_list: vec![1e-3, 1e-4, 0.0],
            per_subinterval: 256,
            ..Default::default()
        };
        let r = residual_scaling(&p).unwrap();
        assert!(r.check_named("zero amplitude gives zero residual").unwrap().passed);
    }
}
