//! The fixed points `v₀ ≡ 0` and `vₙ±` of the inclusion, in closed form.
//!
//! `vₙ⁺` is the concatenation of `n` parabolic arcs of alternating sign, one
//! per subinterval `[k/n, (k+1)/n]`, each solving `-v'' = ±1` with zero
//! boundary values on its subinterval.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::discretize::{integral_abs, norm, sub, Grid, NormKind, OperatorMatrices};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn parse(s: &str) -> Option<Sign> {
        match s {
            "+" | "plus" | "p" | "1" | "+1" => Some(Sign::Plus),
            "-" | "minus" | "m" | "-1" => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Which one-sided derivative to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `v₀` (`n = 0`, sign ignored) or `vₙ±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Equilibrium {
    pub n: usize,
    pub sign: Sign,
}

/// Zero set of an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroSet {
    Points(Vec<f64>),
    /// `v₀` vanishes on all of `[0, 1]`.
    Everywhere,
}

impl Equilibrium {
    pub fn zero() -> Self {
        Self { n: 0, sign: Sign::Plus }
    }

    pub fn new(n: usize, sign: Sign) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Self { n, sign }
        }
    }

    pub fn plus(n: usize) -> Self {
        Self::new(n, Sign::Plus)
    }

    pub fn minus(n: usize) -> Self {
        Self::new(n, Sign::Minus)
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0
    }

    /// Index `k` of the active arc, `floor(n x)` with the last arc closed on
    /// the right. Robust to `n·(k/n)` rounding below `k`.
    fn branch(&self, x: f64) -> usize {
        let n = self.n;
        let mut k = ((n as f64) * x).floor().max(0.0) as usize;
        if k + 1 < n && ((k + 1) as f64 / n as f64) <= x {
            k += 1;
        }
        if k > 0 && x < k as f64 / n as f64 {
            k -= 1;
        }
        k.min(n - 1)
    }

    /// Sign of arc `k`: `+` on even arcs of `vₙ⁺`.
    fn arc_sign(&self, k: usize) -> f64 {
        let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
        parity * self.sign.value()
    }

    fn arc_value(&self, k: usize, x: f64) -> f64 {
        let n = self.n as f64;
        // y (1/n - y) / 2, with both factors measured from their own node so
        // the value is exactly zero at either end of the arc
        let y = x - k as f64 / n;
        let rest = (k + 1) as f64 / n - x;
        // + 0.0 turns the -0.0 of negative arcs at their ends into 0.0
        self.arc_sign(k) * 0.5 * y * rest + 0.0
    }

    fn arc_slope(&self, k: usize, x: f64) -> f64 {
        let n = self.n as f64;
        let y = x - k as f64 / n;
        self.arc_sign(k) * (-y + 1.0 / (2.0 * n)) + 0.0
    }

    fn check_domain(x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: f64) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.arc_value(self.branch(x), x)
    }

    pub fn eval_derivative(&self, x: f64, side: Side) -> Result<f64> {
        Self::check_domain(x)?;
        if self.n == 0 {
            return Ok(0.0);
        }
        let mut k = self.branch(x);
        if side == Side::Left && k > 0 && x == k as f64 / self.n as f64 {
            k -= 1;
        }
        Ok(self.arc_slope(k, x))
    }

    /// `v''` inside arc interiors: `-1` on positive arcs, `+1` on negative ones.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        if self.n == 0 {
            return Ok(0.0);
        }
        Ok(-self.arc_sign(self.branch(x)))
    }

    pub fn zeros(&self) -> ZeroSet {
        if self.n == 0 {
            return ZeroSet::Everywhere;
        }
        ZeroSet::Points((0..=self.n).map(|k| k as f64 / self.n as f64).collect())
    }

    /// The selection of `H₀(v(x))`: `sign(v(x))`, and `0` where `v` vanishes.
    pub fn heaviside_image(&self, x: f64) -> Result<f64> {
        let v = self.eval(x)?;
        Ok(if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        })
    }

    /// Nodal samples on the interior nodes of `grid`.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(|x| self.value_unchecked(x))
    }

    /// Closed-form `E(vₙ) = -1/(24 n²)`, `E(v₀) = 0`.
    pub fn exact_energy(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            -1.0 / (24.0 * (self.n * self.n) as f64)
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Equilibrium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            write!(f, "v0")
        } else {
            write!(f, "v{}{}", self.n, self.sign)
        }
    }
}

impl std::str::FromStr for Equilibrium {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix('v')
            .ok_or_else(|| Error::InvalidArgument(format!("bad equilibrium label {s:?}")))?;
        if body == "0" {
            return Ok(Equilibrium::zero());
        }
        let (digits, sign) = body.split_at(body.len().saturating_sub(1));
        let sign = Sign::parse(sign)
            .ok_or_else(|| Error::InvalidArgument(format!("bad equilibrium label {s:?}")))?;
        let n: usize = digits
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad equilibrium label {s:?}")))?;
        Ok(Equilibrium::new(n, sign))
    }
}

/// Discrete Lyapunov energy `E(u) = ½ uᵀ K u - ∫ |I_h u|`.
///
/// The `|u|` term is the trapezoid rule with sign-changing cells split at
/// their zero, which is exact for the piecewise-linear interpolant.
pub fn energy(u: &[f64], ops: &OperatorMatrices) -> Result<f64> {
    ops.grid.check_len(u.len())?;
    Ok(0.5 * ops.stiffness.bilinear(u, u) - integral_abs(u, &ops.grid)?)
}

/// Closest member of `{v₀} ∪ {vₙ± : n ≤ n_max}` in the discrete `L²` distance.
pub fn nearest_equilibrium(
    u: &[f64],
    ops: &OperatorMatrices,
    n_max: usize,
) -> Result<(Equilibrium, f64)> {
    ops.grid.check_len(u.len())?;
    let mut best = (Equilibrium::zero(), norm(u, ops, NormKind::L2)?);
    for n in 1..=n_max.max(1) {
        for sign in [Sign::Plus, Sign::Minus] {
            let eq = Equilibrium::new(n, sign);
            let d = norm(&sub(u, &eq.sample(&ops.grid)), ops, NormKind::L2)?;
            if d < best.1 {
                best = (eq, d);
            }
        }
    }
    Ok(best)
}
