//! Transfer-matrix shooting for `-U'' - 4n Σ δ_{k/n} U = λ U`, `U(0) = U(1) = 0`.
//!
//! On each interval `(k/n, (k+1)/n)` the pair `(U, U')` is carried by the
//! exact propagator of `-U'' = λU`; at every interior node `U` is continuous
//! and `U'` drops by `4n U`. The terminal value `D(λ) = U(1)` vanishes
//! exactly at the eigenvalues.

use crate::equilibria::Side;
use crate::error::{Error, Result};

/// Closed-form propagator of `-U'' = λ U` over a distance `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagator {
    /// `λ = τ² > 0`.
    Oscillatory { tau: f64 },
    /// `λ = -τ² < 0`.
    Hyperbolic { tau: f64 },
    /// `λ = 0`: `U` is carried affinely.
    Affine,
}

impl Propagator {
    pub fn new(lambda: f64) -> Self {
        if lambda > 0.0 {
            Propagator::Oscillatory { tau: lambda.sqrt() }
        } else if lambda < 0.0 {
            Propagator::Hyperbolic { tau: (-lambda).sqrt() }
        } else {
            Propagator::Affine
        }
    }

    /// `(U(y), U'(y))` from `(U(0), U'(0)) = (u, du)`.
    #[inline]
    pub fn advance(&self, u: f64, du: f64, y: f64) -> (f64, f64) {
        match *self {
            Propagator::Oscillatory { tau } => {
                let (s, c) = (tau * y).sin_cos();
                (u * c + du * s / tau, -u * tau * s + du * c)
            }
            Propagator::Hyperbolic { tau } => {
                let (s, c) = ((tau * y).sinh(), (tau * y).cosh());
                (u * c + du * s / tau, u * tau * s + du * c)
            }
            Propagator::Affine => (u + du * y, du),
        }
    }

    /// Zeros of `U` on `(0, len]` (or `(0, len)` when `closed_right` is false).
    fn zero_count(&self, u: f64, du: f64, len: f64, closed_right: bool) -> usize {
        match *self {
            Propagator::Oscillatory { tau } => {
                // U = R sin(τy + φ); zeros where τy + φ ∈ πℤ
                let phi = u.atan2(du / tau);
                let pi = std::f64::consts::PI;
                let lo = (phi / pi).floor();
                let end = (phi + tau * len) / pi;
                let mut hi = end.floor();
                if !closed_right && hi == end {
                    hi -= 1.0;
                }
                (hi - lo).max(0.0) as usize
            }
            Propagator::Hyperbolic { tau } => {
                // U = u cosh + du sinh/τ vanishes at most once for y > 0
                if u == 0.0 || du == 0.0 || u.signum() == du.signum() {
                    return 0;
                }
                let target = -u * tau / du;
                let reach = (tau * len).tanh();
                usize::from(target < reach || (closed_right && target == reach))
            }
            Propagator::Affine => {
                if du == 0.0 || u == 0.0 {
                    return 0;
                }
                let y = -u / du;
                usize::from(y > 0.0 && (y < len || (closed_right && y == len)))
            }
        }
    }
}

/// Shooter for the delta-potential eigenproblem with `n ≥ 2` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharacteristicEvaluator {
    n: usize,
}

impl CharacteristicEvaluator {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "the linearization needs n >= 2 interior intervals, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Shooter without interior nodes (`n = 1`) or with any `n ≥ 1`; used to
    /// build perturbation directions for `v₁±` where `L` is the plain Laplacian.
    pub(crate) fn with_intervals(n: usize) -> Self {
        assert!(n >= 1);
        Self { n }
    }

    pub fn mode_n(&self) -> usize {
        self.n
    }

    pub fn interface_strength(&self) -> f64 {
        4.0 * self.n as f64
    }

    /// Propagates `U(0) = 0`, `U'(0) = 1` across `[0, 1]`.
    pub fn shoot(&self, lambda: f64) -> ShotProfile {
        let prop = Propagator::new(lambda);
        let len = 1.0 / self.n as f64;
        let strength = self.interface_strength();
        let mut starts = Vec::with_capacity(self.n);
        let (mut u, mut du) = (0.0, 1.0);
        let mut scale: f64 = 1.0;
        let dscale = match prop {
            Propagator::Oscillatory { tau } | Propagator::Hyperbolic { tau } => tau.max(1.0),
            Propagator::Affine => 1.0,
        };
        let mut left_limits = Vec::with_capacity(self.n);
        for k in 0..self.n {
            starts.push((u, du));
            let (ue, due) = prop.advance(u, du, len);
            left_limits.push((ue, due));
            scale = scale.max(ue.abs()).max(due.abs() / dscale);
            u = ue;
            du = due;
            if k + 1 < self.n {
                du -= strength * u;
            }
        }
        ShotProfile { n: self.n, lambda, prop, starts, left_limits, scale }
    }

    /// `D(λ) = U(1; λ)`.
    pub fn value(&self, lambda: f64) -> f64 {
        self.shoot(lambda).terminal()
    }

    /// Number of eigenvalues strictly below `λ`: by Sturm oscillation it
    /// equals the number of zeros of `U(·; λ)` in `(0, 1)`.
    pub fn count_below(&self, lambda: f64) -> usize {
        self.shoot(lambda).interior_zero_count()
    }
}

/// `D(λ)` for `n ≥ 2`.
pub fn characteristic(n: usize, lambda: f64) -> Result<f64> {
    Ok(CharacteristicEvaluator::new(n)?.value(lambda))
}

/// The propagated solution for one `λ`, with per-interval initial states.
#[derive(Debug, Clone)]
pub struct ShotProfile {
    n: usize,
    lambda: f64,
    prop: Propagator,
    /// `(U, U')` at `k/n⁺` for every interval `k`.
    starts: Vec<(f64, f64)>,
    /// `(U, U')` at `(k+1)/n⁻`.
    left_limits: Vec<(f64, f64)>,
    scale: f64,
}

impl ShotProfile {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn terminal(&self) -> f64 {
        self.left_limits[self.n - 1].0
    }

    /// Magnitude of the propagated state, used to make `|D|` tolerances relative.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn interval_of(&self, x: f64) -> usize {
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

    pub fn value_at(&self, x: f64) -> f64 {
        let k = self.interval_of(x);
        let (u, du) = self.starts[k];
        self.prop.advance(u, du, x - k as f64 / self.n as f64).0
    }

    /// One-sided derivative; the two sides differ by `4n U` at `k/n`.
    pub fn derivative_at(&self, x: f64, side: Side) -> f64 {
        let k = self.interval_of(x);
        let node = k as f64 / self.n as f64;
        if side == Side::Left && k > 0 && x == node {
            return self.left_limits[k - 1].1;
        }
        let (u, du) = self.starts[k];
        self.prop.advance(u, du, x - node).1
    }

    /// `U'(k/n⁻) - U'(k/n⁺) - 4n U(k/n)` for `k = 1..n-1`, computed from the
    /// branch on each side.
    pub fn interface_residuals(&self) -> Vec<f64> {
        let strength = 4.0 * self.n as f64;
        (1..self.n)
            .map(|k| {
                let (u_left, du_left) = self.left_limits[k - 1];
                let (u_right, du_right) = self.starts[k];
                let jump = du_left - du_right - strength * u_left;
                jump.abs().max((u_left - u_right).abs())
            })
            .collect()
    }

    pub fn interior_zero_count(&self) -> usize {
        let len = 1.0 / self.n as f64;
        let mut count = 0;
        for (k, &(u, du)) in self.starts.iter().enumerate() {
            let last = k + 1 == self.n;
            count += self.prop.zero_count(u, du, len, !last);
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hand_propagated_values_at_zero() {
        assert!((characteristic(2, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((characteristic(3, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_family_is_a_root() {
        let d = characteristic(2, 4.0 * PI * PI).unwrap();
        assert!(d.abs() < 1e-14, "{d}");
    }

    #[test]
    fn rejects_small_n() {
        assert!(characteristic(1, 1.0).is_err());
        assert!(CharacteristicEvaluator::new(0).is_err());
    }

    #[test]
    fn propagator_is_continuous_in_lambda() {
        let y = 0.37;
        let (u0, d0) = Propagator::new(0.0).advance(0.3, -1.2, y);
        for lam in [1e-12, -1e-12] {
            let (u, d) = Propagator::new(lam).advance(0.3, -1.2, y);
            assert!((u - u0).abs() < 1e-12 && (d - d0).abs() < 1e-12);
        }
    }

    #[test]
    fn free_laplacian_counts() {
        // one interval: D = sin(τ)/τ, eigenvalues (kπ)²
        let ev = CharacteristicEvaluator::with_intervals(1);
        assert_eq!(ev.count_below(-5.0), 0);
        assert_eq!(ev.count_below(PI * PI - 0.1), 0);
        assert_eq!(ev.count_below(PI * PI + 0.1), 1);
        assert_eq!(ev.count_below(9.0 * PI * PI + 0.1), 3);
    }

    #[test]
    fn count_below_tracks_n2_spectrum() {
        let ev = CharacteristicEvaluator::new(2).unwrap();
        assert_eq!(ev.count_below(-64.0), 0);
        assert_eq!(ev.count_below(-15.0), 0);
        assert_eq!(ev.count_below(-14.0), 1);
        assert_eq!(ev.count_below(0.0), 1);
        assert_eq!(ev.count_below(39.0), 1);
        assert_eq!(ev.count_below(40.0), 2);
    }

    #[test]
    fn interface_residuals_vanish_by_construction() {
        let shot = CharacteristicEvaluator::new(4).unwrap().shoot(-30.0);
        assert!(shot.interface_residuals().iter().all(|r| *r < 1e-12));
    }
}
