//! Time stepping, residual assembly and the discrete norms.

use std::f64::consts::PI;

use inclusion_lab::discretize::{assemble, norm, sub, Grid, NormKind, OperatorMatrices};
use inclusion_lab::equilibria::{energy, Equilibrium, Sign};
use inclusion_lab::inclusion::{lipschitz_probe, residual_g, simulate, step, SolverConfig, Stepper};
use inclusion_lab::lab::linear_fit;
use inclusion_lab::spectral::perturbation_direction;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn ops(n: usize, per: usize) -> OperatorMatrices {
    assemble(&Grid::new(n, per).unwrap())
}

fn perturbed(base: &[f64], dir: &[f64], eps: f64) -> Vec<f64> {
    base.iter().zip(dir).map(|(a, b)| a + eps * b).collect()
}

fn l2_dist(a: &[f64], b: &[f64], ops: &OperatorMatrices) -> f64 {
    norm(&sub(a, b), ops, NormKind::L2).unwrap()
}

/// `∫ (sign(w) - sign(v)) I_hφ - 4n Σ z(j/n) φ(j/n)` cell by cell, with the
/// zeros of the quadratic `w = v + I_h z` on each cell from the quadratic
/// formula.
fn residual_pairing_by_quadrature(z: &[f64], phi: &[f64], n: usize, sign: Sign, ops: &OperatorMatrices) -> f64 {
    let grid = &ops.grid;
    let h = grid.h();
    let v = Equilibrium::new(n, sign);
    let zf = grid.with_boundary(z);
    let pf = grid.with_boundary(phi);
    let mut total = 0.0;
    for j in 0..grid.cells() {
        let x0 = grid.node(j);
        let w = |t: f64| v.eval((x0 + t * h).min(1.0)).unwrap() + (1.0 - t) * zf[j] + t * zf[j + 1];
        let (w0, wm, w1) = (w(0.0), w(0.5), w(1.0));
        let c2 = 2.0 * (w0 - 2.0 * wm + w1);
        let c1 = w1 - w0 - c2;
        let c0 = w0;
        let mut cuts = vec![0.0, 1.0];
        if c2.abs() > 1e-300 {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                for r in [q / c2, if q != 0.0 { c0 / q } else { f64::NAN }] {
                    if r > 0.0 && r < 1.0 {
                        cuts.push(r);
                    }
                }
            }
        } else if c1 != 0.0 {
            let r = -c0 / c1;
            if r > 0.0 && r < 1.0 {
                cuts.push(r);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let sv = v.eval(x0 + 0.5 * h).unwrap().signum();
        let quad = |t: f64| c0 + c1 * t + c2 * t * t;
        let lin = |t: f64| (1.0 - t) * pf[j] + t * pf[j + 1];
        for p in cuts.windows(2) {
            let (a, b) = (p[0], p[1]);
            let sw = quad(0.5 * (a + b)).signum();
            total += (sw - sv) * h * (b - a) * 0.5 * (lin(a) + lin(b));
        }
    }
    for k in 1..n {
        let i = k * grid.per_subinterval();
        total -= 4.0 * n as f64 * zf[i] * pf[i];
    }
    total
}

#[test]
fn equilibrium_is_steady() {
    for per in [512, 1024] {
        let o = ops(2, per);
        let eq = Equilibrium::plus(2);
        let u0 = eq.sample(&o.grid);
        let cfg = SolverConfig::new(1e-4, 1.0).unwrap().with_stride(1000).unwrap();
        let tr = simulate(&u0, &cfg, &o, eq).unwrap();
        assert!(l2_dist(tr.final_state().unwrap(), &u0, &o) <= 1e-6);
    }
    let o = ops(1, 64);
    let zero = vec![0.0; o.grid.interior_len()];
    assert_eq!(step(&zero, &SolverConfig::new(1e-3, 1.0).unwrap(), &o).unwrap(), zero);
}

#[test]
fn unstable_equilibrium_escapes() {
    let o = ops(2, 256);
    let eq = Equilibrium::plus(2);
    let v = eq.sample(&o.grid);
    let u0 = perturbed(&v, &perturbation_direction(2, 1, &o).unwrap(), 1e-4);
    let cfg = SolverConfig::new(1e-4, 1.0).unwrap();
    let tr = simulate(&u0, &cfg, &o, eq).unwrap();
    let exit = tr.dist_l2.iter().position(|&d| d > 1e-2).expect("never left the ball");
    assert!(tr.times[exit] > 0.0 && tr.times[exit] < 1.0);
}

#[test]
fn stable_equilibrium_holds() {
    let o = ops(1, 256);
    let eq = Equilibrium::plus(1);
    let v = eq.sample(&o.grid);
    let bump = o.grid.sample(|x| (PI * x).sin() + 0.5 * (3.0 * PI * x).sin());
    let u0 = perturbed(&v, &bump, 1e-3);
    let cfg = SolverConfig::new(1e-4, 2.0).unwrap();
    let tr = simulate(&u0, &cfg, &o, eq).unwrap();
    assert!(tr.dist_l2.iter().all(|&d| d < 1e-2));
    let settled = tr.times.iter().position(|&t| t >= 0.1).unwrap();
    assert!(tr.dist_l2[settled..].windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn one_step_near_v1_is_heat_flow() {
    let o = ops(1, 512);
    let v = Equilibrium::plus(1).sample(&o.grid);
    let s = o.grid.sample(|x| (PI * x).sin());
    let u = perturbed(&v, &s, 1e-3);
    let dt = 1e-4;
    let next = step(&u, &SolverConfig::new(dt, 1.0).unwrap(), &o).unwrap();
    let ratio = l2_dist(&next, &v, &o) / l2_dist(&u, &v, &o);
    assert!((ratio - (-PI * PI * dt).exp()).abs() <= 1e-5, "{ratio}");
}

#[test]
fn refinement_order_on_escape() {
    // halving h and dt together; the O(dt) time error dominates
    let mut d = Vec::new();
    let mut hs = Vec::new();
    for (per, dt) in [(256usize, 5e-5), (512, 2.5e-5), (1024, 1.25e-5), (2048, 6.25e-6)] {
        let o = ops(2, per);
        let eq = Equilibrium::plus(2);
        let v = eq.sample(&o.grid);
        let u0 = perturbed(&v, &perturbation_direction(2, 1, &o).unwrap(), 1e-4);
        let cfg = SolverConfig::new(dt, 0.4).unwrap().with_stride(usize::MAX).unwrap();
        let tr = simulate(&u0, &cfg, &o, eq).unwrap();
        d.push(l2_dist(tr.final_state().unwrap(), &v, &o));
        hs.push(o.grid.h());
    }
    let diffs: Vec<f64> = d.windows(2).map(|w| (w[0] - w[1]).abs().ln()).collect();
    let logh: Vec<f64> = hs[..3].iter().map(|h| h.ln()).collect();
    let order = linear_fit(&logh, &diffs).unwrap().slope;
    assert!(order >= 1.0, "distances {d:?}, order {order}");
}

#[test]
fn residual_vanishes_at_zero() {
    for n in 1..=4 {
        let o = ops(n, 32);
        let z = vec![0.0; o.grid.interior_len()];
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(residual_g(&z, n, sign, &o).unwrap().entries().iter().all(|&g| g == 0.0));
        }
    }
}

#[test]
fn residual_rejects_large_perturbations() {
    let o = ops(2, 64);
    let z = o.grid.sample(|x| 0.5 * (PI * x).sin());
    assert!(residual_g(&z, 2, Sign::Plus, &o).is_err());
}

#[test]
fn lipschitz_ratio_stays_bounded() {
    let o = ops(2, 512);
    let e1 = perturbation_direction(2, 1, &o).unwrap();
    let e2 = perturbation_direction(2, 2, &o).unwrap();
    let ratios: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&eps| {
            let z1: Vec<f64> = e1.iter().map(|x| eps * x).collect();
            let z2: Vec<f64> = e2.iter().map(|x| eps * x).collect();
            lipschitz_probe(&z1, &z2, 2, Sign::Plus, &o).unwrap()
        })
        .collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r <= 2.0 * ratios[0]), "{ratios:?}");
    let z: Vec<f64> = e1.iter().map(|x| 1e-3 * x).collect();
    assert_eq!(lipschitz_probe(&z, &z, 2, Sign::Plus, &o).unwrap(), 0.0);
}

#[test]
fn cholesky_and_elimination_agree_on_hminus1() {
    let o = ops(3, 100);
    let u = o.grid.sample(|x| (7.0 * x).sin() * x * (1.0 - x) + 0.3 * (x - 0.4).abs());
    let mu = o.mass.mul_vec(&u);
    let via_thomas = inclusion_lab::discretize::dot(&mu, &o.stiffness.solve(&mu).unwrap()).sqrt();
    let via_cholesky = o.stiffness.cholesky().unwrap().inverse_quadratic_form(&mu).sqrt();
    let k = o.grid.interior_len();
    let dense = DMatrix::from_row_slice(k, k, &o.stiffness.to_dense().concat());
    let b = DVector::from_vec(mu.clone());
    let via_dense = b.dot(&dense.lu().solve(&b).unwrap()).sqrt();
    let ours = norm(&u, &o, NormKind::Hminus1).unwrap();
    for other in [via_thomas, via_cholesky, via_dense] {
        assert!((ours - other).abs() <= 1e-12 * ours, "{ours} vs {other}");
    }
}

#[test]
fn assembly_is_deterministic() {
    let a = ops(4, 77);
    let b = ops(4, 77);
    assert_eq!(a, b);
    let bits = |m: &OperatorMatrices| m.stiffness.diag.iter().chain(&m.mass.off).map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
}

fn smooth_perturbation() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 4)
}

fn build(coeffs: &[f64], amp: f64, o: &OperatorMatrices) -> Vec<f64> {
    o.grid.sample(|x| {
        coeffs.iter().enumerate().map(|(k, c)| amp * c * ((k + 1) as f64 * PI * x).sin()).sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_chain(coeffs in prop::collection::vec(-1.0f64..1.0, 8), n in 1usize..4) {
        let o = ops(n, 768 / n);
        prop_assume!(coeffs.iter().any(|c| c.abs() > 1e-3));
        let u = o.grid.sample(|x| {
            coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * PI * x).sin() + c * c * x * (1.0 - x)).sum()
        });
        let hm1 = norm(&u, &o, NormKind::Hminus1).unwrap();
        let l2 = norm(&u, &o, NormKind::L2).unwrap();
        let h1 = norm(&u, &o, NormKind::H01).unwrap();
        prop_assert!(hm1 <= 1.1 * l2 / PI);
        prop_assert!(l2 <= 1.1 * h1 / PI);
        prop_assert!(hm1 <= 1.1 * h1 / (PI * PI));
    }

    #[test]
    fn energy_never_increases(
        coeffs in smooth_perturbation(),
        amp in 0.0f64..0.05,
        n in 0usize..4,
        plus in any::<bool>(),
        large_dt in any::<bool>(),
    ) {
        let o = ops(n.max(1), 96 / n.max(1));
        let h = o.grid.h();
        // dt ≤ h²/2, plus a run far past it: the splitting is unconditionally stable
        let dt = if large_dt { 1e-2 } else { 0.5 * h * h };
        let eq = Equilibrium::new(n, if plus { Sign::Plus } else { Sign::Minus });
        let u0 = perturbed(&eq.sample(&o.grid), &build(&coeffs, amp, &o), 1.0);
        let stepper = Stepper::new(&o, SolverConfig::new(dt, 400.0 * dt).unwrap()).unwrap();
        let mut u = u0;
        let mut e = energy(&u, &o).unwrap();
        for _ in 0..400 {
            u = stepper.step(&u).unwrap();
            let next = energy(&u, &o).unwrap();
            prop_assert!(next <= e + 1e-10, "{} -> {}", e, next);
            e = next;
        }
    }

    #[test]
    fn negated_start_gives_negated_run(coeffs in smooth_perturbation(), amp in 0.0f64..0.2, n in 0usize..4) {
        let o = ops(n.max(1), 48 / n.max(1));
        let eq = Equilibrium::new(n, Sign::Plus);
        let u0 = perturbed(&eq.sample(&o.grid), &build(&coeffs, amp, &o), 1.0);
        let neg: Vec<f64> = u0.iter().map(|v| -v).collect();
        let cfg = SolverConfig::new(1e-3, 0.2).unwrap();
        let a = simulate(&u0, &cfg, &o, eq).unwrap();
        let b = simulate(&neg, &cfg, &o, Equilibrium::new(n, Sign::Minus)).unwrap();
        for (sa, sb) in a.states.iter().zip(&b.states) {
            prop_assert!(sa.iter().zip(sb).all(|(x, y)| x.to_bits() == (-y).to_bits()));
        }
        prop_assert_eq!(&a.energies, &b.energies);
        prop_assert_eq!(&a.dist_l2, &b.dist_l2);
    }

    #[test]
    fn simulation_is_deterministic(coeffs in smooth_perturbation(), amp in 0.0f64..0.1) {
        let o = ops(2, 40);
        let eq = Equilibrium::plus(2);
        let u0 = perturbed(&eq.sample(&o.grid), &build(&coeffs, amp, &o), 1.0);
        let cfg = SolverConfig::new(1e-3, 0.3).unwrap().with_stride(7).unwrap();
        prop_assert_eq!(simulate(&u0, &cfg, &o, eq).unwrap(), simulate(&u0, &cfg, &o, eq).unwrap());
    }

    #[test]
    fn residual_pairing_matches_quadrature(
        coeffs in smooth_perturbation(),
        phi_coeffs in prop::collection::vec(-1.0f64..1.0, 6),
        log_eps in -5.0f64..-2.5,
        n in 2usize..5,
        plus in any::<bool>(),
        per in 16usize..80,
    ) {
        let o = ops(n, per);
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let z = build(&coeffs, 10f64.powf(log_eps), &o);
        let phi = o.grid.sample(|x| {
            phi_coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * PI * x).sin()).sum()
        });
        let g = residual_g(&z, n, sign, &o);
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        let paired: f64 = g.entries().iter().zip(&phi).map(|(a, b)| a * b).sum();
        let direct = residual_pairing_by_quadrature(&z, &phi, n, sign, &o);
        prop_assert!((paired - direct).abs() <= 1e-10, "{} vs {}", paired, direct);
    }
}
