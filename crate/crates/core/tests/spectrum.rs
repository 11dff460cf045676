//! Cross-route spectral checks: shooting, closed forms, the finite-element
//! pencil and a dense generalized eigensolver, against values frozen from an
//! independent 30-digit computation.

use inclusion_lab::discretize::{assemble, norm, Grid, NormKind};
use inclusion_lab::equilibria::Side;
use inclusion_lab::spectral::eigen::checked_shot;
use inclusion_lab::spectral::fem::lowest_eigenvalues;
use inclusion_lab::spectral::{
    characteristic, closed_form_spectrum, fem_spectrum, find_eigenvalues, projections, InnerProduct,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

// mpmath, 30 digits, on the transfer-matrix determinant
const N2: [f64; 8] = [
    -14.669023297986605,
    39.478417604357434,
    73.095053873490851,
    157.91367041742974,
    230.83004572075399,
    355.30575843921691,
    467.65561850142774,
    631.65468166971895,
];
const N3: [f64; 8] = [
    -43.264042084988307,
    -19.840248831158658,
    88.826439609804228,
    127.70575210956002,
    207.10622818188252,
    355.30575843921691,
    450.7009896459972,
    593.32004927177326,
];

#[test]
fn shooting_matches_frozen_values() {
    for (n, table) in [(2, N2), (3, N3)] {
        let s = find_eigenvalues(n, 8, None).unwrap();
        for (got, want) in s.eigenvalues.iter().zip(table) {
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn closed_forms_match_shooting_on_first_eight() {
    for n in [2, 3] {
        let s = find_eigenvalues(n, 8, None).unwrap();
        let top = s.eigenvalues[7] + 1.0;
        let cf = closed_form_spectrum(n, top).unwrap();
        assert_eq!(cf.len(), 8, "n={n}: {cf:?}");
        for (a, b) in s.eigenvalues.iter().zip(&cf) {
            assert!((a - b).abs() <= 1e-8, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn fem_converges_to_shooting() {
    for n in [2, 3] {
        let exact = find_eigenvalues(n, 8, None).unwrap().eigenvalues;
        let errs: Vec<f64> = [512usize, 1024, 2048]
            .iter()
            .map(|&cells| {
                let ops = assemble(&Grid::new(n, cells / n).unwrap());
                let fem = lowest_eigenvalues(&ops.linearized(), &ops.mass, 8);
                fem.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .collect();
        // n=3 does not divide 512 etc; the grid is only approximately h-halving
        let order = (errs[0] / errs[2]).log2() / 2.0;
        assert!(order >= 1.0, "n={n}: errors {errs:?}, order {order}");
    }
}

#[test]
fn fem_pencil_agrees_with_dense_solver() {
    let ops = assemble(&Grid::new(2, 24).unwrap());
    let a = DMatrix::from_row_slice(47, 47, &ops.linearized().to_dense().concat());
    let m = DMatrix::from_row_slice(47, 47, &ops.mass.to_dense().concat());
    let l = m.cholesky().unwrap().l();
    let li = l.clone().try_inverse().unwrap();
    let c = &li * a * li.transpose();
    let mut dense: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let fem = fem_spectrum(&ops, 10).unwrap();
    for (x, y) in fem.eigenvalues.iter().zip(&dense) {
        assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0), "{x} vs {y}");
    }
    assert_eq!(fem.negative_count, 1);
}

#[test]
fn negative_counts_stable_across_meshes() {
    for n in 2..=6 {
        let shot = find_eigenvalues(n, 1, None).unwrap().negative_count;
        for cells in [512usize, 1024, 2048] {
            let per = cells / n;
            let ops = assemble(&Grid::new(n, per).unwrap());
            let neg = ops.linearized().inertia_below(&ops.mass, 0.0);
            assert_eq!(neg, shot, "n={n}, per={per}");
        }
        if n <= 3 {
            assert_eq!(shot, n - 1);
        }
    }
}

#[test]
fn interface_residuals_of_eigenfunctions() {
    for n in 2..=6 {
        let s = find_eigenvalues(n, 8, None).unwrap();
        for &lam in &s.eigenvalues {
            let shot = checked_shot(n, lam).unwrap();
            let scale = shot.scale();
            for k in 1..n {
                let x = k as f64 / n as f64;
                let jump = shot.derivative_at(x, Side::Left) - shot.derivative_at(x, Side::Right)
                    - 4.0 * n as f64 * shot.value_at(x);
                assert!(jump.abs() / scale <= 1e-8, "n={n} λ={lam} k={k}: {jump}");
            }
            assert!(shot.interface_residuals().iter().all(|r| r / scale <= 1e-8));
        }
    }
}

#[test]
fn trivial_family_is_a_root() {
    for n in 2..=5 {
        let lam = (n as f64 * std::f64::consts::PI).powi(2);
        assert!(characteristic(n, lam).unwrap().abs() <= 1e-10, "n={n}");
    }
}

#[test]
fn hat_profile_witnesses_negativity() {
    for n in [2, 3, 4] {
        let ops = assemble(&Grid::new(n, 256).unwrap());
        let nf = n as f64;
        let u = ops.grid.sample(|x| {
            if x <= 1.0 / nf {
                nf * x
            } else if x <= 2.0 / nf {
                2.0 - nf * x
            } else {
                0.0
            }
        });
        let q = ops.linearized().bilinear(&u, &u);
        assert!(q <= -2.0 * nf + 1e-9, "n={n}: {q}");
    }
}

#[test]
fn projector_resolves_identity_on_its_span() {
    let ops = assemble(&Grid::new(2, 64).unwrap());
    let dec = fem_spectrum(&ops, 16).unwrap();
    for inner in [InnerProduct::L2, InnerProduct::Hminus1] {
        let p = projections(&dec, &ops, inner).unwrap();
        for (i, e) in dec.eigenfunctions.iter().enumerate() {
            let (a, b) = p.split_in_span(e).unwrap();
            let err: Vec<f64> = (0..e.len()).map(|k| a[k] + b[k] - e[k]).collect();
            assert!(norm(&err, &ops, NormKind::L2).unwrap() <= 1e-10, "{inner:?} mode {i}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projector_identity_on_random_combinations(coeffs in prop::collection::vec(-1.0f64..1.0, 16)) {
        let ops = assemble(&Grid::new(2, 64).unwrap());
        let dec = fem_spectrum(&ops, 16).unwrap();
        let mut u = vec![0.0; ops.grid.interior_len()];
        for (c, e) in coeffs.iter().zip(&dec.eigenfunctions) {
            u.iter_mut().zip(e).for_each(|(o, v)| *o += c * v);
        }
        for inner in [InnerProduct::L2, InnerProduct::Hminus1] {
            let p = projections(&dec, &ops, inner).unwrap();
            let p1 = p.unstable_part(&u).unwrap();
            let p2 = p.stable_part(&u).unwrap();
            let err: Vec<f64> = (0..u.len()).map(|i| p1[i] + p2[i] - u[i]).collect();
            prop_assert!(norm(&err, &ops, NormKind::L2).unwrap() <= 1e-10);
            // E₁ is idempotent
            let pp = p.unstable_part(&p1).unwrap();
            let d: Vec<f64> = pp.iter().zip(&p1).map(|(a, b)| a - b).collect();
            prop_assert!(norm(&d, &ops, NormKind::L2).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn rayleigh_bound_on_stable_range(coeffs in prop::collection::vec(-1.0f64..1.0, 15)) {
        let ops = assemble(&Grid::new(2, 64).unwrap());
        let dec = fem_spectrum(&ops, 16).unwrap();
        prop_assume!(coeffs.iter().any(|c| c.abs() > 1e-3));
        let mut v = vec![0.0; ops.grid.interior_len()];
        for (c, e) in coeffs.iter().zip(&dec.eigenfunctions[1..]) {
            v.iter_mut().zip(e).for_each(|(o, x)| *o += c * x);
        }
        let q = ops.linearized().bilinear(&v, &v) / ops.mass.bilinear(&v, &v);
        prop_assert!(q >= dec.eigenvalues[1] - 1e-6, "{} < {}", q, dec.eigenvalues[1]);
    }
}
