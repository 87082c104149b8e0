//! State layout, symbol, sources and the density change of variables.

use nalgebra::Vector3;
use proptest::prelude::*;
use zkl_core::model::*;
use zkl_core::C64;

fn state() -> impl Strategy<Value = StateVector> {
    prop::array::uniform14(-5.0f64..5.0).prop_map(StateVector)
}

fn xi() -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(Vector3::from)
}

proptest! {
    #[test]
    fn symbol_is_hermitian(eps in 0.001f64..0.1, theta in 0.01f64..1.0, u in state(), x in xi()) {
        let p = PlasmaParams::new(eps, theta, 0.1).unwrap();
        prop_assert!(assemble_symbol(&p, &u, &x).hermitian_defect() < 1e-12);
    }

    #[test]
    fn symbol_is_affine_in_the_state(u in state(), v in state(), x in xi(), a in -2.0f64..2.0) {
        let p = PlasmaParams::default();
        let rest = symbol_rest(&p, &x);
        let m = |s: &StateVector| assemble_symbol(&p, s, &x).entries - rest;
        let lhs = m(&u.add(&v.scaled(a)));
        let rhs = m(&u) + m(&v) * C64::new(a, 0.0);
        prop_assert!(zkl_core::linalg::max_abs(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn bilinear_matches_its_matrices(u in state(), v in state()) {
        let th = 0.3;
        let direct = bilinear_b(th, &u, &v).to_complex();
        prop_assert!((bilinear_b_left(th, &u.to_complex()) * v.to_complex() - direct).norm() < 1e-12);
        prop_assert!((bilinear_b_right(th, &v.to_complex()) * u.to_complex() - direct).norm() < 1e-12);
    }

    #[test]
    fn sharp_transform_round_trips(n in -5.0f64..5.0, eps in 0.01f64..0.5) {
        prop_assert!((log_from_sharp(sharp_from_log(n)).unwrap() - n).abs() < 1e-12);
        let back = log_from_sharp_scaled(eps, sharp_from_log_scaled(eps, n)).unwrap();
        prop_assert!((back - n).abs() < 1e-10);
    }

    #[test]
    fn f_eps_is_continuous_across_the_series_switch(eps in 0.001f64..0.5, x in -3.0f64..3.0) {
        let direct = ((eps * x).exp() - 1.0 - eps * x) / (eps * eps);
        prop_assert!((f_eps(eps, x) - direct).abs() <= 1e-7 * (1.0 + direct.abs()));
    }
}

#[test]
fn rest_symbol_at_origin_is_the_coupling_block() {
    let p = PlasmaParams::new(0.07, 0.2, 0.1).unwrap();
    let m = symbol_rest(&p, &Vector3::zeros());
    for r in 0..DIM {
        for c in 0..DIM {
            let want = match (r, c) {
                _ if r >= IE && r < IE + 3 && c == r - IE + IVE => C64::new(0.0, 1.0),
                _ if r >= IVE && r < IVE + 3 && c == r - IVE + IE => C64::new(0.0, -1.0),
                _ if r >= IE && r < IE + 3 && c == r - IE + IVI => C64::new(0.0, -0.07 / 0.2),
                _ if r >= IVI && r < IVI + 3 && c == r - IVI + IE => C64::new(0.0, 0.07 / 0.2),
                _ => C64::new(0.0, 0.0),
            };
            assert!((m[(r, c)] - want).norm() < 1e-15, "({r}, {c})");
        }
    }
}

#[test]
fn convection_vanishes_without_velocities() {
    let p = PlasmaParams::default();
    let u = StateVector::from_parts([1.0, 2.0, 3.0], [0.5; 3], [0.0; 3], 0.7, [0.0; 3], -0.4);
    let m = convection_block(&p, &u.to_complex(), &Vector3::new(0.3, -2.0, 1.0));
    assert!(m.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn bilinear_examples() {
    let th = 0.1;
    let v = StateVector::from_parts([0.0; 3], [0.0; 3], [1.0, 0.0, 0.0], 0.0, [0.0; 3], 0.0);
    assert_eq!(
        bilinear_b(th, &StateVector::zeros(), &v),
        StateVector::zeros()
    );

    let u = StateVector::from_parts([0.0; 3], [0.0; 3], [0.0; 3], 1.0, [0.0; 3], 0.0);
    let out = bilinear_b(th, &u, &v);
    let want = StateVector::from_parts([0.0; 3], [1.0, 0.0, 0.0], [0.0; 3], 0.0, [0.0; 3], 0.0);
    assert_eq!(out, want);

    let u = StateVector::from_parts([0.0, 0.0, 1.0], [0.0; 3], [0.0; 3], 0.0, [0.0; 3], 0.0);
    let out = bilinear_b(th, &u, &v);
    let want = StateVector::from_parts([0.0; 3], [0.0; 3], [0.0, th, 0.0], 0.0, [0.0; 3], 0.0);
    assert!((out.add(&want.scaled(-1.0))).norm() < 1e-15);
}

#[test]
fn source_examples() {
    let p = PlasmaParams::default();
    assert_eq!(source_g(&p, &StateVector::zeros()), StateVector::zeros());
    let want = 100.0 * (0.1f64.exp() - 1.1);
    assert!((f_eps(0.1, 1.0) - want).abs() < 1e-12);
    // quadratic at small eps x
    assert!((f_eps(1e-6, 2.0) - 2.0).abs() < 1e-5);
}

#[test]
fn sharp_examples() {
    assert_eq!(log_from_sharp(0.0).unwrap(), 0.0);
    assert!((log_from_sharp(std::f64::consts::E - 1.0).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(log_from_sharp(-1.0).unwrap_err(), ModelError::Domain(-1.0));
}

#[test]
fn zero_eps_rejected() {
    assert!(PlasmaParams::new(0.0, 0.1, 0.1).is_err());
    assert!(PlasmaParams::new(0.05, -0.1, 0.1).is_err());
}
