//! WKB profiles: structure, reality and residual orders.

use proptest::prelude::*;
use zkl_core::harness::reference_state;
use zkl_core::model::{PlasmaParams, IE, IVE};
use zkl_core::semiclassical::PeriodicGrid;
use zkl_core::wkb::*;
use zkl_core::zakharov::{init_from_datum, Datum, ZakharovConfig};
use zkl_core::C64;

fn params() -> PlasmaParams {
    PlasmaParams::new(0.05, 0.35, 0.1).unwrap()
}

fn reference(order: u8) -> (PeriodicGrid, ZakharovConfig, WKBProfile) {
    let p = params();
    let g = PeriodicGrid::new(1, 64, 1.0).unwrap();
    let (zc, st) = reference_state(&g, &p, Datum::Modulated, 1e-3, 50).unwrap();
    let prof = build_profile(&zc, &st, &p, order).unwrap();
    (g, zc, prof)
}

#[test]
fn zero_datum_gives_zero_profile() {
    let p = params();
    let g = PeriodicGrid::new(1, 32, 1.0).unwrap();
    let zc = ZakharovConfig::new(g.clone(), 1e-3, &p).unwrap();
    let zero = vec![C64::new(0.0, 0.0); g.len()];
    let st = init_from_datum(&g, &[zero.clone(), zero.clone(), zero]).unwrap();
    let prof = build_profile(&zc, &st, &p, 2).unwrap();
    for term in &prof.terms {
        for c in term.field.iter().chain(&term.dt) {
            assert!(
                c.iter().all(|z| z.norm() == 0.0),
                "term ({}, {})",
                term.m,
                term.p
            );
        }
    }
}

#[test]
fn leading_term_is_the_envelope() {
    let (_, _, prof) = reference(0);
    let st = &prof.zakharov;
    for phase in [0.0, 0.7, 2.0] {
        let u = prof.evaluate_phase(prof.t, phase);
        let w = C64::from_polar(1.0, phase);
        for d in 0..3 {
            for j in 0..st.len() {
                let e = 2.0 * (st.e[d][j] * w).re;
                let v = 2.0 * (C64::new(0.0, 1.0) * st.e[d][j] * w).re;
                assert!((u[IE + d][j] - e).abs() < 1e-12);
                assert!((u[IVE + d][j] - v).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn leading_term_changes_sign_over_half_a_period() {
    let (_, _, prof) = reference(0);
    let a = prof.evaluate_phase(prof.t, 0.3);
    let b = prof.evaluate_phase(prof.t, 0.3 + std::f64::consts::PI);
    for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
        assert!((x + y).abs() < 1e-12);
    }
}

#[test]
fn fast_time_follows_omega_over_eps_squared() {
    let (_, _, prof) = reference(0);
    let t = prof.t + 1e-4;
    let a = prof.evaluate(t);
    let b = prof.evaluate_phase(t, prof.omega * t / (prof.eps * prof.eps));
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn complex_sum_is_real(phase in 0.0f64..6.3, h in -1e-2f64..1e-2) {
        let (_, _, prof) = reference(2);
        let z = prof.evaluate_complex(prof.t + h, phase);
        let scale = z.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let im = z.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max);
        prop_assert!(im < 1e-12 * (1.0 + scale));
    }
}

#[test]
fn envelope_solves_the_solvability_condition() {
    let (_, zc, prof) = reference(2);
    let d = schrodinger_defect(&zc, &prof.zakharov).unwrap();
    assert!(d < 1e-8, "defect {d:e}");
}

#[test]
fn residual_orders_increase_with_profile_order() {
    let p = params();
    let g = PeriodicGrid::new(1, 64, 1.0).unwrap();
    let (zc, st) = reference_state(&g, &p, Datum::Modulated, 1e-3, 50).unwrap();
    let orders: Vec<f64> = (0..=2u8)
        .map(|o| {
            residual_study(&zc, &st, &p, &[0.2, 0.1, 0.05], 1.0, o)
                .unwrap()
                .fitted_order
        })
        .collect();
    println!("fitted orders {orders:?}");
    assert!((orders[0] + 1.0).abs() < 0.3, "{orders:?}");
    assert!(orders[1].abs() < 0.3, "{orders:?}");
    assert!(orders[2] > 0.7, "{orders:?}");
}

#[test]
fn order_above_two_is_rejected() {
    let p = params();
    let g = PeriodicGrid::new(1, 16, 1.0).unwrap();
    let (zc, st) = reference_state(&g, &p, Datum::Modulated, 1e-3, 1).unwrap();
    assert_eq!(build_profile(&zc, &st, &p, 3), Err(WkbError::Order(3)));
}

#[test]
fn mismatched_parameters_are_rejected() {
    let p = params();
    let g = PeriodicGrid::new(1, 16, 1.0).unwrap();
    let (zc, st) = reference_state(&g, &p, Datum::Modulated, 1e-3, 1).unwrap();
    let other = PlasmaParams::new(0.05, 0.5, 0.1).unwrap();
    assert!(matches!(
        build_profile(&zc, &st, &other, 1),
        Err(WkbError::Params(_))
    ));
}
