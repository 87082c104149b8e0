//! Phases, resonance roots and their localization.

use nalgebra::Vector3;
use proptest::prelude::*;
use zkl_core::model::PlasmaParams;
use zkl_core::resonance::*;

/// Plain bisection on a bracket, used as an independent root oracle.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    assert!(f(a) * f(b) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

proptest! {
    #[test]
    fn two_harmonic_psi_bounded_away(kappa in 0.01f64..=1.0, k in 0.0f64..=1.0) {
        let v = (1.0 + kappa * kappa * k * k).sqrt() - 2.0;
        prop_assert!(v.abs() >= 2.0 - 2f64.sqrt() - 1e-12);
        let p = PlasmaParams::limit(kappa, 0.1).unwrap();
        for j in Branch::KLEIN_GORDON {
            for s in [-1, 1] {
                prop_assert!(psi(j, s, s, &p, k).abs() >= 2.0 - 2f64.sqrt() - 1e-12);
            }
        }
    }

    #[test]
    fn clipped_phase_is_bounded_below(phi in -1.0f64..1.0, eps in 0.001f64..0.5) {
        prop_assert!(clip_phase(phi, eps).abs() >= 0.5 * eps * eps);
    }
}

#[test]
fn zero_zero_root_matches_bisection() {
    let th = 0.05;
    let oracle = bisect(
        |r: f64| (1.0 + r * r).sqrt() - (1.0 + th * th * r * r).sqrt() - 1.0,
        1.0,
        2.0,
    );
    let rep = resonance_report(&PlasmaParams::new(0.05, th, 0.1).unwrap(), Family::ZeroZero);
    assert!(!rep.roots.is_empty());
    for r in &rep.roots {
        assert!((r.radius - oracle).abs() < 1e-9, "{} vs {oracle}", r.radius);
        assert!((1.0..=2.0).contains(&r.radius));
    }
    assert!((oracle - 3f64.sqrt()).abs() < 5e-3);
}

#[test]
fn zero_zero_root_tends_to_sqrt3() {
    let p = PlasmaParams::limit(1e-4, 0.1).unwrap();
    let rep = resonance_report(&p, Family::ZeroZero);
    assert!(rep
        .roots
        .iter()
        .all(|r| (r.radius - 3f64.sqrt()).abs() < 1e-6));
}

#[test]
fn zero_s_phase_vanishes_at_origin() {
    let p = PlasmaParams::limit(0.1, 0.1).unwrap();
    let o = Vector3::zeros();
    assert!(phase(Branch::LambdaPlus, Branch::Zero, -1, &p, &o).abs() < 1e-15);
    assert!(phase(Branch::MuPlus, Branch::Zero, -1, &p, &o).abs() < 1e-15);
}

#[test]
fn zero_s_roots_scale_with_eps() {
    let base = PlasmaParams::new(0.05, 0.35, 0.1).unwrap();
    let roots = |eps: f64| -> Vec<f64> {
        resonance_report(&base.with_eps(eps).unwrap(), Family::ZeroS)
            .roots
            .iter()
            .map(|r| r.radius)
            .collect()
    };
    let (a, b) = (roots(0.05), roots(0.025));
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    for (x, y) in a.iter().zip(&b) {
        assert!((x / y - 2.0).abs() < 0.05, "{x} vs {y}");
    }
    // mu - mu_s = 1 at the root
    for r in resonance_report(&base, Family::ZeroS).roots {
        assert!(r.residual < 1e-10);
    }
}

#[test]
fn zero_zero_s_has_no_roots() {
    for th in [0.05, 0.1, 0.35] {
        let rep = resonance_report(
            &PlasmaParams::new(0.05, th, 0.1).unwrap(),
            Family::ZeroZeroS,
        );
        assert!(rep.roots.is_empty());
        assert!(rep.margin >= 2.0 - 2f64.sqrt() - 1e-9);
    }
}

#[test]
fn clip_examples() {
    assert_eq!(clip_phase(1.0, 0.1), 1.0);
    assert!((clip_phase(0.0, 0.1) - 0.005).abs() < 1e-15);
    assert!((clip_phase(-1e-6, 0.1) - 0.005).abs() < 1e-15);
}

#[test]
fn localization_fails_with_violations() {
    // at theta_e = 0.05 the (0-s) roots leave |xi| <= 1/2
    let p = PlasmaParams::new(0.05, 0.05, 0.1).unwrap();
    match locate_resonances(&p, Family::ZeroS) {
        Err(ResonanceError::Localization { violations, .. }) => {
            assert!(violations.iter().all(|r| r.radius > C_L));
        }
        Ok(_) => panic!("expected a localization failure"),
    }
    assert!(locate_resonances(&p.with_theta(0.35).unwrap(), Family::ZeroS).is_ok());
}

#[test]
fn cutoffs_have_their_plateaus() {
    let c = Cutoffs::default();
    for k in [0.0, 0.3, 0.6] {
        assert_eq!(c.chi_eps(0.1, k), 1.0);
    }
    for k in [0.8, 1.5] {
        assert!((c.chi_eps(0.1, k) - 0.1).abs() < 1e-15);
    }
    assert_eq!(c.chi_l(C_L), 0.0);
    assert_eq!(c.chi_l(0.6), 1.0);
    assert_eq!(c.chi_n(C_1), 1.0);
    assert_eq!(c.chi_n(C_M), 0.0);
}
