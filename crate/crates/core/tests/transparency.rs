//! Interaction coefficients, transparency fits and the symmetrizer.

use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zkl_core::model::*;
use zkl_core::spectral::{rest_eigenvalues, rest_eigenvectors};
use zkl_core::transparency::*;
use zkl_core::C64;

fn unit_ball_xi() -> impl Strategy<Value = Vector3<f64>> {
    (prop::array::uniform3(-1.0f64..1.0), 0.01f64..=1.0)
        .prop_filter("nonzero", |(v, _)| Vector3::from(*v).norm() > 1e-3)
        .prop_map(|(v, r)| Vector3::from(v).normalize() * r)
}

fn real_amplitude(v: [f64; 14]) -> HarmonicAmplitude {
    let mut h = HarmonicAmplitude::zero(1);
    for (i, x) in v.iter().enumerate() {
        h.value[i] = C64::new(*x, 0.0);
    }
    for d in 0..3 {
        h.ve0[d] = h.value[IVE + d];
    }
    h
}

proptest! {
    #[test]
    fn acoustic_weight_within_two(eps in 0.001f64..=0.05, k in 0.001f64..=1.0, th in prop::sample::select(vec![0.1, 0.2, 0.35])) {
        let w = acoustic_weight(&PlasmaParams::new(eps, th, 0.1).unwrap(), k);
        prop_assert!((0.5..=2.0).contains(&w), "weight {w}");
    }

    #[test]
    fn auto_interaction_is_imaginary(ve in prop::array::uniform3(-1.0f64..1.0), x in unit_ball_xi()) {
        let p = PlasmaParams::new(0.05, 0.35, 0.1).unwrap();
        let mut v = [0.0; 14];
        v[IVE..IVE + 3].copy_from_slice(&ve);
        let b = coeff_b(&p, &real_amplitude(v));
        for m in rest_eigenvectors(&p, &x).unwrap().modes {
            prop_assert!(m.unit.dotc(&(b * m.unit)).re.abs() < 1e-10, "{}", m.label);
        }
    }

    #[test]
    fn symmetrizer_is_compatible_and_bounded(x in unit_ball_xi(), eps in 0.01f64..=0.05) {
        let p = PlasmaParams::new(eps, 0.35, 0.1).unwrap();
        let s = build_symmetrizer(&p, &x).unwrap();
        prop_assert!(symmetrizer_defect(&p, &s, &x) < 1e-9);
        prop_assert!(s.gamma <= 2.1);
    }
}

#[test]
fn rayleigh_quotients_on_random_vectors() {
    let p = PlasmaParams::new(0.05, 0.35, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let x = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let x = x.normalize() * rng.gen_range(0.01..1.0);
        let s = build_symmetrizer(&p, &x).unwrap().matrix();
        let v =
            CVec14::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let q = v.dotc(&(s * v)).re / v.norm_squared();
        assert!((1.0 / 2.1..=2.1).contains(&q), "quotient {q}");
    }
}

#[test]
fn zero_amplitude_gives_zero_operator() {
    let p = PlasmaParams::default();
    assert!(coeff_b(&p, &HarmonicAmplitude::zero(1))
        .iter()
        .all(|z| z.norm() == 0.0));
}

#[test]
fn longitudinal_coefficient_leading_order() {
    let p = PlasmaParams::new(1e-4, 0.1, 0.1).unwrap();
    let xi = Vector3::new(0.2, -0.1, 0.3);
    let v = [0.3, 0.7, -0.2];
    let mut s = [0.0; 14];
    s[IVE..IVE + 3].copy_from_slice(&v);
    let b = coeff_b(&p, &real_amplitude(s));
    let fam = rest_eigenvectors(&p, &xi).unwrap();
    let got = fam.get("f+").raw.dotc(&(b * fam.get("fs(e-)").raw));
    let ev = rest_eigenvalues(&p, xi.norm());
    let tk2 = (p.theta_e * xi.norm()).powi(2);
    let want = (ev.mu * ev.mu - tk2) / (ev.mu * ev.mu) * Vector3::from(v).dot(&xi.normalize());
    assert!(
        (got * (1.0 + tk2).sqrt() - want).norm() < 1e-3,
        "{got} vs {want}"
    );
}

#[test]
fn flat_profile_has_no_nontransparency_margin() {
    let p = PlasmaParams::default();
    let snap = AmplitudeSnapshot {
        eps: p.eps,
        t: 0.0,
        harmonics: vec![HarmonicAmplitude::zero(1)],
    };
    assert_eq!(
        check_nontransparency(&p, &snap, &[Vector3::new(0.0, 0.0, 0.01)]).unwrap_err(),
        TransparencyError::DegenerateProfile
    );
}

#[test]
fn aligned_velocity_gives_positive_margin() {
    let p = PlasmaParams::new(0.02, 0.35, 0.1).unwrap();
    let xi = Vector3::new(0.0, 0.0, 0.01);
    let mut s = [0.0; 14];
    s[IVE + 2] = 1.0;
    let snap = AmplitudeSnapshot {
        eps: p.eps,
        t: 0.0,
        harmonics: vec![real_amplitude(s)],
    };
    let aligned = check_nontransparency(&p, &snap, &[xi]).unwrap();
    assert!(aligned > 0.1 * p.theta_e, "margin {aligned}");
}

#[test]
fn transparency_fit_at_origin_is_zero() {
    let p = PlasmaParams::new(0.05, 0.35, 0.1).unwrap();
    let mut s = [0.0; 14];
    s[IVE] = 1.0;
    let snap = AmplitudeSnapshot {
        eps: p.eps,
        t: 0.0,
        harmonics: vec![real_amplitude(s)],
    };
    let fit = check_transparency(&p, &[snap], &[Vector3::zeros()]).unwrap();
    assert!(fit.c < 1e-12, "C {}", fit.c);
}
