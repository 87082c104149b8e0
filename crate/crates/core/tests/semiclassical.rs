//! Periodic grids, semiclassical norms and quantization.

use proptest::prelude::*;
use zkl_core::semiclassical::*;
use zkl_core::C64;

fn smooth(grid: &PeriodicGrid, coeffs: &[(f64, f64)]) -> Vec<C64> {
    (0..grid.len())
        .map(|j| {
            let x = grid.point(j)[2];
            coeffs
                .iter()
                .enumerate()
                .map(|(m, (a, b))| C64::new(*a, *b) * C64::from_polar(1.0, m as f64 * x))
                .sum()
        })
        .collect()
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_form_matches_oracle(a in coeffs(), u in coeffs(), eps in 0.01f64..1.0) {
        let g = PeriodicGrid::new(1, 64, 1.0).unwrap();
        let (av, uv) = (smooth(&g, &a), smooth(&g, &u));
        let b = |x: [f64; 3]| C64::new(1.0 + x[2] * x[2], 0.3 * x[2]);
        let fast = quantize_product(&g, eps, &av, b, &uv).unwrap();
        let slow = quantize_oracle(&g, eps, |j, x| av[j] * b(x), &uv).unwrap();
        let err = fast.iter().zip(&slow).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn norm_is_monotone_in_s(u in coeffs(), eps in 0.01f64..1.0) {
        let g = PeriodicGrid::new(1, 32, 1.0).unwrap();
        let f = SemiclassicalField::scalar(smooth(&g, &u), eps);
        prop_assert!(hs_eps_norm(&g, &f, 1.0) >= hs_eps_norm(&g, &f, 0.0) - 1e-12);
    }
}

#[test]
fn single_mode_norm() {
    let g = PeriodicGrid::new(1, 32, 1.0).unwrap();
    let k = 3.0;
    let v: Vec<C64> = (0..g.len())
        .map(|j| C64::from_polar(1.0, k * g.point(j)[2]))
        .collect();
    let eps = 0.2;
    let f = SemiclassicalField::scalar(v.clone(), eps);
    let l2 = g.l2_norm(&v);
    assert!((hs_eps_norm(&g, &f, 1.0) - (1.0f64 + (eps * k).powi(2)).sqrt() * l2).abs() < 1e-12);
    assert!((hs_eps_norm(&g, &f, 0.0) - l2).abs() < 1e-12);
}

#[test]
fn identity_and_derivative_symbols() {
    let g = PeriodicGrid::new(1, 64, 1.0).unwrap();
    let u = smooth(&g, &[(0.3, 0.1), (1.0, -0.5), (0.0, 0.2), (-0.7, 0.0)]);
    let id = quantize_multiplier(&g, 0.1, |_| C64::new(1.0, 0.0), &u).unwrap();
    assert!(id.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-14));
    let eps = 0.1;
    let d = quantize_multiplier(&g, eps, |x| C64::new(0.0, x[2]), &u).unwrap();
    let exact: Vec<C64> = (0..g.len())
        .map(|j| {
            let x = g.point(j)[2];
            C64::new(1.0, -0.5) * C64::new(0.0, eps) * C64::from_polar(1.0, x)
                + C64::new(0.0, 0.2) * C64::new(0.0, 2.0 * eps) * C64::from_polar(1.0, 2.0 * x)
                + C64::new(-0.7, 0.0) * C64::new(0.0, 3.0 * eps) * C64::from_polar(1.0, 3.0 * x)
        })
        .collect();
    assert!(d.iter().zip(&exact).all(|(a, b)| (a - b).norm() < 1e-12));
}

#[test]
fn oscillatory_profiles_are_uniformly_bounded() {
    let g = PeriodicGrid::new(1, 4096, 1.0).unwrap();
    let s = 2.0;
    let (mut semi, mut plain) = (Vec::new(), Vec::new());
    for eps in [0.1, 0.05, 0.025] {
        let v = oscillatory_profile(&g, eps);
        semi.push(hs_eps_norm(
            &g,
            &SemiclassicalField::scalar(v.clone(), eps),
            s,
        ));
        plain.push(hs_eps_norm(&g, &SemiclassicalField::scalar(v, 1.0), s));
    }
    assert!(semi
        .iter()
        .all(|n| *n < 2.0 * semi[0] && *n > 0.5 * semi[0]));
    let slope = (plain[2] / plain[0]).ln() / (0.025f64 / 0.1).ln();
    assert!((slope + s).abs() < 0.2, "slope {slope}");
}

#[test]
fn constant_coefficient_symbols_are_not_smoothed() {
    let g = PeriodicGrid::new(1, 64, 1.0).unwrap();
    let u = smooth(&g, &[(0.3, 0.1), (1.0, -0.5), (0.0, 0.2)]);
    let a = vec![C64::new(2.0, -1.0); g.len()];
    let b = |x: f64| C64::new(1.0 + x * x, 0.0);
    let eps = 0.1;
    let para = para_smooth(&g, eps, &ParaCutoff::default(), &a, b, &u).unwrap();
    let op = quantize_product(&g, eps, &a, |x| b(x[2]), &u).unwrap();
    assert!(para.iter().zip(&op).all(|(p, q)| (p - q).norm() < 1e-12));
}

#[test]
fn rejects_bad_grids() {
    assert!(PeriodicGrid::new(2, 8, 1.0).is_err());
    assert!(PeriodicGrid::new(1, 12, 1.0).is_err());
    assert!(PeriodicGrid::new(1, 8, 0.0).is_err());
}

#[test]
fn scaling_slopes_at_s1() {
    let [rem, comp, adj] = zkl_core::harness::pdo_studies(1.0).unwrap();
    assert!(
        (rem.fitted_slope - 0.5).abs() <= 0.5,
        "{}",
        rem.fitted_slope
    );
    assert!(
        (comp.fitted_slope - 1.0).abs() <= 0.3,
        "{}",
        comp.fitted_slope
    );
    assert!(adj.fitted_slope >= 0.8, "{}", adj.fitted_slope);
}
