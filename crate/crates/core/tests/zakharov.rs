//! Split-step Zakharov solver and the first-order corrector.

use proptest::prelude::*;
use zkl_core::model::PlasmaParams;
use zkl_core::semiclassical::PeriodicGrid;
use zkl_core::zakharov::*;
use zkl_core::C64;

fn setup(n: usize, dt: f64) -> (PeriodicGrid, ZakharovConfig) {
    let g = PeriodicGrid::new(1, n, 1.0).unwrap();
    let p = PlasmaParams::new(0.05, 0.35, 0.1).unwrap();
    let c = ZakharovConfig::new(g.clone(), dt, &p).unwrap();
    (g, c)
}

fn transverse(g: &PeriodicGrid, c1: &[(f64, f64)], c2: &[(f64, f64)]) -> [Vec<C64>; 3] {
    let field = |c: &[(f64, f64)]| -> Vec<C64> {
        (0..g.len())
            .map(|j| {
                let x = g.point(j)[2];
                c.iter()
                    .enumerate()
                    .map(|(m, (a, b))| C64::new(*a, *b) * C64::from_polar(0.3, m as f64 * x))
                    .sum()
            })
            .collect()
    };
    [field(c1), field(c2), vec![C64::new(0.0, 0.0); g.len()]]
}

fn coeffs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)
}

fn advance(st: &ZakharovState, c: &ZakharovConfig, n: usize) -> ZakharovState {
    (0..n).fold(st.clone(), |s, _| step(&s, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_is_conserved(a in coeffs(), b in coeffs()) {
        let (g, c) = setup(64, 1e-3);
        let st = init_from_datum(&g, &transverse(&g, &a, &b)).unwrap();
        let end = advance(&st, &c, 200);
        prop_assert!((mass(&g, &end) - mass(&g, &st)).abs() < 1e-10 * (1.0 + mass(&g, &st)));
    }

    #[test]
    fn strang_steps_are_reversible(a in coeffs(), b in coeffs()) {
        let (g, c) = setup(64, 1e-3);
        let st = init_from_datum(&g, &transverse(&g, &a, &b)).unwrap();
        let back = advance(&advance(&st, &c, 50), &c.with_dt(-1e-3), 50);
        prop_assert!(state_distance(&back, &st) < 1e-9);
    }
}

#[test]
fn zero_datum_stays_zero() {
    let (g, c) = setup(32, 1e-3);
    let z = [
        vec![C64::new(0.0, 0.0); g.len()],
        vec![C64::new(0.0, 0.0); g.len()],
        vec![C64::new(0.0, 0.0); g.len()],
    ];
    let st = init_from_datum(&g, &z).unwrap();
    let end = advance(&st, &c, 10);
    assert_eq!(end.max_e(), 0.0);
    assert_eq!(end.max_n(), 0.0);
    assert!(end.nt.iter().all(|x| *x == 0.0));
}

#[test]
fn transverse_plane_wave_accepted_longitudinal_rejected() {
    let (g, _) = setup(32, 1e-3);
    let e = Datum::PlaneWave.envelope(&g);
    let st = init_from_datum(&g, &e).unwrap();
    assert!((0..g.len()).all(|j| (st.e[0][j] - e[0][j]).norm() < 1e-14));
    let long = [e[2].clone(), e[1].clone(), e[0].clone()];
    assert!(matches!(
        init_from_datum(&g, &long),
        Err(ZakharovError::DivergenceViolation { .. })
    ));
}

#[test]
fn plane_wave_rotates_at_the_linear_frequency() {
    let (g, c) = setup(32, 1e-3);
    let st = init_from_datum(&g, &Datum::PlaneWave.envelope(&g)).unwrap();
    let end = advance(&st, &c, 100);
    let omega = 0.5 * (1.0 + 1.0 / (c.theta_e * c.theta_e));
    let rot = C64::from_polar(1.0, omega * end.t);
    let err = (0..g.len())
        .map(|j| (end.e[0][j] - st.e[0][j] * rot).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
    assert!(end.n.iter().all(|x| x.abs() < 1e-14));
}

#[test]
fn standing_density_wave_is_exact() {
    let (g, c) = setup(32, 1e-2);
    let mut st = ZakharovState::zeros(g.len());
    let k = 2.0;
    for j in 0..g.len() {
        st.n[j] = (k * g.point(j)[2]).cos();
    }
    let end = advance(&st, &c, 50);
    let w = c.wave_speed_sq().sqrt() * k;
    let err = (0..g.len())
        .map(|j| (end.n[j] - (k * g.point(j)[2]).cos() * (w * end.t).cos()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn second_order_in_dt() {
    let (g, c) = setup(64, 1e-3);
    let st = init_from_datum(&g, &Datum::Modulated.envelope(&g)).unwrap();
    let t = 0.1;
    let reference = advance(&st, &c.with_dt(t / 1600.0), 1600);
    let errs: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| state_distance(&advance(&st, &c.with_dt(t / n as f64), n), &reference))
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }
}

#[test]
fn corrector_fields() {
    let (g, c) = setup(32, 1e-3);
    let k = 1.0;
    let a = C64::new(0.5, 0.0);
    let st = init_from_datum(&g, &Datum::PlaneWave.envelope(&g)).unwrap();
    let corr = solve_corrector_first_order(&c, &st);
    for j in 0..g.len() {
        let ph = C64::from_polar(1.0, k * g.point(j)[2]);
        assert!((corr.b11[1][j] - a * ph * (-k)).norm() < 1e-12);
        assert!(corr.b11[0][j].norm() < 1e-12 && corr.b11[2][j].norm() < 1e-12);
        assert!(corr.ne11[j].norm() < 1e-12);
    }
    let mut st = init_from_datum(&g, &Datum::Modulated.envelope(&g)).unwrap();
    st = advance(&st, &c, 20);
    let corr = solve_corrector_first_order(&c, &st);
    assert_eq!(corr.ne10, st.n);
    assert_eq!(corr.ni10, st.n);
}

#[test]
fn zero_step_rejected() {
    let g = PeriodicGrid::new(1, 8, 1.0).unwrap();
    assert!(ZakharovConfig::new(g, 0.0, &PlasmaParams::default()).is_err());
}
