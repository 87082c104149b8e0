//! Pseudospectral Strang solver for the vector Zakharov system
//!
//! `-2i dE/dt + Delta_e E - theta^-2 E = n E`,
//! `(d_t^2 - (1 + alpha^2) Delta) n = Delta |E|^2`,
//!
//! with `Delta_e = theta^2 grad div - curl curl`. `E` is the `p = 1` envelope;
//! the `p = -1` envelope is its conjugate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::PlasmaParams;
use crate::semiclassical::PeriodicGrid;
use crate::C64;

/// Relative change tolerated when projecting a datum onto divergence-free fields.
pub const PROJECTION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZakharovError {
    #[error(
        "datum is not divergence-free: projection changed it by {relative_change:e} (relative)"
    )]
    DivergenceViolation { relative_change: f64 },
    #[error("non-finite field at t = {t}: possible focusing blow-up")]
    BlowUp { t: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("field length {got} does not match grid size {expected}")]
    Length { got: usize, expected: usize },
}

/// Envelope, density and its time derivative on the grid.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ZakharovState {
    pub e: [Vec<C64>; 3],
    pub n: Vec<f64>,
    pub nt: Vec<f64>,
    pub t: f64,
}

impl ZakharovState {
    pub fn zeros(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        Self {
            e: [z.clone(), z.clone(), z],
            n: vec![0.0; len],
            nt: vec![0.0; len],
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    /// `|E|^2` pointwise.
    pub fn intensity(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.e.iter().map(|c| c[i].norm_sqr()).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            && self.n.iter().all(|x| x.is_finite())
            && self.nt.iter().all(|x| x.is_finite())
    }

    pub fn max_e(&self) -> f64 {
        self.intensity()
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.sqrt()))
    }

    pub fn max_n(&self) -> f64 {
        self.n.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }
}

/// Solver configuration.
#[derive(Clone, Debug)]
pub struct ZakharovConfig {
    pub grid: PeriodicGrid,
    pub dt: f64,
    pub theta_e: f64,
    pub alpha: f64,
    pub splitting_order: u32,
}

impl ZakharovConfig {
    pub fn new(grid: PeriodicGrid, dt: f64, params: &PlasmaParams) -> Result<Self, ZakharovError> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(ZakharovError::Config(format!(
                "dt must be finite and nonzero, got {dt}"
            )));
        }
        Ok(Self {
            grid,
            dt,
            theta_e: params.theta_e,
            alpha: params.alpha,
            splitting_order: 2,
        })
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        Self { dt, ..self.clone() }
    }

    /// Ion-acoustic speed squared `1 + alpha^2`.
    pub fn wave_speed_sq(&self) -> f64 {
        1.0 + self.alpha * self.alpha
    }
}

fn check_len(grid: &PeriodicGrid, len: usize) -> Result<(), ZakharovError> {
    if len != grid.len() {
        return Err(ZakharovError::Length {
            got: len,
            expected: grid.len(),
        });
    }
    Ok(())
}

/// Spectra of the three components.
fn spectra(grid: &PeriodicGrid, e: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
    [
        grid.forward(&e[0]),
        grid.forward(&e[1]),
        grid.forward(&e[2]),
    ]
}

fn from_spectra(grid: &PeriodicGrid, s: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
    [
        grid.inverse(&s[0]),
        grid.inverse(&s[1]),
        grid.inverse(&s[2]),
    ]
}

/// Splits `v` at wave vector `k` into longitudinal and transverse parts.
fn split(k: [f64; 3], v: [C64; 3]) -> ([C64; 3], [C64; 3]) {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return ([C64::new(0.0, 0.0); 3], v);
    }
    let dot = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
    let l = [dot * k[0], dot * k[1], dot * k[2]];
    (l, [v[0] - l[0], v[1] - l[1], v[2] - l[2]])
}

/// Leray projection of a vector field onto divergence-free fields.
pub fn leray_project(grid: &PeriodicGrid, e: &[Vec<C64>; 3]) -> [Vec<C64>; 3] {
    let mut s = spectra(grid, e);
    for i in 0..grid.len() {
        let (_, t) = split(grid.wavevector(i), [s[0][i], s[1][i], s[2][i]]);
        for c in 0..3 {
            s[c][i] = t[c];
        }
    }
    from_spectra(grid, &s)
}

/// Discrete divergence (max modulus) of a complex vector field.
pub fn divergence_max(grid: &PeriodicGrid, e: &[Vec<C64>; 3]) -> f64 {
    let s = spectra(grid, e);
    let mut div = vec![C64::new(0.0, 0.0); grid.len()];
    for c in 0..3 {
        let d = grid.derivative_spectrum(&s[c], c);
        for i in 0..grid.len() {
            div[i] += d[i];
        }
    }
    grid.inverse(&div).iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Accepts a divergence-free envelope with zero density.
pub fn init_from_datum(
    grid: &PeriodicGrid,
    e0: &[Vec<C64>; 3],
) -> Result<ZakharovState, ZakharovError> {
    for c in e0 {
        check_len(grid, c.len())?;
    }
    let proj = leray_project(grid, e0);
    let norm: f64 = e0
        .iter()
        .map(|c| grid.l2_norm(c).powi(2))
        .sum::<f64>()
        .sqrt();
    let change: f64 = (0..3)
        .map(|c| {
            let d: Vec<C64> = e0[c].iter().zip(&proj[c]).map(|(a, b)| a - b).collect();
            grid.l2_norm(&d).powi(2)
        })
        .sum::<f64>()
        .sqrt();
    let relative_change = if norm > 0.0 { change / norm } else { 0.0 };
    if relative_change > PROJECTION_TOLERANCE {
        return Err(ZakharovError::DivergenceViolation { relative_change });
    }
    let mut st = ZakharovState::zeros(grid.len());
    st.e = proj;
    Ok(st)
}

/// Exact flow of `-2i dE/dt + (Delta_e - theta^-2) E = 0` over `h`, in spectrum.
fn linear_flow(cfg: &ZakharovConfig, s: &mut [Vec<C64>; 3], h: f64) {
    let th2 = cfg.theta_e * cfg.theta_e;
    for i in 0..cfg.grid.len() {
        let k = cfg.grid.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let (l, t) = split(k, [s[0][i], s[1][i], s[2][i]]);
        // dE/dt = (i/2)(|k|^2 theta^2 + theta^-2) E_L, (i/2)(|k|^2 + theta^-2) E_T
        let rot_l = C64::from_polar(1.0, 0.5 * (th2 * k2 + 1.0 / th2) * h);
        let rot_t = C64::from_polar(1.0, 0.5 * (k2 + 1.0 / th2) * h);
        for c in 0..3 {
            s[c][i] = l[c] * rot_l + t[c] * rot_t;
        }
    }
}

/// Exact flow of `-2i dE/dt = n E` with `n` frozen.
fn potential_flow(e: &mut [Vec<C64>; 3], n: &[f64], h: f64) {
    for c in e.iter_mut() {
        for (z, &nn) in c.iter_mut().zip(n) {
            *z *= C64::from_polar(1.0, 0.5 * nn * h);
        }
    }
}

/// Exact flow of `n_tt - c^2 Delta n = Delta q` with `q` frozen.
fn wave_flow(cfg: &ZakharovConfig, n: &mut Vec<f64>, nt: &mut Vec<f64>, q: &[f64], h: f64) {
    let grid = &cfg.grid;
    let c2 = cfg.wave_speed_sq();
    let nh = grid.forward_real(n);
    let nth = grid.forward_real(nt);
    let qh = grid.forward_real(q);
    let mut n_new = vec![C64::new(0.0, 0.0); grid.len()];
    let mut nt_new = vec![C64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.len() {
        let k = grid.wavenumber_norm(i);
        if k == 0.0 {
            n_new[i] = nh[i] + nth[i] * h;
            nt_new[i] = nth[i];
            continue;
        }
        let w = c2.sqrt() * k;
        // forcing -k^2 q_k, equilibrium -q_k / c^2
        let eq = -qh[i] / c2;
        let (s, co) = (w * h).sin_cos();
        let a = nh[i] - eq;
        n_new[i] = eq + a * co + nth[i] * (s / w);
        nt_new[i] = -a * w * s + nth[i] * co;
    }
    *n = grid.inverse_real(&n_new);
    *nt = grid.inverse_real(&nt_new);
}

/// Symmetric envelope substep: potential, linear, potential.
fn envelope_flow(cfg: &ZakharovConfig, e: &mut [Vec<C64>; 3], n: &[f64], h: f64) {
    potential_flow(e, n, h / 2.0);
    let mut s = spectra(&cfg.grid, e);
    linear_flow(cfg, &mut s, h);
    *e = from_spectra(&cfg.grid, &s);
    potential_flow(e, n, h / 2.0);
}

/// One Strang step: envelope half step, density full step, envelope half step.
pub fn step(state: &ZakharovState, cfg: &ZakharovConfig) -> Result<ZakharovState, ZakharovError> {
    check_len(&cfg.grid, state.len())?;
    let h = cfg.dt;
    let mut st = state.clone();
    envelope_flow(cfg, &mut st.e, &state.n, h / 2.0);
    let q = st.intensity();
    wave_flow(cfg, &mut st.n, &mut st.nt, &q, h);
    let n_mid = st.n.clone();
    envelope_flow(cfg, &mut st.e, &n_mid, h / 2.0);
    st.t = state.t + h;
    if !st.is_finite() {
        return Err(ZakharovError::BlowUp { t: st.t });
    }
    Ok(st)
}

/// Advances `steps` steps, recording every state when `record` is set.
pub fn run(
    state: &ZakharovState,
    cfg: &ZakharovConfig,
    steps: usize,
    mut observe: impl FnMut(&ZakharovState),
) -> Result<ZakharovState, ZakharovError> {
    let mut st = state.clone();
    observe(&st);
    for _ in 0..steps {
        st = step(&st, cfg)?;
        observe(&st);
    }
    Ok(st)
}

/// `||E||_{L^2}`.
pub fn mass(grid: &PeriodicGrid, st: &ZakharovState) -> f64 {
    st.e.iter()
        .map(|c| grid.l2_norm(c).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Right-hand side of the envelope equation, `dE/dt = -(i/2)((Delta_e - theta^-2) E - n E)`.
pub fn envelope_rhs(cfg: &ZakharovConfig, st: &ZakharovState) -> [Vec<C64>; 3] {
    let grid = &cfg.grid;
    let th2 = cfg.theta_e * cfg.theta_e;
    let mut s = spectra(grid, &st.e);
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let (l, t) = split(k, [s[0][i], s[1][i], s[2][i]]);
        for c in 0..3 {
            s[c][i] = -l[c] * (th2 * k2 + 1.0 / th2) - t[c] * (k2 + 1.0 / th2);
        }
    }
    let lin = from_spectra(grid, &s);
    let half_i = C64::new(0.0, -0.5);
    let mut out = lin;
    for c in 0..3 {
        for i in 0..grid.len() {
            out[c][i] = half_i * (out[c][i] - st.e[c][i] * st.n[i]);
        }
    }
    out
}

/// `n_tt = c^2 Delta n + Delta |E|^2`.
pub fn density_acceleration(cfg: &ZakharovConfig, st: &ZakharovState) -> Vec<f64> {
    let grid = &cfg.grid;
    let c2 = cfg.wave_speed_sq();
    let q = st.intensity();
    let nh = grid.forward_real(&st.n);
    let qh = grid.forward_real(&q);
    let acc: Vec<C64> = (0..grid.len())
        .map(|i| {
            let k = grid.wavenumber_norm(i);
            -(nh[i] * c2 + qh[i]) * (k * k)
        })
        .collect();
    grid.inverse_real(&acc)
}

/// First-order corrector fields determined by the polarization conditions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FirstOrderCorrector {
    /// `B_{1,1} = -curl E / i`.
    pub b11: [Vec<C64>; 3],
    /// `n_{e1,1} = -theta div E`.
    pub ne11: Vec<C64>,
    /// `v_{i1,1} = E / (i theta)`.
    pub vi11: [Vec<C64>; 3],
    /// `n_{e1,0} = n_{i1,0}`.
    pub ne10: Vec<f64>,
    pub ni10: Vec<f64>,
    /// Gradient field `v_{i1,0}` with `div v_{i1,0} = -n_t`.
    pub vi10: [Vec<f64>; 3],
}

/// Polarization-condition fields for the `p = 1` harmonic and the mean.
pub fn solve_corrector_first_order(
    cfg: &ZakharovConfig,
    st: &ZakharovState,
) -> FirstOrderCorrector {
    let grid = &cfg.grid;
    let th = cfg.theta_e;
    let s = spectra(grid, &st.e);
    let len = grid.len();
    let zero = vec![C64::new(0.0, 0.0); len];
    let mut b = [zero.clone(), zero.clone(), zero.clone()];
    let mut div = zero.clone();
    let nth = grid.forward_real(&st.nt);
    let mut vi = [zero.clone(), zero.clone(), zero];
    for i in 0..len {
        let k = grid.wavevector(i);
        let v = [s[0][i], s[1][i], s[2][i]];
        // B = -(i k x E) / i = -k x E
        b[0][i] = -(v[2] * k[1] - v[1] * k[2]);
        b[1][i] = -(v[0] * k[2] - v[2] * k[0]);
        b[2][i] = -(v[1] * k[0] - v[0] * k[1]);
        div[i] = C64::new(0.0, 1.0) * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 > 0.0 {
            for c in 0..3 {
                vi[c][i] = C64::new(0.0, k[c] / k2) * nth[i];
            }
        }
    }
    let inv_i_theta = C64::new(0.0, -1.0 / th);
    FirstOrderCorrector {
        b11: from_spectra(grid, &b),
        ne11: grid.inverse(&div).iter().map(|z| z * (-th)).collect(),
        vi11: [
            st.e[0].iter().map(|z| z * inv_i_theta).collect(),
            st.e[1].iter().map(|z| z * inv_i_theta).collect(),
            st.e[2].iter().map(|z| z * inv_i_theta).collect(),
        ],
        ne10: st.n.clone(),
        ni10: st.n.clone(),
        vi10: [
            grid.inverse_real(&vi[0]),
            grid.inverse_real(&vi[1]),
            grid.inverse_real(&vi[2]),
        ],
    }
}

/// Built-in envelope data on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Datum {
    /// `A e_1 e^{i k x_3}`.
    PlaneWave,
    /// Transverse envelope `e_1 (1 + 0.3 cos x_3) / 2`, periodic in `x_3`.
    Modulated,
    /// Localized transverse packet `e_1 0.5 exp(-2 sin^2(x_3 / 2))`.
    Packet,
}

impl Datum {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "plane-wave" => Some(Datum::PlaneWave),
            "modulated" => Some(Datum::Modulated),
            "packet" => Some(Datum::Packet),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Datum::PlaneWave => "plane-wave",
            Datum::Modulated => "modulated",
            Datum::Packet => "packet",
        }
    }

    /// Envelope field, transverse to the third axis so it is divergence-free on 1D grids.
    pub fn envelope(&self, grid: &PeriodicGrid) -> [Vec<C64>; 3] {
        let l = grid.period_factor;
        let e1: Vec<C64> = (0..grid.len())
            .map(|j| {
                let z = grid.point(j)[2] / l;
                match self {
                    Datum::PlaneWave => C64::from_polar(0.5, z),
                    Datum::Modulated => C64::new(0.5 * (1.0 + 0.3 * z.cos()), 0.0),
                    Datum::Packet => C64::new(0.5 * (-2.0 * (z / 2.0).sin().powi(2)).exp(), 0.0),
                }
            })
            .collect();
        let zero = vec![C64::new(0.0, 0.0); grid.len()];
        [e1, zero.clone(), zero]
    }
}

/// Maximum difference of two states (envelope modulus and density).
pub fn state_distance(a: &ZakharovState, b: &ZakharovState) -> f64 {
    let de = (0..3)
        .flat_map(|c| a.e[c].iter().zip(&b.e[c]).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max);
    let dn =
        a.n.iter()
            .zip(&b.n)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
    let dnt =
        a.nt.iter()
            .zip(&b.nt)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
    de.max(dn).max(dnt)
}
