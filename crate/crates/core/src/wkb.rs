//! Three-scale WKB approximate solution built from a Zakharov state.
//!
//! `u_a = sum_m eps^m sum_p e^{i p t / eps^2} u_{m,p}(t, x)` for `m <= 2`.
//! The cascade in the log variables of the rescaled system reads, at
//! order `eps^k`, `i p X_{k+2,p} + d_t X_{k,p} = [RHS]_k`. It gives
//!
//! * `m = 0`: `E_{0,1}` from the envelope and `v_{e0,1} = i E_{0,1}`;
//! * `m = 1`: `B_{1,1} = -curl E / i`, `n_{e1,1} = -theta div E`,
//!   `v_{i1,1} = E / (i theta)`, and the means `n_{e1,0} = n`, `w_{1,0} = alpha n`,
//!   `v_{i1,0}` the gradient field with `div v_{i1,0} = -n_t`;
//! * `m = 2`: with `R_E`, `R_V` the order-one right-hand sides of the field and
//!   electron-velocity rows, `E_2 = (R_V + i p R_E) / (1 - p^2)` and
//!   `v_{e2} = i p E_2 - R_E` for `p in {0, 2}`, and `v_{e2,1} = -R_E` with `E_{2,1} = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em_dynamics::{full_rhs, Fields};
use crate::model::{PlasmaParams, DIM, IB, IE, INE, IVE, IVI, IW};
use crate::semiclassical::{fit_slope, PeriodicGrid};
use crate::transparency::{AmplitudeSnapshot, HarmonicAmplitude};
use crate::zakharov::{
    density_acceleration, envelope_rhs, solve_corrector_first_order, ZakharovConfig, ZakharovState,
};
use crate::C64;

/// Step used for the directional derivative of the profiles along the Zakharov flow.
/// The profiles are at most quadratic in the state, so the central difference is exact up to rounding.
const FLOW_STEP: f64 = 1e-3;

/// Phases sampled when measuring residuals.
const RESIDUAL_PHASES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WkbError {
    #[error("quasineutrality check failed: max |n_e10 - n_i10| = {0:e}")]
    InconsistentCorrector(f64),
    #[error("order must be 0, 1 or 2, got {0}")]
    Order(u8),
    #[error("parameter error: {0}")]
    Params(String),
}

type CF = Vec<C64>;
type V3 = [CF; 3];

/// One harmonic `u_{m,p}` with its slow time derivative.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileTerm {
    pub m: u8,
    pub p: i32,
    pub field: Vec<CF>,
    pub dt: Vec<CF>,
}

/// Profile at one slow time.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WKBProfile {
    pub eps: f64,
    pub omega: f64,
    pub order: u8,
    pub t: f64,
    pub theta_e: f64,
    pub alpha: f64,
    pub terms: Vec<ProfileTerm>,
    pub zakharov: ZakharovState,
}

/// Residual norms over an eps sweep.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualReport {
    pub order: u8,
    pub eps_values: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub fitted_order: f64,
}

fn zeros(len: usize) -> CF {
    vec![C64::new(0.0, 0.0); len]
}

fn zeros3(len: usize) -> V3 {
    [zeros(len), zeros(len), zeros(len)]
}

fn conj(f: &CF) -> CF {
    f.iter().map(|z| z.conj()).collect()
}

fn conj3(v: &V3) -> V3 {
    [conj(&v[0]), conj(&v[1]), conj(&v[2])]
}

fn scale3(v: &V3, c: C64) -> V3 {
    [
        v[0].iter().map(|z| z * c).collect(),
        v[1].iter().map(|z| z * c).collect(),
        v[2].iter().map(|z| z * c).collect(),
    ]
}

fn add3(a: &mut V3, b: &V3, c: C64) {
    for d in 0..3 {
        for (x, y) in a[d].iter_mut().zip(&b[d]) {
            *x += y * c;
        }
    }
}

fn deriv(grid: &PeriodicGrid, f: &CF, axis: usize) -> CF {
    if grid.dim == 1 && axis < 2 {
        return zeros(f.len());
    }
    grid.derivative(f, axis)
}

fn grad(grid: &PeriodicGrid, f: &CF) -> V3 {
    [deriv(grid, f, 0), deriv(grid, f, 1), deriv(grid, f, 2)]
}

fn curl(grid: &PeriodicGrid, v: &V3) -> V3 {
    let d = |c: usize, a: usize| deriv(grid, &v[c], a);
    let sub = |x: CF, y: CF| x.iter().zip(&y).map(|(a, b)| a - b).collect::<CF>();
    [
        sub(d(2, 1), d(1, 2)),
        sub(d(0, 2), d(2, 0)),
        sub(d(1, 0), d(0, 1)),
    ]
}

fn cross(a: &V3, b: &V3) -> V3 {
    let n = a[0].len();
    let mut out = zeros3(n);
    for i in 0..n {
        out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
        out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
        out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
    }
    out
}

/// `(a . grad) b`.
fn advect(grid: &PeriodicGrid, a: &V3, b: &V3) -> V3 {
    let n = a[0].len();
    let mut out = zeros3(n);
    for c in 0..3 {
        let g = grad(grid, &b[c]);
        for i in 0..n {
            out[c][i] = a[0][i] * g[0][i] + a[1][i] * g[1][i] + a[2][i] * g[2][i];
        }
    }
    out
}

fn mul_scalar(s: &CF, v: &V3) -> V3 {
    [
        s.iter().zip(&v[0]).map(|(a, b)| a * b).collect(),
        s.iter().zip(&v[1]).map(|(a, b)| a * b).collect(),
        s.iter().zip(&v[2]).map(|(a, b)| a * b).collect(),
    ]
}

fn real_to_c(f: &[f64]) -> CF {
    f.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Harmonic of a field family indexed by `p in {-1, 0, 1}`.
struct Harmonics3 {
    h: [V3; 3],
}

impl Harmonics3 {
    fn get(&self, p: i32) -> Option<&V3> {
        if (-1..=1).contains(&p) {
            Some(&self.h[(p + 1) as usize])
        } else {
            None
        }
    }
}

struct HarmonicsScalar {
    h: [CF; 3],
}

impl HarmonicsScalar {
    fn get(&self, p: i32) -> Option<&CF> {
        if (-1..=1).contains(&p) {
            Some(&self.h[(p + 1) as usize])
        } else {
            None
        }
    }
}

fn empty_fields(len: usize) -> Vec<CF> {
    (0..DIM).map(|_| zeros(len)).collect()
}

fn put3(f: &mut [CF], at: usize, v: &V3) {
    for d in 0..3 {
        f[at + d] = v[d].clone();
    }
}

/// Terms `(m, p, u_{m,p})` as functions of the Zakharov state, `p` of both signs.
fn raw_terms(
    cfg: &ZakharovConfig,
    st: &ZakharovState,
    order: u8,
) -> Result<Vec<(u8, i32, Vec<CF>)>, WkbError> {
    let grid = &cfg.grid;
    let len = grid.len();
    let th = cfg.theta_e;
    let i = C64::new(0.0, 1.0);
    let e01 = st.e.clone();
    let v01 = scale3(&e01, i);
    let mut out = Vec::new();

    let mut f = empty_fields(len);
    put3(&mut f, IE, &e01);
    put3(&mut f, IVE, &v01);
    out.push((0, 1, f.clone()));
    out.push((0, -1, f.iter().map(conj).collect()));
    if order == 0 {
        return Ok(out);
    }

    let c = solve_corrector_first_order(cfg, st);
    let qn = c
        .ne10
        .iter()
        .zip(&c.ni10)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if qn != 0.0 {
        return Err(WkbError::InconsistentCorrector(qn));
    }
    let mut f = empty_fields(len);
    put3(&mut f, IB, &c.b11);
    f[INE] = c.ne11.clone();
    put3(&mut f, IVI, &c.vi11);
    out.push((1, 1, f.clone()));
    out.push((1, -1, f.iter().map(conj).collect()));
    let mut f0 = empty_fields(len);
    f0[INE] = real_to_c(&c.ne10);
    let vi10 = [
        real_to_c(&c.vi10[0]),
        real_to_c(&c.vi10[1]),
        real_to_c(&c.vi10[2]),
    ];
    put3(&mut f0, IVI, &vi10);
    f0[IW] = c
        .ni10
        .iter()
        .map(|&x| C64::new(cfg.alpha * x, 0.0))
        .collect();
    out.push((1, 0, f0));
    if order == 1 {
        return Ok(out);
    }

    // order-one right-hand sides of the E and v_e rows
    let v0 = Harmonics3 {
        h: [conj3(&v01), zeros3(len), v01.clone()],
    };
    let b1 = Harmonics3 {
        h: [conj3(&c.b11), zeros3(len), c.b11.clone()],
    };
    let u1 = Harmonics3 {
        h: [conj3(&c.vi11), vi10, c.vi11.clone()],
    };
    let n1 = HarmonicsScalar {
        h: [conj(&c.ne11), real_to_c(&c.ne10), c.ne11.clone()],
    };
    let de = envelope_rhs(cfg, st);
    let one = C64::new(1.0, 0.0);
    for p in 0..=2i32 {
        let mut re = zeros3(len);
        let mut rv = zeros3(len);
        if p == 1 {
            add3(&mut re, &de, -one);
            add3(&mut rv, &scale3(&de, i), -one);
        }
        if let Some(b) = b1.get(p) {
            add3(&mut re, &curl(grid, b), one);
        }
        if let Some(u) = u1.get(p) {
            add3(&mut re, u, C64::new(-1.0 / th, 0.0));
        }
        if let Some(n) = n1.get(p) {
            add3(&mut rv, &grad(grid, n), C64::new(-th, 0.0));
        }
        for a in -1..=1 {
            let b = p - a;
            if let (Some(n), Some(v)) = (n1.get(a), v0.get(b)) {
                add3(&mut re, &mul_scalar(n, v), one);
            }
            if let (Some(va), Some(vb)) = (v0.get(a), v0.get(b)) {
                add3(&mut rv, &advect(grid, va, vb), C64::new(-th, 0.0));
            }
            if let (Some(va), Some(bb)) = (v0.get(a), b1.get(b)) {
                add3(&mut rv, &cross(va, bb), C64::new(-th, 0.0));
            }
        }
        let ip = C64::new(0.0, p as f64);
        let (e2, v2) = if p == 1 {
            (zeros3(len), scale3(&re, -one))
        } else {
            let mut e2 = rv.clone();
            add3(&mut e2, &re, ip);
            let e2 = scale3(&e2, C64::new(1.0 / (1.0 - (p * p) as f64), 0.0));
            let mut v2 = scale3(&e2, ip);
            add3(&mut v2, &re, -one);
            (e2, v2)
        };
        let mut f = empty_fields(len);
        put3(&mut f, IE, &e2);
        put3(&mut f, IVE, &v2);
        if p == 0 {
            out.push((2, 0, f));
        } else {
            out.push((2, -p, f.iter().map(conj).collect()));
            out.push((2, p, f));
        }
    }
    Ok(out)
}

/// `R_V + i R_E` at `p = 1`: vanishes when the envelope solves the Schrodinger equation.
pub fn schrodinger_defect(cfg: &ZakharovConfig, st: &ZakharovState) -> Result<f64, WkbError> {
    let grid = &cfg.grid;
    let th = cfg.theta_e;
    let i = C64::new(0.0, 1.0);
    let c = solve_corrector_first_order(cfg, st);
    let de = envelope_rhs(cfg, st);
    let v01 = scale3(&st.e, i);
    let mut re = scale3(&de, C64::new(-1.0, 0.0));
    add3(&mut re, &curl(grid, &c.b11), C64::new(1.0, 0.0));
    add3(&mut re, &c.vi11, C64::new(-1.0 / th, 0.0));
    add3(
        &mut re,
        &mul_scalar(&real_to_c(&c.ne10), &v01),
        C64::new(1.0, 0.0),
    );
    let mut rv = scale3(&de, -i);
    add3(&mut rv, &grad(grid, &c.ne11), C64::new(-th, 0.0));
    add3(&mut rv, &re, i);
    Ok(rv
        .iter()
        .flat_map(|c| c.iter().map(|z| z.norm()))
        .fold(0.0, f64::max))
}

fn shifted(st: &ZakharovState, de: &[CF; 3], dnt: &[f64], h: f64) -> ZakharovState {
    let mut s = st.clone();
    for c in 0..3 {
        for (x, d) in s.e[c].iter_mut().zip(&de[c]) {
            *x += d * h;
        }
    }
    for j in 0..s.n.len() {
        s.n[j] += st.nt[j] * h;
        s.nt[j] += dnt[j] * h;
    }
    s.t += h;
    s
}

/// Builds the profile of the given order from a Zakharov state.
pub fn build_profile(
    cfg: &ZakharovConfig,
    st: &ZakharovState,
    params: &PlasmaParams,
    order: u8,
) -> Result<WKBProfile, WkbError> {
    if order > 2 {
        return Err(WkbError::Order(order));
    }
    if (cfg.theta_e - params.theta_e).abs() > 0.0 || (cfg.alpha - params.alpha).abs() > 0.0 {
        return Err(WkbError::Params(
            "Zakharov configuration and plasma parameters disagree".into(),
        ));
    }
    let base = raw_terms(cfg, st, order)?;
    // slow time derivative along the Zakharov vector field
    let de = envelope_rhs(cfg, st);
    let dnt = density_acceleration(cfg, st);
    let plus = raw_terms(cfg, &shifted(st, &de, &dnt, FLOW_STEP), order)?;
    let minus = raw_terms(cfg, &shifted(st, &de, &dnt, -FLOW_STEP), order)?;
    let terms = base
        .into_iter()
        .zip(plus.into_iter().zip(minus))
        .map(|((m, p, field), ((_, _, fp), (_, _, fm)))| {
            let dt = fp
                .iter()
                .zip(&fm)
                .map(|(a, b)| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (x - y) / (2.0 * FLOW_STEP))
                        .collect()
                })
                .collect();
            ProfileTerm { m, p, field, dt }
        })
        .collect();
    Ok(WKBProfile {
        eps: params.eps,
        omega: params.omega,
        order,
        t: st.t,
        theta_e: params.theta_e,
        alpha: params.alpha,
        terms,
        zakharov: st.clone(),
    })
}

impl WKBProfile {
    pub fn len(&self) -> usize {
        self.zakharov.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zakharov.is_empty()
    }

    /// Same profile with different eps weights.
    pub fn with_eps(&self, eps: f64) -> Self {
        Self {
            eps,
            ..self.clone()
        }
    }

    /// First-order shift of the slow time: `u_{m,p} + h d_t u_{m,p}`.
    pub fn advanced(&self, h: f64) -> Self {
        let mut out = self.clone();
        for term in &mut out.terms {
            for (f, d) in term.field.iter_mut().zip(&term.dt) {
                for (x, y) in f.iter_mut().zip(d) {
                    *x += y * h;
                }
            }
        }
        out.t += h;
        out
    }

    pub fn term(&self, m: u8, p: i32) -> Option<&ProfileTerm> {
        self.terms.iter().find(|t| t.m == m && t.p == p)
    }

    /// Complex sum `sum eps^m e^{i p phase} (u_{m,p} + (t - t_profile) d_t u_{m,p})` at every grid point.
    pub fn evaluate_complex(&self, t: f64, phase: f64) -> Vec<CF> {
        let len = self.len();
        let mut out = empty_fields(len);
        let dt = t - self.t;
        for term in &self.terms {
            let w = self.eps.powi(term.m as i32) * C64::from_polar(1.0, term.p as f64 * phase);
            for c in 0..DIM {
                for j in 0..len {
                    out[c][j] += w * (term.field[c][j] + term.dt[c][j] * dt);
                }
            }
        }
        out
    }

    /// Real state at time `t` (phase `omega t / eps^2`).
    pub fn evaluate(&self, t: f64) -> Fields {
        self.evaluate_phase(t, self.omega * t / (self.eps * self.eps))
    }

    pub fn evaluate_phase(&self, t: f64, phase: f64) -> Fields {
        self.evaluate_complex(t, phase)
            .into_iter()
            .map(|c| c.into_iter().map(|z| z.re).collect())
            .collect()
    }

    /// Exact time derivative of the ansatz, `sum eps^m e^{i p phase}(i p omega eps^-2 u_{m,p} + d_t u_{m,p})`.
    pub fn time_derivative(&self, phase: f64) -> Fields {
        let len = self.len();
        let mut out: Fields = vec![vec![0.0; len]; DIM];
        let eps2 = self.eps * self.eps;
        for term in &self.terms {
            let w = self.eps.powi(term.m as i32) * C64::from_polar(1.0, term.p as f64 * phase);
            let fast = C64::new(0.0, term.p as f64 * self.omega / eps2);
            for c in 0..DIM {
                for j in 0..len {
                    out[c][j] += (w * (fast * term.field[c][j] + term.dt[c][j])).re;
                }
            }
        }
        out
    }

    /// Harmonic amplitudes at grid point `j`, for the interaction-coefficient audit.
    pub fn snapshot(&self, grid: &PeriodicGrid, j: usize) -> AmplitudeSnapshot {
        let mut ps: Vec<i32> = self.terms.iter().map(|t| t.p).collect();
        ps.sort();
        ps.dedup();
        let harmonics = ps
            .into_iter()
            .map(|p| {
                let mut h = HarmonicAmplitude::zero(p);
                for term in self.terms.iter().filter(|t| t.p == p) {
                    let w = self.eps.powi(term.m as i32);
                    for c in 0..DIM {
                        h.value[c] += term.field[c][j] * w;
                        h.dt[c] += term.dt[c][j] * w;
                        for (d, g) in h.grad.iter_mut().enumerate() {
                            g[c] += deriv(grid, &term.field[c], d)[j] * w;
                        }
                    }
                    if term.m == 0 {
                        for d in 0..3 {
                            h.ve0[d] = term.field[IVE + d][j];
                        }
                    }
                }
                h
            })
            .collect();
        AmplitudeSnapshot {
            eps: self.eps,
            t: self.t,
            harmonics,
        }
    }
}

/// Residual `d_t u_a - F(u_a)` of the rescaled system at one phase.
pub fn residual_fields(
    grid: &PeriodicGrid,
    params: &PlasmaParams,
    profile: &WKBProfile,
    phase: f64,
) -> Fields {
    let u = profile.evaluate_phase(profile.t, phase);
    let ut = profile.time_derivative(phase);
    let f = full_rhs(grid, params, &u);
    ut.iter()
        .zip(&f)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect()
}

/// `||.||_{eps,s}` of a 14-component real field.
pub fn fields_norm(grid: &PeriodicGrid, f: &Fields, eps: f64, s: f64) -> f64 {
    f.iter()
        .map(|c| grid.spectrum_norm(&grid.forward_real(c), eps, s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Largest residual norm over sampled phases.
pub fn residual_norm(
    grid: &PeriodicGrid,
    params: &PlasmaParams,
    profile: &WKBProfile,
    s: f64,
) -> f64 {
    (0..RESIDUAL_PHASES)
        .map(|j| {
            let phase = 2.0 * std::f64::consts::PI * j as f64 / RESIDUAL_PHASES as f64;
            fields_norm(
                grid,
                &residual_fields(grid, params, profile, phase),
                params.eps,
                s,
            )
        })
        .fold(0.0, f64::max)
}

/// Residual norms of one Zakharov state's profile across an eps sweep.
pub fn residual_study(
    cfg: &ZakharovConfig,
    st: &ZakharovState,
    params: &PlasmaParams,
    eps_list: &[f64],
    s: f64,
    order: u8,
) -> Result<ResidualReport, WkbError> {
    let profile = build_profile(cfg, st, params, order)?;
    let mut norms = Vec::new();
    for &eps in eps_list {
        let p = params
            .with_eps(eps)
            .map_err(|e| WkbError::Params(e.to_string()))?;
        norms.push(residual_norm(&cfg.grid, &p, &profile.with_eps(eps), s));
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|r| r.ln()).collect();
    Ok(ResidualReport {
        order,
        eps_values: eps_list.to_vec(),
        residual_norms: norms,
        fitted_order: fit_slope(&xs, &ys),
    })
}

/// Homological-equation residual over an eps sweep.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HomologicalReport {
    pub eps_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted_order: f64,
}

/// Residual of the `N^(0)` equation for the profile amplitudes at grid point `j`.
pub fn homological_study(
    grid: &PeriodicGrid,
    profile: &WKBProfile,
    params: &PlasmaParams,
    eps_list: &[f64],
    j: usize,
    xi_grid: &[nalgebra::Vector3<f64>],
) -> Result<HomologicalReport, WkbError> {
    let cut = crate::resonance::Cutoffs::default();
    let mut residuals = Vec::new();
    for &eps in eps_list {
        let p = params
            .with_eps(eps)
            .map_err(|e| WkbError::Params(e.to_string()))?;
        let prof = profile.with_eps(eps);
        let snap = prof.snapshot(grid, j);
        let prev = prof.advanced(-FLOW_STEP).snapshot(grid, j);
        let next = prof.advanced(FLOW_STEP).snapshot(grid, j);
        let r = crate::transparency::homological_residual(
            &p, &prev, &snap, &next, FLOW_STEP, xi_grid, &cut,
        )
        .map_err(|e| WkbError::Params(e.to_string()))?;
        residuals.push(r);
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    Ok(HomologicalReport {
        eps_values: eps_list.to_vec(),
        fitted_order: fit_slope(&xs, &ys),
        residuals,
    })
}
