//! Exponential integrator for the rescaled Euler-Maxwell system in log variables.
//!
//! `d_t u + eps^-2 op(A_0(eps k)) u = eps^-1 B(u, u) + G(u) - convection`.
//! The constant part is integrated exactly per grid frequency from the
//! eigen-decomposition of the 14x14 symbol; the rest is advanced by the
//! Lawson form of Heun's method.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    bilinear_b, log_from_sharp_scaled, sharp_from_log_scaled, source_g, symbol_rest, CVec14, Mat14,
    PlasmaParams, StateVector, DIM, IB, IE, INE, IVE, IVI, IW,
};
use crate::semiclassical::{fit_slope, PeriodicGrid};
use crate::spectral::{decompose_matrix, SpectralError};
use crate::wkb::{build_profile, fields_norm, WKBProfile, WkbError};
use crate::zakharov::{
    init_from_datum, step as zakharov_step, Datum, ZakharovConfig, ZakharovError,
};
use crate::C64;

/// Real fields, one vector per state component.
pub type Fields = Vec<Vec<f64>>;

/// Default step as a fraction of `eps^2`.
pub const DEFAULT_DT_FACTOR: f64 = 1.0 / 20.0;
/// Largest admissible step as a fraction of `eps^2`.
pub const MAX_DT_FACTOR: f64 = 1.0 / 10.0;

#[derive(Debug, Error)]
pub enum EmError {
    #[error("non-finite field at t = {t}")]
    BlowUp { t: f64 },
    #[error("spectral gap lost at grid frequency: {0}")]
    Gap(#[from] SpectralError),
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Wkb(#[from] WkbError),
    #[error(transparent)]
    Zakharov(#[from] ZakharovError),
}

pub fn zero_fields(len: usize) -> Fields {
    vec![vec![0.0; len]; DIM]
}

fn point(u: &Fields, j: usize) -> StateVector {
    let mut s = [0.0; DIM];
    for c in 0..DIM {
        s[c] = u[c][j];
    }
    StateVector(s)
}

fn real_derivative(grid: &PeriodicGrid, f: &[f64], axis: usize) -> Vec<f64> {
    if grid.dim == 1 && axis < 2 {
        return vec![0.0; f.len()];
    }
    grid.inverse_real(&grid.derivative_spectrum(&grid.forward_real(f), axis))
}

fn gradient(grid: &PeriodicGrid, f: &[f64]) -> [Vec<f64>; 3] {
    [
        real_derivative(grid, f, 0),
        real_derivative(grid, f, 1),
        real_derivative(grid, f, 2),
    ]
}

/// Symbol argument `eps k` of flat bin `idx`, Nyquist components dropped so the flow stays real.
fn symbol_point(grid: &PeriodicGrid, idx: usize, eps: f64) -> nalgebra::Vector3<f64> {
    let a = grid.unflatten(idx);
    let k = grid.wavevector(idx);
    let mut xi = nalgebra::Vector3::new(eps * k[0], eps * k[1], eps * k[2]);
    if grid.n % 2 == 0 {
        for d in 0..3 {
            let active = grid.dim == 3 || d == 2;
            if active && a[d] == grid.n / 2 {
                xi[d] = 0.0;
            }
        }
    }
    xi
}

/// `-eps^-2 op(i A_0)` applied spectrally.
pub fn linear_rhs(grid: &PeriodicGrid, p: &PlasmaParams, u: &Fields) -> Fields {
    let spec: Vec<Vec<C64>> = u.iter().map(|c| grid.forward_real(c)).collect();
    let mut out = vec![vec![C64::new(0.0, 0.0); grid.len()]; DIM];
    let scale = C64::new(0.0, -1.0 / (p.eps * p.eps));
    for idx in 0..grid.len() {
        let m = symbol_rest(p, &symbol_point(grid, idx, p.eps));
        let v = CVec14::from_fn(|c, _| spec[c][idx]);
        let w = m * v * scale;
        for c in 0..DIM {
            out[c][idx] = w[c];
        }
    }
    out.iter().map(|c| grid.inverse_real(c)).collect()
}

/// `eps^-1 B(u, u) + G(u)` minus the convection terms, pointwise with spectral gradients.
pub fn nonlinear_rhs(grid: &PeriodicGrid, p: &PlasmaParams, u: &Fields) -> Fields {
    let len = grid.len();
    let th = p.theta_e;
    let eps = p.eps;
    let gv: Vec<[Vec<f64>; 3]> = (0..3).map(|d| gradient(grid, &u[IVE + d])).collect();
    let gu: Vec<[Vec<f64>; 3]> = (0..3).map(|d| gradient(grid, &u[IVI + d])).collect();
    let gn = gradient(grid, &u[INE]);
    let gw = gradient(grid, &u[IW]);
    let rows: Vec<[f64; DIM]> = (0..len)
        .into_par_iter()
        .map(|j| {
            let s = point(u, j);
            let b = bilinear_b(th, &s, &s);
            let g = source_g(p, &s);
            let mut r = [0.0; DIM];
            for c in 0..DIM {
                r[c] = b.0[c] / eps + g.0[c];
            }
            let v = [u[IVE][j], u[IVE + 1][j], u[IVE + 2][j]];
            let ui = [u[IVI][j], u[IVI + 1][j], u[IVI + 2][j]];
            for c in 0..3 {
                let adv_v: f64 = (0..3).map(|a| v[a] * gv[c][a][j]).sum();
                let adv_u: f64 = (0..3).map(|a| ui[a] * gu[c][a][j]).sum();
                r[IVE + c] -= th * adv_v;
                r[IVI + c] -= eps * adv_u;
            }
            r[INE] -= th * (0..3).map(|a| v[a] * gn[a][j]).sum::<f64>();
            r[IW] -= eps * (0..3).map(|a| ui[a] * gw[a][j]).sum::<f64>();
            r
        })
        .collect();
    let mut out = zero_fields(len);
    for (j, r) in rows.iter().enumerate() {
        for c in 0..DIM {
            out[c][j] = r[c];
        }
    }
    out
}

pub fn full_rhs(grid: &PeriodicGrid, p: &PlasmaParams, u: &Fields) -> Fields {
    let mut l = linear_rhs(grid, p, u);
    let n = nonlinear_rhs(grid, p, u);
    for (a, b) in l.iter_mut().zip(&n) {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }
    l
}

/// Cached `exp(-i h eps^-2 A_0(eps k))` for every grid frequency.
#[derive(Clone, Debug)]
pub struct LinearPropagator {
    pub h: f64,
    mats: Vec<Mat14>,
}

impl LinearPropagator {
    pub fn new(grid: &PeriodicGrid, p: &PlasmaParams, h: f64) -> Result<Self, EmError> {
        let rate = h / (p.eps * p.eps);
        let mats = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let xi = symbol_point(grid, idx, p.eps);
                let m = symbol_rest(p, &xi);
                let dec = decompose_matrix(p, &m, &xi)?;
                let mut out = Mat14::zeros();
                for (lam, v) in dec.pairs.values.iter().zip(&dec.pairs.vectors) {
                    out += v * v.adjoint() * C64::from_polar(1.0, -lam * rate);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, SpectralError>>()?;
        Ok(Self { h, mats })
    }

    pub fn apply(&self, grid: &PeriodicGrid, u: &Fields) -> Fields {
        let spec: Vec<Vec<C64>> = u.iter().map(|c| grid.forward_real(c)).collect();
        let rows: Vec<CVec14> = self
            .mats
            .par_iter()
            .enumerate()
            .map(|(idx, m)| m * CVec14::from_fn(|c, _| spec[c][idx]))
            .collect();
        (0..DIM)
            .map(|c| {
                let s: Vec<C64> = rows.iter().map(|r| r[c]).collect();
                grid.inverse_real(&s)
            })
            .collect()
    }
}

/// Smooth perturbation `eps^k0 phi` added to the well-prepared datum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub k0: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct EMRunConfig {
    pub grid: PeriodicGrid,
    pub params: PlasmaParams,
    pub dt: f64,
    pub t_final: f64,
    /// Record every `record_every` steps (the initial state is always recorded).
    pub record_every: usize,
    pub nonlinear: bool,
}

impl EMRunConfig {
    /// Step `eps^2 / 20` adjusted to divide `t_final`.
    pub fn new(grid: PeriodicGrid, params: PlasmaParams, t_final: f64) -> Result<Self, EmError> {
        let dt = params.eps * params.eps * DEFAULT_DT_FACTOR;
        Self::with_dt(grid, params, t_final, dt)
    }

    pub fn with_dt(
        grid: PeriodicGrid,
        params: PlasmaParams,
        t_final: f64,
        dt: f64,
    ) -> Result<Self, EmError> {
        if !(t_final >= 0.0) || !(dt > 0.0) {
            return Err(EmError::Config(format!(
                "need T >= 0 and dt > 0, got T = {t_final}, dt = {dt}"
            )));
        }
        let steps = (t_final / dt).ceil().max(1.0);
        let dt = if t_final > 0.0 { t_final / steps } else { dt };
        if dt > params.eps * params.eps * MAX_DT_FACTOR * (1.0 + 1e-12) {
            return Err(EmError::Config(format!(
                "dt = {dt:e} exceeds eps^2/10 = {:e}",
                params.eps * params.eps * MAX_DT_FACTOR
            )));
        }
        Ok(Self {
            grid,
            params,
            dt,
            t_final,
            record_every: steps as usize,
            nonlinear: true,
        })
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Chooses `record_every` so that `outputs` equally spaced states follow the initial one.
    pub fn with_outputs(mut self, outputs: usize) -> Self {
        let steps = self.steps().max(1);
        let outputs = outputs.clamp(1, steps);
        let per = (steps / outputs).max(1);
        self.record_every = per;
        self
    }
}

/// States at the recorded output times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub eps: f64,
    pub times: Vec<f64>,
    pub states: Vec<Fields>,
}

fn axpy(y: &mut Fields, a: f64, x: &Fields) {
    for (yc, xc) in y.iter_mut().zip(x) {
        for (p, q) in yc.iter_mut().zip(xc) {
            *p += a * q;
        }
    }
}

fn is_finite(u: &Fields) -> bool {
    u.iter().all(|c| c.iter().all(|x| x.is_finite()))
}

/// One Lawson-Heun step: `u1 = phi(u + h N(u))`, `u+ = phi u + h/2 (phi N(u) + N(u1))`.
pub fn lawson_step(
    grid: &PeriodicGrid,
    p: &PlasmaParams,
    prop: &LinearPropagator,
    u: &Fields,
    nonlinear: bool,
) -> Fields {
    if !nonlinear {
        return prop.apply(grid, u);
    }
    let h = prop.h;
    let n0 = nonlinear_rhs(grid, p, u);
    let mut pred = u.clone();
    axpy(&mut pred, h, &n0);
    let u1 = prop.apply(grid, &pred);
    let n1 = nonlinear_rhs(grid, p, &u1);
    let mut half = u.clone();
    axpy(&mut half, 0.5 * h, &n0);
    let mut out = prop.apply(grid, &half);
    axpy(&mut out, 0.5 * h, &n1);
    out
}

pub fn integrate(cfg: &EMRunConfig, datum: &Fields) -> Result<Trajectory, EmError> {
    let len = cfg.grid.len();
    if datum.len() != DIM || datum.iter().any(|c| c.len() != len) {
        return Err(EmError::Config(
            "datum shape does not match the grid".into(),
        ));
    }
    if !is_finite(datum) {
        return Err(EmError::BlowUp { t: 0.0 });
    }
    let prop = LinearPropagator::new(&cfg.grid, &cfg.params, cfg.dt)?;
    let steps = cfg.steps();
    let mut u = datum.clone();
    let mut traj = Trajectory {
        eps: cfg.params.eps,
        times: vec![0.0],
        states: vec![u.clone()],
    };
    for k in 1..=steps {
        u = lawson_step(&cfg.grid, &cfg.params, &prop, &u, cfg.nonlinear);
        let t = k as f64 * cfg.dt;
        if !is_finite(&u) {
            return Err(EmError::BlowUp { t });
        }
        if k % cfg.record_every == 0 || k == steps {
            if traj.times.last() != Some(&t) {
                traj.times.push(t);
                traj.states.push(u.clone());
            }
        }
    }
    Ok(traj)
}

/// Divergence and Gauss-law residuals per output time.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstraintMonitor {
    pub times: Vec<f64>,
    pub div_b: Vec<f64>,
    pub gauss: Vec<f64>,
}

fn divergence(grid: &PeriodicGrid, u: &Fields, at: usize) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for d in 0..3 {
        for (o, x) in out.iter_mut().zip(real_derivative(grid, &u[at + d], d)) {
            *o += x;
        }
    }
    out
}

/// `div E + (eps theta)^-1 (n_e# - n_i#)` pointwise, the constraint conserved by the flow.
pub fn gauss_residual(grid: &PeriodicGrid, p: &PlasmaParams, u: &Fields) -> Vec<f64> {
    let div = divergence(grid, u, IE);
    let c = 1.0 / (p.eps * p.theta_e);
    (0..grid.len())
        .map(|j| {
            let ne = sharp_from_log_scaled(p.eps, u[INE][j]);
            let ni = sharp_from_log_scaled(p.eps, u[IW][j] / p.alpha);
            div[j] + c * (ne - ni)
        })
        .collect()
}

pub fn div_b(grid: &PeriodicGrid, u: &Fields) -> Vec<f64> {
    divergence(grid, u, IB)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn monitor_constraints(
    grid: &PeriodicGrid,
    p: &PlasmaParams,
    traj: &Trajectory,
) -> ConstraintMonitor {
    ConstraintMonitor {
        times: traj.times.clone(),
        div_b: traj.states.iter().map(|u| sup(&div_b(grid, u))).collect(),
        gauss: traj
            .states
            .iter()
            .map(|u| sup(&gauss_residual(grid, p, u)))
            .collect(),
    }
}

/// Resets the electron density so that the Gauss law holds exactly.
pub fn enforce_gauss(grid: &PeriodicGrid, p: &PlasmaParams, u: &mut Fields) -> Result<(), EmError> {
    let div = divergence(grid, u, IE);
    for j in 0..grid.len() {
        let ni = sharp_from_log_scaled(p.eps, u[IW][j] / p.alpha);
        let ne = ni - p.eps * p.theta_e * div[j];
        u[INE][j] = log_from_sharp_scaled(p.eps, ne).map_err(|e| EmError::Config(e.to_string()))?;
    }
    Ok(())
}

/// Well-prepared datum: the profile at `t = 0` with the Gauss law imposed, plus an optional perturbation.
pub fn well_prepared(
    grid: &PeriodicGrid,
    p: &PlasmaParams,
    profile: &WKBProfile,
    perturbation: Option<Perturbation>,
) -> Result<Fields, EmError> {
    let mut u = profile.evaluate(profile.t);
    if let Some(pt) = perturbation {
        let a = pt.amplitude * p.eps.powf(pt.k0);
        let l = grid.period_factor;
        for j in 0..grid.len() {
            let z = grid.point(j)[2] / l;
            // transverse components only, so div B = 0 is preserved
            u[IB + 1][j] += a * z.sin();
            u[IE][j] += a * (2.0 * z).cos();
            u[IVE + 1][j] += a * z.cos();
            u[IVI][j] += a * (z.sin() * z.cos());
        }
    }
    enforce_gauss(grid, p, &mut u)?;
    Ok(u)
}

/// Error time series of a trajectory against profiles at the same output times.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    /// `sup_x |E - (E_{0,1} e^{i omega t / eps^2} + c.c.)|`.
    pub sup_err_e: Vec<f64>,
    /// `sup_x |n_i - eps n|` with `n` the Zakharov density.
    pub sup_err_n: Vec<f64>,
    /// `||u - u_a||_{eps,s}`.
    pub hs_err: Vec<f64>,
}

impl ErrorSeries {
    pub fn max_e(&self) -> f64 {
        sup(&self.sup_err_e)
    }
    pub fn max_n(&self) -> f64 {
        sup(&self.sup_err_n)
    }
    pub fn max_hs(&self) -> f64 {
        sup(&self.hs_err)
    }
}

/// Compares each recorded state with the profile of matching time.
pub fn compare_to_wkb(
    grid: &PeriodicGrid,
    traj: &Trajectory,
    profiles: &[WKBProfile],
    s: f64,
) -> ErrorSeries {
    let mut out = ErrorSeries {
        times: Vec::new(),
        sup_err_e: Vec::new(),
        sup_err_n: Vec::new(),
        hs_err: Vec::new(),
    };
    for ((t, u), prof) in traj.times.iter().zip(&traj.states).zip(profiles) {
        let eps = prof.eps;
        let phase = C64::from_polar(1.0, prof.omega * t / (eps * eps));
        let ua = prof.evaluate(*t);
        let z = &prof.zakharov;
        let mut err_e: f64 = 0.0;
        let mut err_n: f64 = 0.0;
        for j in 0..grid.len() {
            let mut d2 = 0.0;
            for c in 0..3 {
                let lead = 2.0 * (z.e[c][j] * phase).re;
                d2 += (u[IE + c][j] - lead).powi(2);
            }
            err_e = err_e.max(d2.sqrt());
            let ni = u[IW][j] / prof.alpha;
            err_n = err_n.max((ni - eps * z.n[j]).abs());
        }
        let diff: Fields = u
            .iter()
            .zip(&ua)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        out.times.push(*t);
        out.sup_err_e.push(err_e);
        out.sup_err_n.push(err_n);
        out.hs_err.push(fields_norm(grid, &diff, eps, s));
    }
    out
}

/// Settings of an eps sweep against the Zakharov prediction.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergeConfig {
    pub eps_list: Vec<f64>,
    pub grid_n: usize,
    pub period_factor: f64,
    pub t_final: f64,
    pub order: u8,
    pub s: f64,
    pub theta_e: f64,
    pub alpha: f64,
    pub datum: String,
    /// EM step as a fraction of `eps^2`.
    pub dt_factor: f64,
    /// Zakharov reference step.
    pub zakharov_dt: f64,
    pub outputs: usize,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            eps_list: vec![0.2, 0.1, 0.05],
            grid_n: 64,
            period_factor: 1.0,
            t_final: 0.1,
            order: 2,
            s: 1.0,
            theta_e: PlasmaParams::default().theta_e,
            alpha: PlasmaParams::default().alpha,
            datum: "modulated".into(),
            dt_factor: 1.0 / 200.0,
            zakharov_dt: 1e-4,
            outputs: 10,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergeRow {
    pub eps: f64,
    pub sup_err_e: f64,
    pub sup_err_n: f64,
    pub hs_eps_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvergeReport {
    pub rows: Vec<ConvergeRow>,
    pub fitted_order_e: f64,
    pub fitted_order_n: f64,
    pub fitted_order_hs: f64,
    /// Order of `sup_err_E + sup_err_n`.
    pub fitted_order: f64,
}

impl ConvergeReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,sup_err_E,sup_err_n,hs_eps_err\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                r.eps, r.sup_err_e, r.sup_err_n, r.hs_eps_err
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "fitted_order_E": self.fitted_order_e,
            "fitted_order_n": self.fitted_order_n,
            "fitted_order": self.fitted_order,
        })
        .to_string()
    }
}

/// Runs one eps: Zakharov reference, profiles at output times, EM trajectory, errors.
pub fn converge_one(cfg: &ConvergeConfig, eps: f64) -> Result<ErrorSeries, EmError> {
    let grid = PeriodicGrid::new(1, cfg.grid_n, cfg.period_factor)
        .map_err(|e| EmError::Config(e.to_string()))?;
    let params = PlasmaParams::new(eps, cfg.theta_e, cfg.alpha)
        .map_err(|e| EmError::Config(e.to_string()))?;
    let datum = Datum::parse(&cfg.datum)
        .ok_or_else(|| EmError::Config(format!("unknown datum {}", cfg.datum)))?;
    let run = EMRunConfig::with_dt(grid.clone(), params, cfg.t_final, eps * eps * cfg.dt_factor)?
        .with_outputs(cfg.outputs);
    let out_times: Vec<f64> = {
        let steps = run.steps();
        let mut v: Vec<f64> = (0..=steps)
            .filter(|k| k % run.record_every == 0 || *k == steps)
            .map(|k| k as f64 * run.dt)
            .collect();
        v.dedup();
        v
    };

    // Zakharov reference sampled at the output times
    let zcfg = ZakharovConfig::new(grid.clone(), cfg.zakharov_dt, &params)?;
    let mut zs = init_from_datum(&grid, &datum.envelope(&grid))?;
    let mut profiles = Vec::with_capacity(out_times.len());
    for &t in &out_times {
        while zs.t < t - 1e-14 {
            let h = (t - zs.t).min(cfg.zakharov_dt);
            zs = zakharov_step(&zs, &zcfg.with_dt(h))?;
        }
        zs.t = t;
        profiles.push(build_profile(&zcfg, &zs, &params, cfg.order)?);
    }

    let u0 = well_prepared(&grid, &params, &profiles[0], None)?;
    let traj = integrate(&run, &u0)?;
    Ok(compare_to_wkb(&grid, &traj, &profiles, cfg.s))
}

pub fn converge(cfg: &ConvergeConfig) -> Result<ConvergeReport, EmError> {
    let series: Vec<(f64, ErrorSeries)> = cfg
        .eps_list
        .par_iter()
        .map(|&eps| converge_one(cfg, eps).map(|s| (eps, s)))
        .collect::<Result<_, _>>()?;
    let rows: Vec<ConvergeRow> = series
        .iter()
        .map(|(eps, s)| ConvergeRow {
            eps: *eps,
            sup_err_e: s.max_e(),
            sup_err_n: s.max_n(),
            hs_eps_err: s.max_hs(),
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let fit = |f: fn(&ConvergeRow) -> f64| {
        fit_slope(&xs, &rows.iter().map(|r| f(r).ln()).collect::<Vec<_>>())
    };
    Ok(ConvergeReport {
        fitted_order_e: fit(|r| r.sup_err_e),
        fitted_order_n: fit(|r| r.sup_err_n),
        fitted_order_hs: fit(|r| r.hs_eps_err),
        fitted_order: fit(|r| r.sup_err_e + r.sup_err_n),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(eps: f64) -> (PeriodicGrid, PlasmaParams) {
        (
            PeriodicGrid::new(1, 32, 1.0).unwrap(),
            PlasmaParams::new(eps, 0.35, 0.1).unwrap(),
        )
    }

    #[test]
    fn zero_datum_stays_zero() {
        let (g, p) = setup(0.1);
        let cfg = EMRunConfig::new(g.clone(), p, 0.01).unwrap();
        let tr = integrate(&cfg, &zero_fields(g.len())).unwrap();
        assert!(tr
            .states
            .iter()
            .all(|u| u.iter().all(|c| c.iter().all(|&x| x == 0.0))));
        let m = monitor_constraints(&g, &p, &tr);
        assert!(m.div_b.iter().chain(&m.gauss).all(|&x| x == 0.0));
    }

    #[test]
    fn step_bound_enforced() {
        let (g, p) = setup(0.1);
        assert!(EMRunConfig::with_dt(g, p, 0.1, 0.2 * p.eps * p.eps).is_err());
    }

    #[test]
    fn linear_rhs_is_propagator_generator() {
        let (g, p) = setup(0.2);
        let mut u = zero_fields(g.len());
        for j in 0..g.len() {
            let z = g.point(j)[2];
            u[IE][j] = z.cos();
            u[IVE + 1][j] = (2.0 * z).sin();
            u[IW][j] = 0.1 * z.sin();
        }
        let h = 1e-6;
        let prop = LinearPropagator::new(&g, &p, h).unwrap();
        let a = prop.apply(&g, &u);
        let b = linear_rhs(&g, &p, &u);
        let err = (0..DIM)
            .flat_map(|c| (0..g.len()).map(move |j| (c, j)))
            .map(|(c, j)| ((a[c][j] - u[c][j]) / h - b[c][j]).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-3 * (1.0 / (p.eps * p.eps)), "{err}");
    }
}
