//! Periodic grids, semiclassical Sobolev norms, the quantization `op_eps`
//! and the paradifferential cutoff `psi`, with scaling-law experiments.
//!
//! Frequencies on a grid of period `2 pi l` are `n / l` for integer `n`.
//! The paradifferential smoothing of a symbol `a(x) b(eps xi)` keeps the
//! pair `(eta, k)` with weight `psi(eps eta, eps k)`, the rescaled form of
//! `op_eps = h_eps^{-1} op_1 h_eps`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resonance::smooth_step;
use crate::C64;

/// Largest grid accepted by the direct double-sum quantization.
pub const ORACLE_MAX_POINTS: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiclassicalError {
    #[error("grid dimension must be 1 or 3, got {0}")]
    Dimension(usize),
    #[error("points per axis must be a power of two, got {0}")]
    PointCount(usize),
    #[error("period factor must be positive, got {0}")]
    Period(f64),
    #[error("oracle quantization limited to {max} points, grid has {points}")]
    OracleTooLarge { points: usize, max: usize },
    #[error("field length {got} does not match grid size {expected}")]
    Length { got: usize, expected: usize },
    #[error("direct paradifferential sums are only available in one dimension")]
    ParaDimension,
}

/// Periodic grid on `[0, 2 pi l)^d` with cached transform plans.
#[derive(Clone)]
pub struct PeriodicGrid {
    pub dim: usize,
    pub n: usize,
    pub period_factor: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("period_factor", &self.period_factor)
            .finish()
    }
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize, period_factor: f64) -> Result<Self, SemiclassicalError> {
        if dim != 1 && dim != 3 {
            return Err(SemiclassicalError::Dimension(dim));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(SemiclassicalError::PointCount(n));
        }
        if !(period_factor > 0.0 && period_factor.is_finite()) {
            return Err(SemiclassicalError::Period(period_factor));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            dim,
            n,
            period_factor,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn length(&self) -> f64 {
        2.0 * PI * self.period_factor
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Signed integer index of FFT bin `i`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber of FFT bin `i` along one axis.
    pub fn axis_wavenumber(&self, i: usize) -> f64 {
        self.signed_index(i) as f64 / self.period_factor
    }

    /// Split flat index into axis indices (row-major, last axis fastest).
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        match self.dim {
            1 => [0, 0, idx],
            _ => [
                idx / (self.n * self.n),
                (idx / self.n) % self.n,
                idx % self.n,
            ],
        }
    }

    /// Wave vector of flat bin `idx`. One-dimensional grids lie along the third axis.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let a = self.unflatten(idx);
        match self.dim {
            1 => [0.0, 0.0, self.axis_wavenumber(a[2])],
            _ => [
                self.axis_wavenumber(a[0]),
                self.axis_wavenumber(a[1]),
                self.axis_wavenumber(a[2]),
            ],
        }
    }

    pub fn wavenumber_norm(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let a = self.unflatten(idx);
        let h = self.spacing();
        match self.dim {
            1 => [0.0, 0.0, a[2] as f64 * h],
            _ => [a[0] as f64 * h, a[1] as f64 * h, a[2] as f64 * h],
        }
    }

    fn check(&self, v: &[C64]) -> Result<(), SemiclassicalError> {
        if v.len() != self.len() {
            return Err(SemiclassicalError::Length {
                got: v.len(),
                expected: self.len(),
            });
        }
        Ok(())
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        if self.dim == 1 {
            plan.process(data);
            return;
        }
        // rows along the last axis
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut line = vec![C64::new(0.0, 0.0); n];
        // middle axis
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    line[b] = data[a * n * n + b * n + c];
                }
                plan.process(&mut line);
                for b in 0..n {
                    data[a * n * n + b * n + c] = line[b];
                }
            }
        }
        // first axis
        for b in 0..n {
            for c in 0..n {
                for a in 0..n {
                    line[a] = data[a * n * n + b * n + c];
                }
                plan.process(&mut line);
                for a in 0..n {
                    data[a * n * n + b * n + c] = line[a];
                }
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, values: &[C64]) -> Vec<C64> {
        let mut out = values.to_vec();
        self.transform(&mut out, &self.forward);
        out
    }

    /// Inverse transform, normalized by the number of points.
    pub fn inverse(&self, spectrum: &[C64]) -> Vec<C64> {
        let mut out = spectrum.to_vec();
        self.transform(&mut out, &self.inverse);
        let s = 1.0 / self.len() as f64;
        out.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<C64> {
        let c: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.forward(&c)
    }

    pub fn inverse_real(&self, spectrum: &[C64]) -> Vec<f64> {
        self.inverse(spectrum).iter().map(|z| z.re).collect()
    }

    /// Spectral derivative along axis `axis` (0, 1, 2). On a 1D grid only axis 2 is nonzero.
    pub fn derivative_spectrum(&self, spectrum: &[C64], axis: usize) -> Vec<C64> {
        spectrum
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let k = self.wavevector(i)[axis];
                if self.n % 2 == 0 && self.is_nyquist(i, axis) {
                    C64::new(0.0, 0.0)
                } else {
                    z * C64::new(0.0, k)
                }
            })
            .collect()
    }

    fn is_nyquist(&self, idx: usize, axis: usize) -> bool {
        let a = self.unflatten(idx);
        match self.dim {
            1 => axis == 2 && a[2] == self.n / 2,
            _ => a[axis] == self.n / 2,
        }
    }

    pub fn derivative(&self, values: &[C64], axis: usize) -> Vec<C64> {
        self.inverse(&self.derivative_spectrum(&self.forward(values), axis))
    }

    /// Weighted spectral norm `(L^d / N^{2d} sum (1 + eps^2 |k|^2)^s |v_k|^2)^{1/2}`.
    pub fn spectrum_norm(&self, spectrum: &[C64], eps: f64, s: f64) -> f64 {
        let n2 = (self.len() as f64).powi(2);
        let vol = self.length().powi(self.dim as i32);
        let sum: f64 = spectrum
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let k = self.wavenumber_norm(i);
                (1.0 + eps * eps * k * k).powf(s) * z.norm_sqr()
            })
            .sum();
        (vol / n2 * sum).sqrt()
    }

    /// Plain L² norm of grid samples.
    pub fn l2_norm(&self, values: &[C64]) -> f64 {
        let vol = self.length().powi(self.dim as i32);
        (vol / self.len() as f64 * values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// Grid-sampled complex vector field with the `eps` its norms are weighted by.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemiclassicalField {
    pub components: Vec<Vec<C64>>,
    pub eps: f64,
}

impl SemiclassicalField {
    pub fn scalar(values: Vec<C64>, eps: f64) -> Self {
        Self {
            components: vec![values],
            eps,
        }
    }
}

/// `||v||_{eps,s}` summed over components.
pub fn hs_eps_norm(grid: &PeriodicGrid, v: &SemiclassicalField, s: f64) -> f64 {
    v.components
        .iter()
        .map(|c| grid.spectrum_norm(&grid.forward(c), v.eps, s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Fourier multiplier `op_eps(b)` with `b` evaluated at `eps k`.
pub fn quantize_multiplier(
    grid: &PeriodicGrid,
    eps: f64,
    b: impl Fn([f64; 3]) -> C64,
    u: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    grid.check(u)?;
    let mut spec = grid.forward(u);
    for (i, z) in spec.iter_mut().enumerate() {
        let k = grid.wavevector(i);
        *z *= b([eps * k[0], eps * k[1], eps * k[2]]);
    }
    Ok(grid.inverse(&spec))
}

/// Product-form symbol `a(x) b(eps xi)`: pointwise multiply after the multiplier.
pub fn quantize_product(
    grid: &PeriodicGrid,
    eps: f64,
    a: &[C64],
    b: impl Fn([f64; 3]) -> C64,
    u: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    grid.check(a)?;
    let w = quantize_multiplier(grid, eps, b, u)?;
    Ok(w.iter().zip(a).map(|(x, y)| x * y).collect())
}

/// Direct double sum `(op q u)(x_j) = N^{-d} sum_k q(j, eps k) u_k e^{i k x_j}`.
pub fn quantize_oracle(
    grid: &PeriodicGrid,
    eps: f64,
    q: impl Fn(usize, [f64; 3]) -> C64,
    u: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    let len = grid.len();
    if len > ORACLE_MAX_POINTS {
        return Err(SemiclassicalError::OracleTooLarge {
            points: len,
            max: ORACLE_MAX_POINTS,
        });
    }
    grid.check(u)?;
    let spec = grid.forward(u);
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (j, o) in out.iter_mut().enumerate() {
        let x = grid.point(j);
        let mut acc = C64::new(0.0, 0.0);
        for (i, z) in spec.iter().enumerate() {
            let k = grid.wavevector(i);
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            acc += q(j, [eps * k[0], eps * k[1], eps * k[2]]) * z * C64::from_polar(1.0, phase);
        }
        *o = acc / len as f64;
    }
    Ok(out)
}

/// Dyadic cutoff family with plateaus at 1.1 and 1.9.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParaCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Default for ParaCutoff {
    fn default() -> Self {
        Self {
            inner: 1.1,
            outer: 1.9,
        }
    }
}

impl ParaCutoff {
    /// Radial profile: 1 below `inner`, 0 above `outer`.
    pub fn chi(&self, r: f64) -> f64 {
        1.0 - smooth_step(r, self.inner, self.outer)
    }

    pub fn chi0(&self, r: f64) -> f64 {
        self.chi(r)
    }

    /// Dyadic piece `phi_k(xi)` as a function of `<xi>`.
    pub fn phi(&self, k: u32, bracket: f64) -> f64 {
        if k == 0 {
            self.chi0(bracket)
        } else {
            self.chi0(bracket / 2f64.powi(k as i32)) - self.chi0(bracket / 2f64.powi(k as i32 - 1))
        }
    }

    /// `psi(eta, xi) = sum_k chi(2^{3-k} |eta|) phi_k(xi)`.
    pub fn psi(&self, eta: f64, xi: f64) -> f64 {
        let bracket = (1.0 + xi * xi).sqrt();
        let eta = eta.abs();
        // phi_k vanishes unless 2^{k-1} * inner < <xi> < 2^k * outer
        let top = (bracket / self.inner).log2().floor().max(0.0) as u32 + 1;
        let bottom = (bracket / self.outer).log2().floor().max(0.0) as u32;
        let mut out = 0.0;
        for k in bottom.saturating_sub(1)..=top + 1 {
            let ph = self.phi(k, bracket);
            if ph != 0.0 {
                out += self.chi(2f64.powi(3 - k as i32) * eta) * ph;
            }
        }
        out
    }

    /// `psi` with its plateau and support regions answered without the dyadic sum.
    pub fn psi_fast(&self, eta: f64, xi: f64) -> f64 {
        let bracket = (1.0 + xi * xi).sqrt();
        let eta = eta.abs();
        if eta <= bracket / 32.0 {
            1.0
        } else if eta >= bracket / 2.0 {
            0.0
        } else {
            self.psi(eta, xi)
        }
    }
}

/// Relative level below which spectral coefficients of `a` count as roundoff.
const SPARSE_LEVEL: f64 = 1e-13;

/// Product symbol `a(x) b(eps xi)` described by the spectrum of `a`.
pub struct ProductSymbol<'a, B: Fn(f64) -> C64 + Sync> {
    pub a_spec: &'a [C64],
    pub b: B,
}

impl<B: Fn(f64) -> C64 + Sync> ProductSymbol<'_, B> {
    /// Bins of `a` above roundoff.
    fn support(&self) -> Vec<usize> {
        let top = self.a_spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (0..self.a_spec.len())
            .filter(|&i| self.a_spec[i].norm() > SPARSE_LEVEL * top)
            .collect()
    }
}

/// Paradifferential quantization `op^psi_eps(a b) u` on a one-dimensional grid, returned in spectrum.
pub fn para_smooth_spectrum<B: Fn(f64) -> C64 + Sync>(
    grid: &PeriodicGrid,
    eps: f64,
    cut: &ParaCutoff,
    sym: &ProductSymbol<'_, B>,
    u_spec: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    if grid.dim != 1 {
        return Err(SemiclassicalError::ParaDimension);
    }
    grid.check(u_spec)?;
    let n = grid.n;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for eta in sym.support() {
        let a = sym.a_spec[eta] / n as f64;
        let eta_scaled = eps * grid.axis_wavenumber(eta);
        for (k, z) in u_spec.iter().enumerate() {
            let xi = eps * grid.axis_wavenumber(k);
            out[(k + eta) % n] += a * (sym.b)(xi) * cut.psi(eta_scaled, xi) * z;
        }
    }
    Ok(out)
}

/// Paradifferential quantization on grid samples.
pub fn para_smooth(
    grid: &PeriodicGrid,
    eps: f64,
    cut: &ParaCutoff,
    a: &[C64],
    b: impl Fn(f64) -> C64 + Sync,
    u: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    grid.check(a)?;
    grid.check(u)?;
    let a_spec = grid.forward(a);
    let sym = ProductSymbol { a_spec: &a_spec, b };
    let out = para_smooth_spectrum(grid, eps, cut, &sym, &grid.forward(u))?;
    Ok(grid.inverse(&out))
}

/// Adjoint of `op^psi(a b)` applied to `u`, in spectrum.
pub fn para_adjoint_spectrum<B: Fn(f64) -> C64 + Sync>(
    grid: &PeriodicGrid,
    eps: f64,
    cut: &ParaCutoff,
    sym: &ProductSymbol<'_, B>,
    u_spec: &[C64],
) -> Result<Vec<C64>, SemiclassicalError> {
    if grid.dim != 1 {
        return Err(SemiclassicalError::ParaDimension);
    }
    grid.check(u_spec)?;
    let n = grid.n;
    let mut out = vec![C64::new(0.0, 0.0); n];
    for eta in sym.support() {
        let a = sym.a_spec[eta].conj() / n as f64;
        let eta_scaled = eps * grid.axis_wavenumber(eta);
        for (m, o) in out.iter_mut().enumerate() {
            let xi = eps * grid.axis_wavenumber(m);
            *o += a * (sym.b)(xi).conj() * cut.psi(eta_scaled, xi) * u_spec[(m + eta) % n];
        }
    }
    Ok(out)
}

/// One row of a scaling experiment.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalingSample {
    pub eps: f64,
    pub s: f64,
    pub measured: f64,
}

/// Result of a scaling experiment.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalingReport {
    pub label: String,
    pub samples: Vec<ScalingSample>,
    pub fitted_slope: f64,
    pub local_slopes: Vec<f64>,
}

impl ScalingReport {
    fn new(label: &str, samples: Vec<ScalingSample>) -> Self {
        let xs: Vec<f64> = samples.iter().map(|r| r.eps.ln()).collect();
        let ys: Vec<f64> = samples.iter().map(|r| r.measured.ln()).collect();
        let local_slopes = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        Self {
            label: label.to_string(),
            fitted_slope: fit_slope(&xs, &ys),
            local_slopes,
            samples,
        }
    }

    /// CSV lines `eps,s,measured_norm,fitted_slope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,s,measured_norm,fitted_slope\n");
        for r in &self.samples {
            out.push_str(&format!(
                "{:e},{},{:e},{:.6}\n",
                r.eps, r.s, r.measured, self.fitted_slope
            ));
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Default semiclassical parameters `eps = 2^-2 .. 2^-6`.
pub fn default_eps_list() -> Vec<f64> {
    (2..=6).map(|m| 2f64.powi(-m)).collect()
}

/// Periodic Gaussian of width `w` centred at the origin.
fn periodic_gaussian(grid: &PeriodicGrid, w: f64) -> Vec<C64> {
    let l = grid.length();
    (0..grid.len())
        .map(|j| {
            let x = grid.point(j)[2];
            let d = x.min(l - x);
            C64::new((-d * d / (2.0 * w * w)).exp(), 0.0)
        })
        .collect()
}

/// Remainder `||(op - op^psi)(v) u||_{eps,s} / (||v||_{eps,s} ||u||_{eps,d0})`.
///
/// `v` has spectrum `<eta>^{-(s+1)}`, a profile one half derivative above `H^s`
/// whose roughest point is the origin; `u` is a Gaussian of width `eps` sitting there.
pub fn remainder_ratio(grid: &PeriodicGrid, eps: f64, s: f64) -> Result<f64, SemiclassicalError> {
    if grid.dim != 1 {
        return Err(SemiclassicalError::ParaDimension);
    }
    let n = grid.n;
    let d0 = 1.0;
    let cut = ParaCutoff::default();
    let v_spec: Vec<C64> = (0..n)
        .map(|i| {
            let k = grid.axis_wavenumber(i);
            C64::new(n as f64 * (1.0 + k.abs()).powf(-(s + 1.0)), 0.0)
        })
        .collect();
    let u_spec = grid.forward(&periodic_gaussian(grid, eps));
    let umax = u_spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // bins where u carries weight
    let active: Vec<usize> = (0..n)
        .filter(|&k| u_spec[k].norm() > 1e-17 * umax)
        .collect();
    use rayon::prelude::*;
    let rem: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|m| {
            let mut acc = C64::new(0.0, 0.0);
            for &k in &active {
                let eta_bin = (m + n - k) % n;
                let w = 1.0
                    - cut.psi_fast(
                        eps * grid.axis_wavenumber(eta_bin),
                        eps * grid.axis_wavenumber(k),
                    );
                if w != 0.0 {
                    acc += v_spec[eta_bin] * u_spec[k] * w;
                }
            }
            acc / n as f64
        })
        .collect();
    Ok(grid.spectrum_norm(&rem, eps, s)
        / (grid.spectrum_norm(&v_spec, eps, s) * grid.spectrum_norm(&u_spec, eps, d0)))
}

pub fn remainder_study(
    grid: &PeriodicGrid,
    eps_list: &[f64],
    s: f64,
) -> Result<ScalingReport, SemiclassicalError> {
    let samples = eps_list
        .iter()
        .map(|&eps| {
            Ok(ScalingSample {
                eps,
                s,
                measured: remainder_ratio(grid, eps, s)?,
            })
        })
        .collect::<Result<Vec<_>, SemiclassicalError>>()?;
    Ok(ScalingReport::new("remainder", samples))
}

/// Smooth test fields for the composition and adjoint experiments.
struct CalculusFields {
    a1: Vec<C64>,
    a2: Vec<C64>,
    u: Vec<C64>,
}

fn calculus_fields(grid: &PeriodicGrid, eps: f64) -> CalculusFields {
    let l = grid.length();
    let xs: Vec<f64> = (0..grid.len()).map(|j| grid.point(j)[2]).collect();
    let t = |x: f64| 2.0 * PI * x / l;
    CalculusFields {
        a1: xs
            .iter()
            .map(|&x| C64::new(1.0 + 0.5 * t(x).cos(), 0.3 * (2.0 * t(x)).sin()))
            .collect(),
        a2: xs
            .iter()
            .map(|&x| {
                C64::new(
                    0.7 * t(x).sin() + 0.2 * (3.0 * t(x)).cos(),
                    0.4 * t(x).cos(),
                )
            })
            .collect(),
        // oscillation at frequency ~ 1/eps under a smooth envelope
        u: xs
            .iter()
            .map(|&x| C64::from_polar(t(x).sin().exp(), x / eps))
            .collect(),
    }
}

fn b1(xi: f64) -> C64 {
    C64::new(xi / (1.0 + xi * xi).sqrt(), 0.0)
}

fn b2(xi: f64) -> C64 {
    C64::new(1.0 / (1.0 + xi * xi).sqrt(), 0.5 * xi / (1.0 + xi * xi))
}

/// `||op^psi(p1) op^psi(p2) u - op^psi(p1 p2) u||_{eps,0} / ||u||_{eps,0}`.
pub fn composition_defect(grid: &PeriodicGrid, eps: f64) -> Result<f64, SemiclassicalError> {
    let cut = ParaCutoff::default();
    let f = calculus_fields(grid, eps);
    let u_spec = grid.forward(&f.u);
    let s1 = grid.forward(&f.a1);
    let s2 = grid.forward(&f.a2);
    let a12: Vec<C64> = f.a1.iter().zip(&f.a2).map(|(x, y)| x * y).collect();
    let s12 = grid.forward(&a12);
    let p1 = ProductSymbol { a_spec: &s1, b: b1 };
    let p2 = ProductSymbol { a_spec: &s2, b: b2 };
    let p12 = ProductSymbol {
        a_spec: &s12,
        b: |x: f64| b1(x) * b2(x),
    };
    let lhs = para_smooth_spectrum(
        grid,
        eps,
        &cut,
        &p1,
        &para_smooth_spectrum(grid, eps, &cut, &p2, &u_spec)?,
    )?;
    let rhs = para_smooth_spectrum(grid, eps, &cut, &p12, &u_spec)?;
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(grid.spectrum_norm(&diff, eps, 0.0) / grid.spectrum_norm(&u_spec, eps, 0.0))
}

/// `||op^psi(p)^* u - op^psi(p^*) u||_{eps,0} / ||u||_{eps,0}`.
pub fn adjoint_defect(grid: &PeriodicGrid, eps: f64) -> Result<f64, SemiclassicalError> {
    let cut = ParaCutoff::default();
    let f = calculus_fields(grid, eps);
    let u_spec = grid.forward(&f.u);
    let s1 = grid.forward(&f.a1);
    let conj_a: Vec<C64> = f.a1.iter().map(|z| z.conj()).collect();
    let sc = grid.forward(&conj_a);
    let p = ProductSymbol { a_spec: &s1, b: b2 };
    let pstar = ProductSymbol {
        a_spec: &sc,
        b: |x: f64| b2(x).conj(),
    };
    let lhs = para_adjoint_spectrum(grid, eps, &cut, &p, &u_spec)?;
    let rhs = para_smooth_spectrum(grid, eps, &cut, &pstar, &u_spec)?;
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(grid.spectrum_norm(&diff, eps, 0.0) / grid.spectrum_norm(&u_spec, eps, 0.0))
}

pub fn composition_study(
    grid: &PeriodicGrid,
    eps_list: &[f64],
) -> Result<ScalingReport, SemiclassicalError> {
    let samples = eps_list
        .iter()
        .map(|&eps| {
            Ok(ScalingSample {
                eps,
                s: 0.0,
                measured: composition_defect(grid, eps)?,
            })
        })
        .collect::<Result<Vec<_>, SemiclassicalError>>()?;
    Ok(ScalingReport::new("composition", samples))
}

pub fn adjoint_study(
    grid: &PeriodicGrid,
    eps_list: &[f64],
) -> Result<ScalingReport, SemiclassicalError> {
    let samples = eps_list
        .iter()
        .map(|&eps| {
            Ok(ScalingSample {
                eps,
                s: 0.0,
                measured: adjoint_defect(grid, eps)?,
            })
        })
        .collect::<Result<Vec<_>, SemiclassicalError>>()?;
    Ok(ScalingReport::new("adjoint", samples))
}

/// Spectrum of an oscillatory profile `phi(x) e^{i x / eps}` with a Gaussian envelope.
pub fn oscillatory_profile(grid: &PeriodicGrid, eps: f64) -> Vec<C64> {
    let l = grid.length();
    (0..grid.len())
        .map(|j| {
            let x = grid.point(j)[2];
            let d = x - l / 2.0;
            C64::from_polar((-d * d).exp(), x / eps)
        })
        .collect()
}
