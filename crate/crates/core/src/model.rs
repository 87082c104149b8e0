//! Parameters, the 14-component state and the Euler-Maxwell symbol.
//!
//! The unknown is `u = (B, E, v_e, n_e, v_i, w)` with `w = alpha * n_i`.
//! The linear part of the system is written as `d_t u = -eps^-2 i M(eps, u, eps D) u`
//! with `M = A0 + eps A1(u)` hermitian; `A0` holds the curl and coupling blocks and
//! `A1` the electronic and ionic convection.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

pub type Mat14 = SMatrix<C64, 14, 14>;
pub type CVec14 = SVector<C64, 14>;

pub const DIM: usize = 14;
pub const IB: usize = 0;
pub const IE: usize = 3;
pub const IVE: usize = 6;
pub const INE: usize = 9;
pub const IVI: usize = 10;
pub const IW: usize = 13;

const SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("density {0} is outside the domain 1 + n > 0")]
    Domain(f64),
}

/// Physical and asymptotic parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlasmaParams {
    pub eps: f64,
    pub theta_e: f64,
    pub alpha: f64,
    pub omega: f64,
    pub harmonics: [i32; 2],
}

impl Default for PlasmaParams {
    fn default() -> Self {
        Self {
            eps: 0.05,
            theta_e: 0.1,
            alpha: 0.1,
            omega: 1.0,
            harmonics: [-1, 1],
        }
    }
}

impl PlasmaParams {
    pub fn new(eps: f64, theta_e: f64, alpha: f64) -> Result<Self, ModelError> {
        let p = Self {
            eps,
            theta_e,
            alpha,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters at `eps = 0`, used only to evaluate limit symbols.
    pub fn limit(theta_e: f64, alpha: f64) -> Result<Self, ModelError> {
        let p = Self {
            eps: 0.0,
            theta_e,
            alpha,
            ..Self::default()
        };
        p.validate_shape()?;
        Ok(p)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self, ModelError> {
        Self::new(eps, self.theta_e, self.alpha)
    }

    pub fn with_theta(&self, theta_e: f64) -> Result<Self, ModelError> {
        let p = Self { theta_e, ..*self };
        if p.eps == 0.0 {
            p.validate_shape()?;
        } else {
            p.validate()?;
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "eps",
                value: self.eps,
                reason: "must lie in (0, 1)",
            });
        }
        self.validate_shape()
    }

    fn validate_shape(&self) -> Result<(), ModelError> {
        if !(self.theta_e > 0.0) || !self.theta_e.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "theta_e",
                value: self.theta_e,
                reason: "must be positive",
            });
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must be nonnegative",
            });
        }
        if self.omega != 1.0 {
            return Err(ModelError::InvalidParameter {
                name: "omega",
                value: self.omega,
                reason: "the fundamental frequency is fixed to 1",
            });
        }
        if self.harmonics != [-1, 1] {
            return Err(ModelError::InvalidParameter {
                name: "harmonics",
                value: f64::NAN,
                reason: "the characteristic harmonics are fixed to {-1, 1}",
            });
        }
        Ok(())
    }
}

/// Real state `(B, E, v_e, n_e, v_i, n_i / alpha)`; the last slot stores `w = alpha n_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub [f64; DIM]);

impl StateVector {
    pub fn zeros() -> Self {
        Self([0.0; DIM])
    }

    pub fn from_parts(
        b: [f64; 3],
        e: [f64; 3],
        ve: [f64; 3],
        ne: f64,
        vi: [f64; 3],
        w: f64,
    ) -> Self {
        let mut s = [0.0; DIM];
        s[IB..IB + 3].copy_from_slice(&b);
        s[IE..IE + 3].copy_from_slice(&e);
        s[IVE..IVE + 3].copy_from_slice(&ve);
        s[INE] = ne;
        s[IVI..IVI + 3].copy_from_slice(&vi);
        s[IW] = w;
        Self(s)
    }

    fn v3(&self, at: usize) -> Vector3<f64> {
        Vector3::new(self.0[at], self.0[at + 1], self.0[at + 2])
    }

    pub fn b(&self) -> Vector3<f64> {
        self.v3(IB)
    }
    pub fn e(&self) -> Vector3<f64> {
        self.v3(IE)
    }
    pub fn ve(&self) -> Vector3<f64> {
        self.v3(IVE)
    }
    pub fn ne(&self) -> f64 {
        self.0[INE]
    }
    pub fn vi(&self) -> Vector3<f64> {
        self.v3(IVI)
    }
    pub fn w(&self) -> f64 {
        self.0[IW]
    }

    /// Ion log-density fluctuation `n_i = w / alpha` (zero when `alpha = 0`).
    pub fn ni(&self, alpha: f64) -> f64 {
        if alpha == 0.0 {
            0.0
        } else {
            self.0[IW] / alpha
        }
    }

    pub fn to_complex(&self) -> CVec14 {
        CVec14::from_fn(|i, _| C64::new(self.0[i], 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut s = self.0;
        s.iter_mut().for_each(|x| *x *= a);
        Self(s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.0;
        s.iter_mut().zip(other.0.iter()).for_each(|(x, y)| *x += y);
        Self(s)
    }
}

/// Hermitian symbol `M(eps, u, xi)` together with the point it was built at.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub entries: Mat14,
    pub eps: f64,
    pub u: StateVector,
    pub xi: Vector3<f64>,
}

impl SymbolMatrix {
    /// Largest entrywise deviation from hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.entries)
    }
}

pub fn hermitian_defect(m: &Mat14) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// The scalars through which the spectrum depends on the state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvectionScalars {
    pub x: f64,
    pub y: f64,
}

impl ConvectionScalars {
    pub fn from_state(p: &PlasmaParams, u: &StateVector, xi: &Vector3<f64>) -> Self {
        Self {
            x: p.eps * p.theta_e * u.ve().dot(xi),
            y: p.eps * p.eps * u.vi().dot(xi),
        }
    }
}

pub fn cross_matrix(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn put3(m: &mut Mat14, r: usize, c: usize, block: &Matrix3<C64>) {
    for i in 0..3 {
        for j in 0..3 {
            m[(r + i, c + j)] = block[(i, j)];
        }
    }
}

/// Constant-state part `A0(eps, xi)` of the hermitian symbol.
pub fn symbol_rest(p: &PlasmaParams, xi: &Vector3<f64>) -> Mat14 {
    let mut m = Mat14::zeros();
    let i = C64::new(0.0, 1.0);
    let cx = cross_matrix(xi).map(|v| C64::new(v, 0.0));
    put3(&mut m, IB, IE, &cx);
    put3(&mut m, IE, IB, &(-cx));
    let c_ion = p.eps / p.theta_e;
    for d in 0..3 {
        m[(IE + d, IVE + d)] = i;
        m[(IVE + d, IE + d)] = -i;
        m[(IE + d, IVI + d)] = -i * c_ion;
        m[(IVI + d, IE + d)] = i * c_ion;
        m[(IVE + d, INE)] = C64::new(p.theta_e * xi[d], 0.0);
        m[(INE, IVE + d)] = C64::new(p.theta_e * xi[d], 0.0);
        m[(IVI + d, IW)] = C64::new(p.eps * p.alpha * xi[d], 0.0);
        m[(IW, IVI + d)] = C64::new(p.eps * p.alpha * xi[d], 0.0);
    }
    m
}

/// Convection block `A1(w, xi)`; complex `w` gives the complex-linear extension.
pub fn convection_block(p: &PlasmaParams, w: &CVec14, xi: &Vector3<f64>) -> Mat14 {
    let mut m = Mat14::zeros();
    let mut ve_xi = C64::new(0.0, 0.0);
    let mut vi_xi = C64::new(0.0, 0.0);
    for d in 0..3 {
        ve_xi += w[IVE + d] * xi[d];
        vi_xi += w[IVI + d] * xi[d];
    }
    for k in IVE..=INE {
        m[(k, k)] = ve_xi * p.theta_e;
    }
    for k in IVI..=IW {
        m[(k, k)] = vi_xi * p.eps;
    }
    m
}

pub fn assemble_symbol(p: &PlasmaParams, u: &StateVector, xi: &Vector3<f64>) -> SymbolMatrix {
    let entries =
        symbol_rest(p, xi) + convection_block(p, &u.to_complex(), xi) * C64::new(p.eps, 0.0);
    SymbolMatrix {
        entries,
        eps: p.eps,
        u: *u,
        xi: *xi,
    }
}

/// Quadratic source `B(u, v) = (0, n_e v'_e, -theta_e v'_e x B, 0, 0, 0)`.
pub fn bilinear_b(theta_e: f64, u: &StateVector, v: &StateVector) -> StateVector {
    let ve = v.ve();
    let e_row = ve * u.ne();
    let v_row = -ve.cross(&u.b()) * theta_e;
    StateVector::from_parts(
        [0.0; 3],
        [e_row.x, e_row.y, e_row.z],
        [v_row.x, v_row.y, v_row.z],
        0.0,
        [0.0; 3],
        0.0,
    )
}

/// Matrix of `v -> B(u, v)`.
pub fn bilinear_b_left(theta_e: f64, u: &CVec14) -> Mat14 {
    let mut m = Mat14::zeros();
    let ne = u[INE];
    for d in 0..3 {
        m[(IE + d, IVE + d)] = ne;
    }
    // -theta v x B = theta B x v
    let b = [u[IB], u[IB + 1], u[IB + 2]];
    let bx = complex_cross_matrix(&b);
    put3(&mut m, IVE, IVE, &(bx * C64::new(theta_e, 0.0)));
    m
}

/// Matrix of `v -> B(v, u)`.
pub fn bilinear_b_right(theta_e: f64, u: &CVec14) -> Mat14 {
    let mut m = Mat14::zeros();
    for d in 0..3 {
        m[(IE + d, INE)] = u[IVE + d];
    }
    // -theta V x b = -theta [V x] b
    let v = [u[IVE], u[IVE + 1], u[IVE + 2]];
    let vx = complex_cross_matrix(&v);
    put3(&mut m, IVE, IB, &(vx * C64::new(-theta_e, 0.0)));
    m
}

pub fn complex_cross_matrix(v: &[C64; 3]) -> Matrix3<C64> {
    let z = C64::new(0.0, 0.0);
    Matrix3::new(z, -v[2], v[1], v[2], z, -v[0], -v[1], v[0], z)
}

/// `f(x) = eps^-2 (exp(eps x) - 1 - eps x)`, with a series branch near `eps x = 0`.
pub fn f_eps(eps: f64, x: f64) -> f64 {
    let ex = eps * x;
    if ex.abs() < SERIES_SWITCH {
        x * x * (0.5 + ex / 6.0 + ex * ex / 24.0 + ex * ex * ex / 120.0)
    } else {
        (ex.exp_m1() - ex) / (eps * eps)
    }
}

/// Derivative of [`f_eps`]: `(exp(eps x) - 1) / eps`.
pub fn f_eps_prime(eps: f64, x: f64) -> f64 {
    let ex = eps * x;
    if ex.abs() < SERIES_SWITCH {
        x * (1.0 + ex / 2.0 + ex * ex / 6.0 + ex * ex * ex / 24.0)
    } else {
        ex.exp_m1() / eps
    }
}

/// Remainder `G(u)`: nonzero in the E-row and the ion-velocity row.
pub fn source_g(p: &PlasmaParams, u: &StateVector) -> StateVector {
    let eps = p.eps;
    let n = u.ne();
    let ni = u.ni(p.alpha);
    let ve = u.ve();
    let vi = u.vi();
    let ni_sharp = ni + eps * f_eps(eps, ni);
    let e_row = ve * f_eps(eps, n) - vi * (ni_sharp / p.theta_e);
    let u_row = vi.cross(&u.b()) * (eps / p.theta_e);
    StateVector::from_parts(
        [0.0; 3],
        [e_row.x, e_row.y, e_row.z],
        [0.0; 3],
        0.0,
        [u_row.x, u_row.y, u_row.z],
        0.0,
    )
}

/// `n = log(1 + n_sharp)`.
pub fn log_from_sharp(n_sharp: f64) -> Result<f64, ModelError> {
    if !(1.0 + n_sharp > 0.0) {
        return Err(ModelError::Domain(n_sharp));
    }
    Ok(n_sharp.ln_1p())
}

/// Inverse of [`log_from_sharp`].
pub fn sharp_from_log(n: f64) -> f64 {
    n.exp_m1()
}

/// Scaled change of variables `n = eps^-1 log(1 + eps n_sharp)`.
pub fn log_from_sharp_scaled(eps: f64, n_sharp: f64) -> Result<f64, ModelError> {
    if eps == 0.0 {
        return Ok(n_sharp);
    }
    Ok(log_from_sharp(eps * n_sharp)? / eps)
}

/// Inverse of [`log_from_sharp_scaled`].
pub fn sharp_from_log_scaled(eps: f64, n: f64) -> f64 {
    if eps == 0.0 {
        return n;
    }
    (eps * n).exp_m1() / eps
}
