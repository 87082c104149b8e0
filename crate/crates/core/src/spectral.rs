//! Eigenvalues, eigenvectors and total projectors of the Euler-Maxwell symbol.
//!
//! Eigenvalues `lambda` are those of the hermitian `M`, so `A = iM = sum i lambda Pi`.
//! Closed forms are available at rest (`u = 0`); for general `u` the spectrum is
//! computed numerically and the modes are split into Klein-Gordon modes (bounded
//! below) and zero/acoustic modes (size `O(eps |xi|)`).

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cluster, hermitian_eigen, outer, projector, EigenPairs};
use crate::model::{
    assemble_symbol, CVec14, ConvectionScalars, Mat14, PlasmaParams, StateVector, DIM, IB, IE, INE,
    IVE, IVI, IW,
};
use crate::C64;

/// Number of Klein-Gordon modes (transverse `lambda_pm` twice, longitudinal `mu_pm`).
pub const KG_COUNT: usize = 6;
/// Number of zero/acoustic modes, the kernel included.
pub const SLOW_COUNT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("no spectral gap at xi = {xi:?}: {kg_count} modes above the threshold {threshold} (expected 6); largest slow |lambda| = {max_slow}, smallest fast |lambda| = {min_fast}")]
    GapViolation {
        xi: [f64; 3],
        kg_count: usize,
        threshold: f64,
        max_slow: f64,
        min_fast: f64,
    },
    #[error("eigenvector basis undefined at xi = 0")]
    UndefinedDirection,
    #[error("closed-form eigenvectors need eps > 0 and alpha > 0")]
    DegenerateParameters,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeClass {
    KleinGordon,
    Acoustic,
    Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
    pub class: ModeClass,
}

/// Numeric spectral decomposition at one point `(eps, u, xi)`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Eigenvalue>,
    pub projectors: Vec<Mat14>,
    /// Klein-Gordon total projector.
    pub pi0: Mat14,
    /// Acoustic total projector, kernel excluded.
    pub pis: Mat14,
    /// Projector onto `span(e0)` (zero at `xi = 0`).
    pub kernel: Mat14,
    pub pairs: EigenPairs,
    /// Indices into `pairs` of the Klein-Gordon eigenvectors.
    pub kg_indices: Vec<usize>,
}

impl SpectralDecomposition {
    /// `sum i lambda_m Pi_m`, which reconstructs `A`.
    pub fn reconstruct(&self) -> Mat14 {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(Mat14::zeros(), |acc, (e, p)| {
                acc + p * C64::new(0.0, e.lambda)
            })
    }

    /// `Pi_s` in the sense of the total slow projector: acoustic plus kernel.
    pub fn slow_total(&self) -> Mat14 {
        self.pis + self.kernel
    }

    pub fn slow_indices(&self) -> Vec<usize> {
        (0..DIM).filter(|i| !self.kg_indices.contains(i)).collect()
    }
}

/// Pointwise gap threshold `tau(xi) = 1/2 sqrt(1 + theta_e^2 |xi|^2)`.
pub fn gap_threshold(p: &PlasmaParams, xi: &Vector3<f64>) -> f64 {
    0.5 * (1.0 + p.theta_e * p.theta_e * xi.norm_squared()).sqrt()
}

pub fn unit_direction(xi: &Vector3<f64>) -> Option<Vector3<f64>> {
    let n = xi.norm();
    (n > 0.0).then(|| xi / n)
}

pub fn e0_vector(xi: &Vector3<f64>) -> Option<CVec14> {
    unit_direction(xi).map(|h| {
        let mut v = CVec14::zeros();
        for d in 0..3 {
            v[IB + d] = C64::new(h[d], 0.0);
        }
        v
    })
}

pub fn eigendecompose(
    p: &PlasmaParams,
    u: &StateVector,
    xi: &Vector3<f64>,
) -> Result<SpectralDecomposition, SpectralError> {
    let m = assemble_symbol(p, u, xi).entries;
    decompose_matrix(p, &m, xi)
}

/// Decomposition of an already assembled hermitian symbol evaluated at `xi`.
pub fn decompose_matrix(
    p: &PlasmaParams,
    m: &Mat14,
    xi: &Vector3<f64>,
) -> Result<SpectralDecomposition, SpectralError> {
    let pairs = hermitian_eigen(m);
    let tau = gap_threshold(p, xi);
    let kg_indices: Vec<usize> = (0..DIM).filter(|&i| pairs.values[i].abs() > tau).collect();
    let max_slow = (0..DIM)
        .filter(|i| !kg_indices.contains(i))
        .map(|i| pairs.values[i].abs())
        .fold(0.0, f64::max);
    let min_fast = kg_indices
        .iter()
        .map(|&i| pairs.values[i].abs())
        .fold(f64::INFINITY, f64::min);
    if kg_indices.len() != KG_COUNT {
        return Err(SpectralError::GapViolation {
            xi: [xi.x, xi.y, xi.z],
            kg_count: kg_indices.len(),
            threshold: tau,
            max_slow,
            min_fast,
        });
    }

    let scale = 1.0 + pairs.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let groups = cluster(&pairs.values, 1e-10 * scale);
    let kernel = e0_vector(xi)
        .map(|e| outer(&e, &e))
        .unwrap_or_else(Mat14::zeros);
    let kernel_zero = e0_vector(xi).is_some();
    // slow eigenvectors near zero carry the solver error against the exact kernel
    let off_kernel = Mat14::identity() - kernel;
    let deflate = |x: Mat14| off_kernel * x * off_kernel;

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut pi0 = Mat14::zeros();
    let mut pis = Mat14::zeros();
    for g in groups {
        let lambda = g.iter().map(|&i| pairs.values[i]).sum::<f64>() / g.len() as f64;
        let proj = projector(&g.iter().map(|&i| &pairs.vectors[i]).collect::<Vec<_>>());
        if kg_indices.contains(&g[0]) {
            pi0 += proj;
            eigenvalues.push(Eigenvalue {
                lambda,
                multiplicity: g.len(),
                class: ModeClass::KleinGordon,
            });
            projectors.push(proj);
            continue;
        }
        // the kernel direction sits in the cluster at the origin
        let holds_kernel = kernel_zero && lambda.abs() <= 1e-10 * scale;
        if holds_kernel {
            eigenvalues.push(Eigenvalue {
                lambda: 0.0,
                multiplicity: 1,
                class: ModeClass::Kernel,
            });
            projectors.push(kernel);
            if g.len() > 1 {
                let rest = deflate(proj - kernel);
                pis += rest;
                eigenvalues.push(Eigenvalue {
                    lambda: 0.0,
                    multiplicity: g.len() - 1,
                    class: ModeClass::Acoustic,
                });
                projectors.push(rest);
            }
        } else {
            let proj = deflate(proj);
            pis += proj;
            eigenvalues.push(Eigenvalue {
                lambda,
                multiplicity: g.len(),
                class: ModeClass::Acoustic,
            });
            projectors.push(proj);
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        pi0,
        pis,
        kernel,
        pairs,
        kg_indices,
    })
}

/// `(Pi_0, Pi_s)` with `Pi_s` the slow total (acoustic plus kernel).
pub fn total_projectors(
    p: &PlasmaParams,
    u: &StateVector,
    xi: &Vector3<f64>,
) -> Result<(Mat14, Mat14), SpectralError> {
    let d = eigendecompose(p, u, xi)?;
    Ok((d.pi0, d.slow_total()))
}

/// Closed-form eigenvalues at rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestEigenvalues {
    /// Transverse Klein-Gordon `lambda_+ = sqrt(1 + |xi|^2 + eps^2/theta_e^2)`.
    pub lambda: f64,
    /// Longitudinal Klein-Gordon `mu_+`.
    pub mu: f64,
    /// Longitudinal acoustic `mu_s(e+)_+`.
    pub mu_s: f64,
}

pub fn rest_eigenvalues(p: &PlasmaParams, k: f64) -> RestEigenvalues {
    let c = (p.eps / p.theta_e).powi(2);
    let a = (p.eps * p.alpha * k).powi(2);
    let b = 1.0 + (p.theta_e * k).powi(2);
    let s = a + b + c;
    let prod = a * b + c * (p.theta_e * k).powi(2);
    let z_big = 0.5 * (s + (s * s - 4.0 * prod).max(0.0).sqrt());
    let z_s = prod / z_big;
    RestEigenvalues {
        lambda: (1.0 + k * k + c).sqrt(),
        mu: z_big.sqrt(),
        mu_s: z_s.max(0.0).sqrt(),
    }
}

/// Real polynomial in ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, w: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * w + c)
    }

    pub fn eval_c(&self, w: C64) -> C64 {
        self.0
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * w + c)
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    fn scale(&self, a: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * a).collect())
    }

    /// Real roots via the companion matrix, polished by Newton steps.
    pub fn real_roots(&self) -> Vec<f64> {
        let n = self.0.len() - 1;
        let lead = self.0[n];
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -self.0[i] / lead;
        }
        let d = self.derivative();
        let mut roots: Vec<f64> = comp
            .complex_eigenvalues()
            .iter()
            .map(|z| {
                let mut r = z.re;
                for _ in 0..8 {
                    let f = self.eval(r);
                    let fp = d.eval(r);
                    if fp == 0.0 {
                        break;
                    }
                    let cand = r - f / fp;
                    if self.eval(cand).abs() < f.abs() {
                        r = cand;
                    } else {
                        break;
                    }
                }
                r
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        roots
    }
}

fn lin(shift: f64) -> Poly {
    Poly(vec![-shift, 1.0])
}

/// Transverse quartic and longitudinal quintic in `omega`.
pub fn dispersion_factors(p: &PlasmaParams, c: &ConvectionScalars, k: f64) -> (Poly, Poly) {
    let cc = (p.eps / p.theta_e).powi(2);
    let (x, y) = (c.x, c.y);
    let wx = lin(x);
    let wy = lin(y);
    let quad = Poly(vec![-(1.0 + k * k + cc), 0.0, 1.0]);
    let pt = wx
        .mul(&wy)
        .mul(&quad)
        .add(&wy.scale(-x))
        .add(&wx.scale(-cc * y));

    let a = (p.eps * p.alpha * k).powi(2);
    let tk2 = (p.theta_e * k).powi(2);
    let ion = wy.mul(&wy).add(&Poly(vec![-a]));
    let ele = wx.mul(&wx).add(&Poly(vec![-(1.0 + tk2)]));
    let ele0 = wx.mul(&wx).add(&Poly(vec![-tk2]));
    let pl = Poly(vec![0.0, 1.0])
        .mul(&ion)
        .mul(&ele)
        .add(&ion.scale(x))
        .add(&wy.mul(&ele0).scale(-cc));
    (pt, pl)
}

/// `det(omega - M) = omega P_T(omega)^2 P_L(omega)`.
pub fn dispersion_product(p: &PlasmaParams, c: &ConvectionScalars, k: f64, omega: C64) -> C64 {
    let (pt, pl) = dispersion_factors(p, c, k);
    let t = pt.eval_c(omega);
    omega * t * t * pl.eval_c(omega)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRoots {
    pub transverse: Vec<f64>,
    pub longitudinal: Vec<f64>,
    pub kernel_root: f64,
}

pub fn dispersion_polynomials(
    p: &PlasmaParams,
    c: &ConvectionScalars,
    xi: &Vector3<f64>,
) -> DispersionRoots {
    let (pt, pl) = dispersion_factors(p, c, xi.norm());
    DispersionRoots {
        transverse: pt.real_roots(),
        longitudinal: pl.real_roots(),
        kernel_root: 0.0,
    }
}

/// A closed-form eigenvector at rest with its eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMode {
    pub label: &'static str,
    pub lambda: f64,
    pub class: ModeClass,
    /// As given by the closed formula.
    pub raw: CVec14,
    /// Normalized to unit length.
    pub unit: CVec14,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestEigenvectors {
    pub xi1: Vector3<f64>,
    pub xi2: Vector3<f64>,
    pub modes: Vec<LabeledMode>,
}

impl RestEigenvectors {
    pub fn get(&self, label: &str) -> &LabeledMode {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .unwrap_or_else(|| panic!("unknown mode label {label}"))
    }
}

/// Deterministic orthonormal basis `{xi1, xi2}` of `xi^perp` with `xi2 = xi1 x xi_hat`.
pub fn orthonormal_frame(xi: &Vector3<f64>) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let h = unit_direction(xi)?;
    let a = h.map(f64::abs);
    let imin = if a.x <= a.y && a.x <= a.z {
        0
    } else if a.y <= a.z {
        1
    } else {
        2
    };
    let mut emin = Vector3::zeros();
    emin[imin] = 1.0;
    let xi1 = emin.cross(&h).normalize();
    let xi2 = xi1.cross(&h);
    Some((xi1, xi2))
}

fn state(
    b: Vector3<C64>,
    e: Vector3<C64>,
    ve: Vector3<C64>,
    ne: C64,
    vi: Vector3<C64>,
    w: C64,
) -> CVec14 {
    let mut v = CVec14::zeros();
    for d in 0..3 {
        v[IB + d] = b[d];
        v[IE + d] = e[d];
        v[IVE + d] = ve[d];
        v[IVI + d] = vi[d];
    }
    v[INE] = ne;
    v[IW] = w;
    v
}

fn cv(v: &Vector3<f64>, s: C64) -> Vector3<C64> {
    v.map(|x| s * x)
}

/// Closed-form eigenvector family at `(eps, 0, xi)`.
pub fn rest_eigenvectors(
    p: &PlasmaParams,
    xi: &Vector3<f64>,
) -> Result<RestEigenvectors, SpectralError> {
    let (xi1, xi2) = orthonormal_frame(xi).ok_or(SpectralError::UndefinedDirection)?;
    if !(p.eps > 0.0 && p.alpha > 0.0) {
        return Err(SpectralError::DegenerateParameters);
    }
    let h = xi / xi.norm();
    let k = xi.norm();
    let (eps, th, al) = (p.eps, p.theta_e, p.alpha);
    let i = C64::new(0.0, 1.0);
    let r = |x: f64| C64::new(x, 0.0);
    let z3 = Vector3::<C64>::zeros();
    let z = r(0.0);
    let ev = rest_eigenvalues(p, k);
    let mut modes = Vec::new();
    let mut push = |label, lambda, class, raw: CVec14| {
        let unit = raw / C64::new(raw.norm(), 0.0);
        modes.push(LabeledMode {
            label,
            lambda,
            class,
            raw,
            unit,
        });
    };

    push(
        "e0",
        0.0,
        ModeClass::Kernel,
        state(cv(&h, r(1.0)), z3, z3, z, z3, z),
    );
    for (label, labelp, lam) in [("e+", "e'+", ev.lambda), ("e-", "e'-", -ev.lambda)] {
        push(
            label,
            lam,
            ModeClass::KleinGordon,
            state(
                cv(&xi2, r(-k / lam)),
                cv(&xi1, r(1.0)),
                cv(&xi1, -i / lam),
                z,
                cv(&xi1, i * eps / (th * lam)),
                z,
            ),
        );
        push(
            labelp,
            lam,
            ModeClass::KleinGordon,
            state(
                cv(&xi1, r(k / lam)),
                cv(&xi2, r(1.0)),
                cv(&xi2, -i / lam),
                z,
                cv(&xi2, i * eps / (th * lam)),
                z,
            ),
        );
    }
    let tk2 = (th * k).powi(2);
    let a_ion = (eps * al * k).powi(2);
    for (label, mu) in [("f+", ev.mu), ("f-", -ev.mu)] {
        let a = (mu * mu - tk2) / mu;
        let rr = (mu * mu - tk2) / (mu * mu - a_ion);
        push(
            label,
            mu,
            ModeClass::KleinGordon,
            state(
                z3,
                cv(&h, r(a)),
                cv(&h, -i),
                -i * th * k / mu,
                cv(&h, i * eps * rr / th),
                i * al * eps * eps * rr * k / (th * mu),
            ),
        );
    }
    let n1 = 1.0 / (1.0 + k * k).sqrt();
    push(
        "es(e-)",
        0.0,
        ModeClass::Acoustic,
        state(cv(&xi1, r(n1)), z3, cv(&xi2, i * k * n1), z, z3, z),
    );
    push(
        "e's(e-)",
        0.0,
        ModeClass::Acoustic,
        state(cv(&xi2, r(n1)), z3, cv(&xi1, -i * k * n1), z, z3, z),
    );
    let n2 = k / (k + eps);
    push(
        "es(e+)",
        0.0,
        ModeClass::Acoustic,
        state(
            cv(&xi2, -i * eps * n2 / (th * k)),
            z3,
            z3,
            z,
            cv(&xi1, r(n2)),
            z,
        ),
    );
    push(
        "e's(e+)",
        0.0,
        ModeClass::Acoustic,
        state(
            cv(&xi1, i * eps * n2 / (th * k)),
            z3,
            z3,
            z,
            cv(&xi2, r(n2)),
            z,
        ),
    );
    let n3 = 1.0 / (1.0 + tk2).sqrt();
    push(
        "fs(e-)",
        0.0,
        ModeClass::Acoustic,
        state(z3, cv(xi, -i * th * n3), z3, r(n3), z3, r(-n3 / al)),
    );
    for (label, ms) in [("fs(e+)+", ev.mu_s), ("fs(e+)-", -ev.mu_s)] {
        let mt = (ms * ms - a_ion) / ms;
        let den = ms * ms - tk2;
        push(
            label,
            ms,
            ModeClass::Acoustic,
            state(
                z3,
                cv(&h, r(th * mt / eps)),
                cv(&h, -i * th * mt * ms / (eps * den)),
                -i * th * th * k * mt / (eps * den),
                cv(&h, i),
                i * al * eps * k / ms,
            ),
        );
    }
    Ok(RestEigenvectors { xi1, xi2, modes })
}

/// Characteristic-variety row for plotting: sorted eigenvalues and their classes.
pub fn spectrum_row(
    p: &PlasmaParams,
    u: &StateVector,
    xi: &Vector3<f64>,
) -> Result<(Vec<f64>, Vec<ModeClass>), SpectralError> {
    let d = eigendecompose(p, u, xi)?;
    let kernel_index = (0..DIM)
        .filter(|i| !d.kg_indices.contains(i))
        .min_by(|&a, &b| d.pairs.values[a].abs().total_cmp(&d.pairs.values[b].abs()));
    let classes = (0..DIM)
        .map(|i| {
            if d.kg_indices.contains(&i) {
                ModeClass::KleinGordon
            } else if xi.norm() > 0.0 && Some(i) == kernel_index {
                ModeClass::Kernel
            } else {
                ModeClass::Acoustic
            }
        })
        .collect();
    Ok((d.pairs.values.clone(), classes))
}
