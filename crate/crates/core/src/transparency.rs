//! Interaction coefficients, transparency bounds and the symmetrizer.
//!
//! Interaction coefficients are evaluated per harmonic: for an amplitude
//! `u_{a,p}` (with its space gradient and slow time derivative at one point `x`)
//! the coefficient `B(u_{a,p})` is the matrix of
//! `v -> B(u_{a,p}, v) + B(v, u_{a,p}) - A1(v) u_{a,p}`, where the last term
//! is the convection of `u_{a,p}` by `v` (a first-order differential operator in `x`).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{hermitian_eigen, op_norm, outer, projector_derivative};
use crate::model::symbol_rest;
use crate::model::{
    bilinear_b_left, bilinear_b_right, convection_block, f_eps, CVec14, Mat14, PlasmaParams,
    StateVector, DIM, IE, INE, IVE, IVI, IW,
};
use crate::resonance::{clip_phase, s0_phase, Cutoffs};
use crate::spectral::{
    decompose_matrix, eigendecompose, rest_eigenvalues, rest_eigenvectors, ModeClass,
    SpectralDecomposition, SpectralError,
};
use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransparencyError {
    #[error("leading electron velocity of the profile vanishes identically")]
    DegenerateProfile,
    #[error("transparency bound violated at eps = {eps}, xi = {xi:?}, p = {p}: coefficient {coeff} exceeds {bound}")]
    BoundViolation {
        eps: f64,
        xi: [f64; 3],
        p: i32,
        coeff: f64,
        bound: f64,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// One harmonic of the approximate solution at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicAmplitude {
    pub p: i32,
    /// `sum_m eps^m u_{m,p}`.
    pub value: CVec14,
    /// Space gradient, one 14-vector per coordinate direction.
    pub grad: [CVec14; 3],
    /// Slow time derivative.
    pub dt: CVec14,
    /// Leading-order electron velocity `v_{e0,p}`.
    pub ve0: Vector3<C64>,
}

impl HarmonicAmplitude {
    pub fn zero(p: i32) -> Self {
        Self {
            p,
            value: CVec14::zeros(),
            grad: [CVec14::zeros(); 3],
            dt: CVec14::zeros(),
            ve0: Vector3::zeros(),
        }
    }
}

/// All harmonics of the approximate solution at one `(t, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSnapshot {
    pub eps: f64,
    pub t: f64,
    pub harmonics: Vec<HarmonicAmplitude>,
}

impl AmplitudeSnapshot {
    /// Real state `sum_p e^{i p t / eps^2} u_{a,p}`.
    pub fn total(&self) -> (StateVector, [StateVector; 3]) {
        let theta = self.t / (self.eps * self.eps);
        let mut v = [0.0; DIM];
        let mut g = [[0.0; DIM]; 3];
        for h in &self.harmonics {
            let ph = C64::from_polar(1.0, h.p as f64 * theta);
            for i in 0..DIM {
                v[i] += (ph * h.value[i]).re;
                for d in 0..3 {
                    g[d][i] += (ph * h.grad[d][i]).re;
                }
            }
        }
        (StateVector(v), g.map(StateVector))
    }
}

/// Matrix of `v -> B(u, v) + B(v, u) - A1(v) u` for a complex amplitude `u`.
pub fn coeff_b_matrix(p: &PlasmaParams, u: &CVec14, grad: &[CVec14; 3]) -> Mat14 {
    let th = p.theta_e;
    let mut m = bilinear_b_left(th, u) + bilinear_b_right(th, u);
    // -A1(v) u = -eps theta (v_e . grad)(v_e, n_e)_u - eps^2 (v_i . grad)(v_i, w)_u
    for d in 0..3 {
        for r in IVE..=INE {
            m[(r, IVE + d)] -= grad[d][r] * (p.eps * th);
        }
        for r in IVI..=IW {
            m[(r, IVI + d)] -= grad[d][r] * (p.eps * p.eps);
        }
    }
    m
}

pub fn coeff_b(p: &PlasmaParams, h: &HarmonicAmplitude) -> Mat14 {
    coeff_b_matrix(p, &h.value, &h.grad)
}

/// `D(u_a) = (G^0)'(u_a)` at a real state.
pub fn coeff_d(p: &PlasmaParams, u: &StateVector) -> Mat14 {
    let th = p.theta_e;
    let n = u.ne();
    let ni = u.ni(p.alpha);
    let ve = u.ve();
    let vi = u.vi();
    let mut m = Mat14::zeros();
    let r = |x: f64| C64::new(x, 0.0);
    for d in 0..3 {
        // E-row of G^0: (n^2/2) v_e - theta^-1 n_i v_i
        m[(IE + d, INE)] = r(n * ve[d]);
        m[(IE + d, IVE + d)] = r(f_eps(0.0, n));
        if p.alpha > 0.0 {
            m[(IE + d, IW)] = r(-vi[d] / (th * p.alpha));
        }
        m[(IE + d, IVI + d)] = r(-ni / th);
    }
    m
}

/// Rest data at `(eps, 0, xi)` reused by the coefficient evaluations.
#[derive(Clone, Debug)]
pub struct RestPoint {
    pub xi: Vector3<f64>,
    pub dec: SpectralDecomposition,
    pub slow: Vec<usize>,
}

impl RestPoint {
    pub fn new(p: &PlasmaParams, xi: &Vector3<f64>) -> Result<Self, SpectralError> {
        let dec = eigendecompose(p, &StateVector::zeros(), xi)?;
        let slow = dec.slow_indices();
        Ok(Self { xi: *xi, dec, slow })
    }

    pub fn pi0(&self) -> Mat14 {
        self.dec.pi0
    }

    pub fn pis(&self) -> Mat14 {
        self.dec.slow_total()
    }

    /// Variation of the slow total projector along `v -> v + w` (complex-linear).
    pub fn d_pis(&self, p: &PlasmaParams, w: &CVec14) -> Mat14 {
        let x = convection_block(p, w, &self.xi);
        projector_derivative(&self.dec.pairs, &self.slow, &x)
    }

    /// Variation of the Klein-Gordon total projector along `w`.
    pub fn d_pi0(&self, p: &PlasmaParams, w: &CVec14) -> Mat14 {
        let x = convection_block(p, w, &self.xi);
        projector_derivative(&self.dec.pairs, &self.dec.kg_indices, &x)
    }

    /// `(lambda, Pi, class)` per distinct eigenvalue.
    pub fn modes(&self) -> Vec<(f64, Mat14, ModeClass)> {
        self.dec
            .eigenvalues
            .iter()
            .zip(&self.dec.projectors)
            .map(|(e, pr)| (e.lambda, *pr, e.class))
            .collect()
    }
}

fn slow_total_at(p: &PlasmaParams, xi: &Vector3<f64>) -> Result<(Mat14, Mat14), SpectralError> {
    let m = symbol_rest(p, xi);
    let d = decompose_matrix(p, &m, xi)?;
    Ok((d.slow_total(), d.pi0))
}

/// Central-difference `d/dxi_a` of `(Pi_s, Pi_0, Pi_s A0)` at rest.
fn xi_derivatives(
    p: &PlasmaParams,
    xi: &Vector3<f64>,
    a: usize,
) -> Result<(Mat14, Mat14, Mat14), SpectralError> {
    let h = 1e-5 * (1.0 + xi.norm());
    let mut xp = *xi;
    let mut xm = *xi;
    xp[a] += h;
    xm[a] -= h;
    let i = C64::new(0.0, 1.0);
    let (sp, zp) = slow_total_at(p, &xp)?;
    let (sm, zm) = slow_total_at(p, &xm)?;
    let ap = sp * symbol_rest(p, &xp) * i;
    let am = sm * symbol_rest(p, &xm) * i;
    let s = C64::new(1.0 / (2.0 * h), 0.0);
    Ok(((sp - sm) * s, (zp - zm) * s, (ap - am) * s))
}

/// First-order part `rho^(0)` of the symbol `rho` for one harmonic.
pub fn rho0(
    p: &PlasmaParams,
    rest: &RestPoint,
    h: &HarmonicAmplitude,
) -> Result<Mat14, SpectralError> {
    let i = C64::new(0.0, 1.0);
    let pis = rest.pis();
    let pi0 = rest.pi0();
    let a0 = symbol_rest(p, &rest.xi) * i;
    let mut acc = Mat14::zeros();
    for a in 0..3 {
        let g = &h.grad[a];
        if g.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let (d_pis, d_pi0, d_pis_a0) = xi_derivatives(p, &rest.xi, a)?;
        let dv_pi0 = rest.d_pi0(p, g);
        let a1 = convection_block(p, g, &rest.xi) * i;
        // B(0, .) vanishes identically
        acc += d_pis_a0 * dv_pi0 + d_pis * a1 + pis * a0 * d_pi0 * dv_pi0;
    }
    Ok(pis * acc * pi0)
}

/// Linearized coefficient `d_u B^r(eps, 0) . u_{a,p}`.
pub fn br_linear(
    p: &PlasmaParams,
    rest: &RestPoint,
    h: &HarmonicAmplitude,
) -> Result<Mat14, SpectralError> {
    let eps = p.eps;
    let b = coeff_b(p, h);
    let w = h.value * C64::new(0.0, h.p as f64) + h.dt * C64::new(eps * eps, 0.0);
    let dpis = rest.d_pis(p, &w);
    let rho = rho0(p, rest, h)?;
    let inner = b + dpis * C64::new(eps, 0.0) + rho * C64::new(eps, 0.0);
    Ok(rest.pis() * inner * rest.pi0())
}

/// Block `Pi_k V Pi_j` with its polarization defect `|Pi_k (.) Pi_j - (.)|`.
#[derive(Clone, Debug)]
pub struct InteractionCoefficient {
    pub j: usize,
    pub k: usize,
    pub p: i32,
    pub value: Mat14,
}

impl InteractionCoefficient {
    pub fn polarization_defect(&self, pk: &Mat14, pj: &Mat14) -> f64 {
        crate::linalg::max_abs(&(pk * self.value * pj - self.value))
    }
}

/// Per-block witnesses of the s0 coefficients at one point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSample {
    pub eps: f64,
    pub xi: [f64; 3],
    pub p: i32,
    pub lambda_j: f64,
    pub lambda_k: f64,
    pub phase: f64,
    pub coeff: f64,
}

/// s0 blocks `Pi_k X Pi_j` (`k` slow, `j` Klein-Gordon) of a matrix `X`.
pub fn s0_blocks(rest: &RestPoint, x: &Mat14, p_harm: i32, eps: f64) -> Vec<BlockSample> {
    let modes = rest.modes();
    let mut out = Vec::new();
    for (lk, pk, ck) in &modes {
        if *ck == ModeClass::KleinGordon {
            continue;
        }
        for (lj, pj, cj) in &modes {
            if *cj != ModeClass::KleinGordon {
                continue;
            }
            out.push(BlockSample {
                eps,
                xi: [rest.xi.x, rest.xi.y, rest.xi.z],
                p: p_harm,
                lambda_j: *lj,
                lambda_k: *lk,
                phase: s0_phase(p_harm, *lk, *lj),
                coeff: op_norm(&(pk * x * pj)),
            });
        }
    }
    out
}

/// Fitted transparency constants over a sample set.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TransparencyFit {
    /// `sup |coeff| / (|xi|^2 + eps |xi|)`.
    pub c_b: f64,
    /// `sup |coeff| / (eps^2 + |phase|)`.
    pub c: f64,
    /// `sup |Pi_k D Pi_j| / eps`.
    pub c_d: f64,
    pub witness_c: Option<BlockSample>,
    pub witness_c_b: Option<BlockSample>,
    pub samples: usize,
}

/// Fits the transparency constants over `xi_grid x snapshots`.
pub fn check_transparency(
    p: &PlasmaParams,
    snapshots: &[AmplitudeSnapshot],
    xi_grid: &[Vector3<f64>],
) -> Result<TransparencyFit, TransparencyError> {
    let eps = p.eps;
    let mut fit = TransparencyFit::default();
    for xi in xi_grid {
        let rest = RestPoint::new(p, xi)?;
        let k = xi.norm();
        for snap in snapshots {
            for h in &snap.harmonics {
                let x = br_linear(p, &rest, h)?;
                for s in s0_blocks(&rest, &x, h.p, eps) {
                    fit.samples += 1;
                    if k > 0.0 {
                        let r = s.coeff / (k * k + eps * k);
                        if r > fit.c_b {
                            fit.c_b = r;
                            fit.witness_c_b = Some(s.clone());
                        }
                    }
                    let r = s.coeff / (eps * eps + s.phase.abs());
                    if r > fit.c {
                        fit.c = r;
                        fit.witness_c = Some(s);
                    }
                }
            }
            let (u, _) = snap.total();
            let d = coeff_d(p, &u);
            for s in s0_blocks(&rest, &d, 0, eps) {
                fit.c_d = fit.c_d.max(s.coeff / eps);
            }
        }
    }
    Ok(fit)
}

/// Non-transparency margin: over `xi` near the origin (the limiting (0-s)
/// resonance), the smallest value of the largest block `|Pi_j B(u_{a,p}) Pi_k|`,
/// `j` Klein-Gordon and `k` slow, with projectors at `(0, 0)`.
pub fn check_nontransparency(
    p: &PlasmaParams,
    snap: &AmplitudeSnapshot,
    xi_grid: &[Vector3<f64>],
) -> Result<f64, TransparencyError> {
    let lead: f64 = snap.harmonics.iter().map(|h| h.ve0.norm()).sum();
    if lead == 0.0 {
        return Err(TransparencyError::DegenerateProfile);
    }
    let p0 = PlasmaParams { eps: 0.0, ..*p };
    let mut margin = f64::INFINITY;
    for xi in xi_grid {
        let rest = RestPoint::new(&p0, xi)?;
        let modes = rest.modes();
        let mut best = 0.0f64;
        for h in &snap.harmonics {
            let b = coeff_b(p, h);
            for (_, pj, cj) in &modes {
                if *cj != ModeClass::KleinGordon {
                    continue;
                }
                for (_, pk, ck) in &modes {
                    if *ck == ModeClass::KleinGordon {
                        continue;
                    }
                    best = best.max(op_norm(&(pj * b * pk)));
                }
            }
        }
        margin = margin.min(best);
    }
    Ok(margin)
}

/// Block-diagonal symmetrizer `S = S_0 + S_s` at rest.
#[derive(Clone, Debug)]
pub struct Symmetrizer {
    pub s0: Mat14,
    pub ss: Mat14,
    /// `max(lambda_max(S), 1 / lambda_min(S))`.
    pub gamma: f64,
    /// Weights `-theta^2|xi|^2 / (mu_s^2 - theta^2 |xi|^2)` on `f_s(e+)_pm`.
    pub acoustic_weights: [f64; 2],
}

impl Symmetrizer {
    pub fn matrix(&self) -> Mat14 {
        self.s0 + self.ss
    }
}

fn gram_schmidt(vs: &[CVec14]) -> Vec<CVec14> {
    let mut out: Vec<CVec14> = Vec::new();
    for v in vs {
        let mut w = *v;
        for q in &out {
            let c = q.dotc(&w);
            w -= q * c;
        }
        let n = w.norm();
        if n > 1e-12 {
            out.push(w / C64::new(n, 0.0));
        }
    }
    out
}

pub fn acoustic_weight(p: &PlasmaParams, k: f64) -> f64 {
    let ev = rest_eigenvalues(p, k);
    let tk2 = (p.theta_e * k).powi(2);
    -tk2 / (ev.mu_s * ev.mu_s - tk2)
}

pub fn build_symmetrizer(
    p: &PlasmaParams,
    xi: &Vector3<f64>,
) -> Result<Symmetrizer, SpectralError> {
    let fam = rest_eigenvectors(p, xi)?;
    let ev = rest_eigenvalues(p, xi.norm());
    let ratio = C64::new(ev.lambda / ev.mu, 0.0);
    let mut s0 = Mat14::zeros();
    for l in ["e+", "e'+", "e-", "e'-"] {
        let u = &fam.get(l).unit;
        s0 += outer(u, u);
    }
    for l in ["f+", "f-"] {
        let u = &fam.get(l).unit;
        s0 += outer(u, u) * ratio;
    }
    let zero = gram_schmidt(
        &["e0", "es(e-)", "e's(e-)", "es(e+)", "e's(e+)", "fs(e-)"].map(|l| fam.get(l).unit),
    );
    let mut ss = zero.iter().fold(Mat14::zeros(), |acc, q| acc + outer(q, q));
    let w = acoustic_weight(p, xi.norm());
    for l in ["fs(e+)+", "fs(e+)-"] {
        let u = &fam.get(l).unit;
        ss += outer(u, u) * C64::new(w, 0.0);
    }
    let eig = hermitian_eigen(&(s0 + ss));
    let lo = eig.values[0];
    let hi = eig.values[DIM - 1];
    Ok(Symmetrizer {
        s0,
        ss,
        gamma: hi.max(1.0 / lo),
        acoustic_weights: [w, w],
    })
}

/// `|S M - (S M)^*|` with `M` the rest symbol.
pub fn symmetrizer_defect(p: &PlasmaParams, s: &Symmetrizer, xi: &Vector3<f64>) -> f64 {
    let sm = s.matrix() * symbol_rest(p, xi);
    crate::linalg::max_abs(&(sm - sm.adjoint()))
}

/// `|S E + (S E)^*| / eps` with `E = Pi_0 B Pi_0 + Pi_s B Pi_s` at a real state.
pub fn symmetrizer_commutator(
    p: &PlasmaParams,
    s: &Symmetrizer,
    rest: &RestPoint,
    u: &StateVector,
    grad: &[StateVector; 3],
) -> f64 {
    let b = coeff_b_matrix(p, &u.to_complex(), &grad.map(|g| g.to_complex()));
    let e = rest.pi0() * b * rest.pi0() + rest.pis() * b * rest.pis();
    let se = s.matrix() * e;
    op_norm(&(se + se.adjoint())) / p.eps
}

/// Parts of `|S E + (S E)^*| / eps`: all of `E`, the blocks inside one
/// Klein-Gordon frequency family (`lambda > 0` or `lambda < 0`), and the slow
/// blocks with `e_0` projected out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorParts {
    pub full: f64,
    pub same_family: f64,
    pub slow: f64,
}

pub fn symmetrizer_commutator_parts(
    p: &PlasmaParams,
    s: &Symmetrizer,
    rest: &RestPoint,
    u: &StateVector,
    grad: &[StateVector; 3],
) -> CommutatorParts {
    let b = coeff_b_matrix(p, &u.to_complex(), &grad.map(|g| g.to_complex()));
    let sm = s.matrix();
    let sym = |e: Mat14| {
        let se = sm * e;
        op_norm(&(se + se.adjoint())) / p.eps
    };
    let (mut plus, mut minus) = (Mat14::zeros(), Mat14::zeros());
    for (l, pr, c) in rest.modes() {
        if c == ModeClass::KleinGordon {
            if l > 0.0 {
                plus += pr;
            } else {
                minus += pr;
            }
        }
    }
    let slow = rest.pis() - rest.dec.kernel;
    CommutatorParts {
        full: symmetrizer_commutator(p, s, rest, u, grad),
        same_family: sym(plus * b * plus + minus * b * minus),
        slow: sym(slow * b * slow),
    }
}

/// Homological symbol `N^(0)_p` for one harmonic, s0 blocks with clipped phases.
pub fn n0_symbol(
    p: &PlasmaParams,
    rest: &RestPoint,
    h: &HarmonicAmplitude,
    cut: &Cutoffs,
) -> Result<Mat14, SpectralError> {
    let x = br_linear(p, rest, h)?;
    let chi = cut.chi_eps(p.eps, rest.xi.norm());
    let modes = rest.modes();
    let mut n = Mat14::zeros();
    for (lk, pk, ck) in &modes {
        if *ck == ModeClass::KleinGordon {
            continue;
        }
        for (lj, pj, cj) in &modes {
            if *cj != ModeClass::KleinGordon {
                continue;
            }
            let phi = clip_phase(s0_phase(h.p, *lk, *lj), p.eps);
            n += pk * x * pj * C64::new(0.0, -chi / phi);
        }
    }
    Ok(n)
}

/// Residual `i phi N_p - chi_eps X_p^{s0}` of the homological equation, without the time-derivative term.
pub fn n0_defect(
    p: &PlasmaParams,
    rest: &RestPoint,
    h: &HarmonicAmplitude,
    cut: &Cutoffs,
) -> Result<Mat14, SpectralError> {
    let x = br_linear(p, rest, h)?;
    let n = n0_symbol(p, rest, h, cut)?;
    let chi = cut.chi_eps(p.eps, rest.xi.norm());
    let modes = rest.modes();
    let mut r = Mat14::zeros();
    for (lk, pk, ck) in &modes {
        if *ck == ModeClass::KleinGordon {
            continue;
        }
        for (lj, pj, cj) in &modes {
            if *cj != ModeClass::KleinGordon {
                continue;
            }
            let phi = s0_phase(h.p, *lk, *lj);
            r += pk * (n * C64::new(0.0, phi) - x * C64::new(chi, 0.0)) * pj;
        }
    }
    Ok(r)
}

/// Sup over `xi` and harmonics of `|eps^2 d_t N + i phi N - chi_eps X|` on s0 blocks.
/// `prev` and `next` are the amplitudes at `t - h` and `t + h`.
pub fn homological_residual(
    p: &PlasmaParams,
    prev: &AmplitudeSnapshot,
    snap: &AmplitudeSnapshot,
    next: &AmplitudeSnapshot,
    h: f64,
    xi_grid: &[Vector3<f64>],
    cut: &Cutoffs,
) -> Result<f64, SpectralError> {
    let eps2 = p.eps * p.eps;
    let mut worst = 0.0f64;
    for xi in xi_grid {
        let rest = RestPoint::new(p, xi)?;
        for ((hm, h0), hp) in prev
            .harmonics
            .iter()
            .zip(&snap.harmonics)
            .zip(&next.harmonics)
        {
            let dn = (n0_symbol(p, &rest, hp, cut)? - n0_symbol(p, &rest, hm, cut)?)
                * C64::new(eps2 / (2.0 * h), 0.0);
            let r = dn + n0_defect(p, &rest, h0, cut)?;
            worst = worst.max(op_norm(&r));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amp(ve: [f64; 3]) -> HarmonicAmplitude {
        let mut h = HarmonicAmplitude::zero(1);
        for d in 0..3 {
            h.value[IVE + d] = C64::new(0.0, ve[d]);
            h.value[IE + d] = C64::new(ve[d], 0.0);
            h.ve0[d] = C64::new(0.0, ve[d]);
        }
        h
    }

    #[test]
    fn zero_amplitude_gives_zero_operator() {
        let p = PlasmaParams::default();
        let b = coeff_b(&p, &HarmonicAmplitude::zero(1));
        assert!(b.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn printed_longitudinal_coefficient() {
        // f_+^* B f_s(e-) = ((mu^2 - theta^2 k^2) / mu^2) (v . xi_hat) at leading order
        let p = PlasmaParams::new(1e-4, 0.1, 0.1).unwrap();
        let xi = Vector3::new(0.2, -0.1, 0.3);
        let v = [0.3, 0.7, -0.2];
        let mut h = HarmonicAmplitude::zero(1);
        for d in 0..3 {
            h.value[IVE + d] = C64::new(v[d], 0.0);
        }
        let fam = rest_eigenvectors(&p, &xi).unwrap();
        let b = coeff_b(&p, &h);
        let got = fam.get("f+").raw.dotc(&(b * fam.get("fs(e-)").raw));
        let ev = rest_eigenvalues(&p, xi.norm());
        let tk2 = (p.theta_e * xi.norm()).powi(2);
        let vx = Vector3::from(v).dot(&(xi / xi.norm()));
        let want = (ev.mu * ev.mu - tk2) / (ev.mu * ev.mu) * vx;
        // the closed-form f_s(e-) is normalized; undo it
        let n3 = (1.0 + tk2).sqrt();
        assert!((got * n3 - want).norm() < 1e-3, "{got} vs {want}");
    }

    #[test]
    fn symmetrizer_is_compatible_with_symbol() {
        let p = PlasmaParams::new(0.05, 0.1, 0.1).unwrap();
        let xi = Vector3::new(0.1, 0.5, -0.3);
        let s = build_symmetrizer(&p, &xi).unwrap();
        assert!(symmetrizer_defect(&p, &s, &xi) < 1e-10);
        assert!(s.gamma < 2.0);
    }

    #[test]
    fn nontransparency_rejects_flat_profile() {
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
        let snap = AmplitudeSnapshot {
            eps: p.eps,
            t: 0.0,
            harmonics: vec![amp([1.0, 0.0, 0.0])],
        };
        let m = check_nontransparency(&p, &snap, &[Vector3::new(0.0, 0.0, 0.01)]).unwrap();
        assert!(m > 0.0);
    }
}
