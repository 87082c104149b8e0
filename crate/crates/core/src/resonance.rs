//! Phases, resonance localization, cutoffs and the leading homological symbol.
//!
//! Phases use the closed-form rest eigenvalues. For the slow/Klein-Gordon block
//! fed by harmonic `p`, the homological equation involves
//! `p + lambda_k - lambda_j = -Phi_{j,k,-p}` (`k` slow, `j` Klein-Gordon).

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::PlasmaParams;
use crate::spectral::rest_eigenvalues;

/// Localization constants.
pub const C_L: f64 = 0.5;
pub const C_M: f64 = 1.0;
pub const C_M_UPPER: f64 = 2.0;
/// Cutoff transition radii.
pub const C_0: f64 = 0.6;
pub const C_1: f64 = 0.8;

const SCAN_POINTS: usize = 2000;
const SCAN_MIN: f64 = 1e-4;
const SCAN_MAX: f64 = 1e2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("localization failure for {family:?}: {violations:?}")]
    Localization {
        family: Family,
        violations: Vec<ResonanceRoot>,
    },
}

/// Eigenvalue branches at rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    LambdaPlus,
    LambdaMinus,
    MuPlus,
    MuMinus,
    Zero,
    MuSPlus,
    MuSMinus,
}

impl Branch {
    pub const KLEIN_GORDON: [Branch; 4] = [
        Branch::LambdaPlus,
        Branch::LambdaMinus,
        Branch::MuPlus,
        Branch::MuMinus,
    ];
    pub const SLOW: [Branch; 3] = [Branch::Zero, Branch::MuSPlus, Branch::MuSMinus];

    pub fn value(&self, p: &PlasmaParams, k: f64) -> f64 {
        let ev = rest_eigenvalues(p, k);
        match self {
            Branch::LambdaPlus => ev.lambda,
            Branch::LambdaMinus => -ev.lambda,
            Branch::MuPlus => ev.mu,
            Branch::MuMinus => -ev.mu,
            Branch::Zero => 0.0,
            Branch::MuSPlus => ev.mu_s,
            Branch::MuSMinus => -ev.mu_s,
        }
    }

    pub fn is_klein_gordon(&self) -> bool {
        Self::KLEIN_GORDON.contains(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Branch::LambdaPlus => "lambda+",
            Branch::LambdaMinus => "lambda-",
            Branch::MuPlus => "mu+",
            Branch::MuMinus => "mu-",
            Branch::Zero => "0",
            Branch::MuSPlus => "mu_s+",
            Branch::MuSMinus => "mu_s-",
        }
    }
}

/// `Phi_{j,k,p} = lambda_j - lambda_k + p` at `(eps, 0, xi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub j: Branch,
    pub k: Branch,
    pub p: i32,
}

impl Phase {
    pub fn value(&self, params: &PlasmaParams, k: f64) -> f64 {
        self.j.value(params, k) - self.k.value(params, k) + self.p as f64 * params.omega
    }
}

pub fn phase(j: Branch, k: Branch, p: i32, params: &PlasmaParams, xi: &Vector3<f64>) -> f64 {
    Phase { j, k, p }.value(params, xi.norm())
}

/// `Psi_{j,p,p'} = lambda_j(0, 0, xi) - (p + p')`.
pub fn psi(j: Branch, p: i32, pp: i32, params: &PlasmaParams, k: f64) -> f64 {
    let lim = PlasmaParams {
        eps: 0.0,
        ..*params
    };
    j.value(&lim, k) - (p + pp) as f64 * params.omega
}

/// Phase of the slow/Klein-Gordon block driven by harmonic `p`.
pub fn s0_phase(p: i32, lambda_slow: f64, lambda_kg: f64) -> f64 {
    p as f64 + lambda_slow - lambda_kg
}

/// Replaces phases smaller than `eps^2 / 2` in modulus by `eps^2 / 2`.
pub fn clip_phase(phi: f64, eps: f64) -> f64 {
    let floor = 0.5 * eps * eps;
    if phi.abs() >= floor {
        phi
    } else {
        floor
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    ZeroZero,
    ZeroS,
    ZeroZeroS,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::ZeroZero => "0-0",
            Family::ZeroS => "0-s",
            Family::ZeroZeroS => "0-0-s",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRoot {
    pub j: Branch,
    pub k: Branch,
    pub p: i32,
    pub radius: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub family: Family,
    pub eps: f64,
    pub theta_e: f64,
    pub roots: Vec<ResonanceRoot>,
    /// `(c_l, c_m, C_m)`.
    pub localization: (f64, f64, f64),
    /// Infimum of `|Phi|` (or `|Psi|`) outside the declared interval.
    pub margin: f64,
}

fn scan_radii() -> Vec<f64> {
    let (a, b) = (SCAN_MIN.ln(), SCAN_MAX.ln());
    (0..SCAN_POINTS)
        .map(|i| (a + (b - a) * i as f64 / (SCAN_POINTS - 1) as f64).exp())
        .collect()
}

/// Sign-change bracketing on log-spaced radii followed by bisection.
pub fn roots_of(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let radii = scan_radii();
    let mut out = Vec::new();
    let mut prev = (radii[0], f(radii[0]));
    if prev.1 == 0.0 {
        out.push(prev.0);
    }
    for &r in &radii[1..] {
        let v = f(r);
        if v == 0.0 {
            out.push(r);
        } else if prev.1 * v < 0.0 {
            let (mut lo, mut hi) = (prev.0, r);
            let flo = prev.1;
            while hi - lo > 1e-12 * (1.0 + hi) {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = (r, v);
    }
    out
}

/// `(j, k, p)` triples whose phases define a family.
pub fn pairs(family: Family) -> Vec<(Branch, Branch, i32)> {
    let mut out = Vec::new();
    for &j in &Branch::KLEIN_GORDON {
        let ks: &[Branch] = match family {
            Family::ZeroZero => &Branch::KLEIN_GORDON,
            _ => &Branch::SLOW,
        };
        for &k in ks {
            for p in [-1, 1] {
                out.push((j, k, p));
            }
        }
    }
    out
}

/// Locates the resonances of one family and checks the localization constants.
pub fn locate_resonances(
    params: &PlasmaParams,
    family: Family,
) -> Result<ResonanceReport, ResonanceError> {
    let report = resonance_report(params, family);
    let violations: Vec<ResonanceRoot> = report
        .roots
        .iter()
        .filter(|r| match family {
            Family::ZeroZero => r.radius < C_M || r.radius > C_M_UPPER,
            Family::ZeroS => r.radius > C_L,
            Family::ZeroZeroS => r.radius <= C_M,
        })
        .cloned()
        .collect();
    if !violations.is_empty() || !(report.margin > 0.0) {
        return Err(ResonanceError::Localization { family, violations });
    }
    Ok(report)
}

/// Roots and margin without judging them.
pub fn resonance_report(params: &PlasmaParams, family: Family) -> ResonanceReport {
    let mut roots = Vec::new();
    let mut margin = f64::INFINITY;
    let radii = scan_radii();
    match family {
        Family::ZeroZero | Family::ZeroS => {
            // (0-0) is stated at eps = 0
            let pe = if family == Family::ZeroZero {
                PlasmaParams {
                    eps: 0.0,
                    ..*params
                }
            } else {
                *params
            };
            for (j, k, p) in pairs(family) {
                let ph = Phase { j, k, p };
                if j == k {
                    continue;
                }
                for r in roots_of(|x| ph.value(&pe, x)) {
                    roots.push(ResonanceRoot {
                        j,
                        k,
                        p,
                        radius: r,
                        residual: ph.value(&pe, r).abs(),
                    });
                }
                let outside = |x: f64| match family {
                    Family::ZeroZero => x < C_M || x > C_M_UPPER,
                    _ => x > C_L,
                };
                for &x in std::iter::once(&0.0).chain(radii.iter()) {
                    if outside(x) {
                        margin = margin.min(ph.value(&pe, x).abs());
                    }
                }
            }
            // equal branches give the constant phase p
            if family == Family::ZeroZero {
                margin = margin.min(1.0);
            }
        }
        Family::ZeroZeroS => {
            for &j in &Branch::KLEIN_GORDON {
                for p in [-1, 1] {
                    for pp in [-1, 1] {
                        for r in roots_of(|x| psi(j, p, pp, params, x)) {
                            roots.push(ResonanceRoot {
                                j,
                                k: j,
                                p: p + pp,
                                radius: r,
                                residual: psi(j, p, pp, params, r).abs(),
                            });
                        }
                        let n = 2001;
                        for i in 0..n {
                            let x = C_M * i as f64 / (n - 1) as f64;
                            margin = margin.min(psi(j, p, pp, params, x).abs());
                        }
                    }
                }
            }
            roots.retain(|r| r.radius <= C_M);
        }
    }
    roots.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    ResonanceReport {
        family,
        eps: params.eps,
        theta_e: params.theta_e,
        roots,
        localization: (C_L, C_M, C_M_UPPER),
        margin,
    }
}

/// Smooth step from 0 (at `a`) to 1 (at `b`) built from `exp(-1/x)`.
pub fn smooth_step(x: f64, a: f64, b: f64) -> f64 {
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    let t = (x - a) / (b - a);
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        g(t) / (g(t) + g(1.0 - t))
    }
}

/// Radial cutoffs `chi_eps`, `chi_L`, `chi_N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    pub c_l: f64,
    pub c_0: f64,
    pub c_1: f64,
    pub c_m: f64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self {
            c_l: C_L,
            c_0: C_0,
            c_1: C_1,
            c_m: C_M,
        }
    }
}

impl Cutoffs {
    /// 1 for `|xi| <= c_0`, `eps` for `|xi| >= c_1`.
    pub fn chi_eps(&self, eps: f64, k: f64) -> f64 {
        1.0 + (eps - 1.0) * smooth_step(k, self.c_0, self.c_1)
    }

    /// 0 for `|xi| <= c_l`, 1 for `|xi| >= c_0`.
    pub fn chi_l(&self, k: f64) -> f64 {
        smooth_step(k, self.c_l, self.c_0)
    }

    /// 1 for `|xi| <= c_1`, 0 for `|xi| >= c_m`.
    pub fn chi_n(&self, k: f64) -> f64 {
        1.0 - smooth_step(k, self.c_1, self.c_m)
    }
}

/// Kind of leading normal-form symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormKind {
    L,
    M,
    N0,
}
