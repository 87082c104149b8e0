//! Experiment configuration, runners and result persistence.
//!
//! A run is described by an [`ExperimentConfig`] (flat `key = value` text with
//! dotted namespaces), produces a [`ResultBundle`] and is written to disk by a
//! single writer together with a `manifest.json` echoing the resolved config.
//! Exit codes: 0 when every check passes, 1 when an assumption check fails,
//! 2 for usage and configuration errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::em_dynamics::{converge, ConvergeConfig, EmError};
use crate::linalg::max_abs;
use crate::model::{ModelError, PlasmaParams, StateVector};
use crate::resonance::{
    locate_resonances, pairs, psi, resonance_report, Branch, Family, Phase, ResonanceError, C_L,
    C_M, C_M_UPPER,
};
use crate::semiclassical::{
    adjoint_study, composition_study, default_eps_list, remainder_study, PeriodicGrid,
    ScalingReport, SemiclassicalError,
};
use crate::spectral::{eigendecompose, spectrum_row, SpectralError};
use crate::transparency::{
    build_symmetrizer, check_nontransparency, check_transparency, symmetrizer_commutator_parts,
    RestPoint, TransparencyError,
};
use crate::wkb::{build_profile, residual_study, WKBProfile, WkbError};
use crate::zakharov::{
    init_from_datum, mass, step, Datum, ZakharovConfig, ZakharovError, ZakharovState,
};
use crate::C64;

/// File magic of binary field dumps.
pub const DUMP_MAGIC: [u8; 16] = *b"ZKL-FIELD-DUMP\0\0";
pub const DUMP_VERSION: u32 = 1;

/// Relative change of the transparency constant tolerated under refinement.
pub const TRANSPARENCY_TOLERANCE: f64 = 0.2;
/// Rayleigh bound on the symmetrizer, `gamma = 2` plus 5%.
pub const GAMMA_BOUND: f64 = 2.1;
/// Minimum fitted order of the eps sweep.
pub const CONVERGE_MIN_ORDER: f64 = 1.6;
/// Minimum gain in residual order per WKB order.
pub const WKB_ORDER_GAIN: f64 = 0.6;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed field dump: {0}")]
    Dump(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Resonance(#[from] ResonanceError),
    #[error(transparent)]
    Transparency(#[from] TransparencyError),
    #[error(transparent)]
    Semiclassical(#[from] SemiclassicalError),
    #[error(transparent)]
    Zakharov(#[from] ZakharovError),
    #[error(transparent)]
    Wkb(#[from] WkbError),
    #[error(transparent)]
    Em(#[from] EmError),
}

impl HarnessError {
    /// 2 for usage, configuration and I/O problems, 1 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. }
            | HarnessError::Invalid { .. }
            | HarnessError::Io { .. }
            | HarnessError::Dump(_)
            | HarnessError::Model(_)
            | HarnessError::Semiclassical(_) => 2,
            HarnessError::Zakharov(ZakharovError::Config(_) | ZakharovError::Length { .. }) => 2,
            HarnessError::Em(EmError::Config(_)) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    Resonances,
    Transparency,
    Zakharov,
    WkbResidual,
    Converge,
    PdoBench,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Spectrum,
        Experiment::Resonances,
        Experiment::Transparency,
        Experiment::Zakharov,
        Experiment::WkbResidual,
        Experiment::Converge,
        Experiment::PdoBench,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Resonances => "resonances",
            Experiment::Transparency => "transparency",
            Experiment::Zakharov => "zakharov",
            Experiment::WkbResidual => "wkb-residual",
            Experiment::Converge => "converge",
            Experiment::PdoBench => "pdo-bench",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub period_factor: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<PeriodicGrid, HarnessError> {
        PeriodicGrid::new(self.dim, self.n, self.period_factor).map_err(|e| HarnessError::Invalid {
            field: "grid".into(),
            message: e.to_string(),
        })
    }
}

/// Resolved configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: PlasmaParams,
    pub eps_list: Vec<f64>,
    pub grid: GridSpec,
    /// Zakharov time step.
    pub dt: f64,
    /// EM time step as a fraction of `eps^2`.
    pub dt_factor: f64,
    pub t_final: f64,
    pub datum: Datum,
    pub order: u8,
    pub s: f64,
    /// Radial samples per direction in transparency sweeps.
    pub radial_points: usize,
    /// Optional Zakharov state dump used as the WKB base state.
    pub input_state: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Spectrum,
            params: PlasmaParams {
                theta_e: 0.35,
                ..PlasmaParams::default()
            },
            eps_list: vec![0.2, 0.1, 0.05],
            grid: GridSpec {
                dim: 1,
                n: 64,
                period_factor: 1.0,
            },
            dt: 1e-4,
            dt_factor: 1.0 / 200.0,
            t_final: 0.1,
            datum: Datum::Modulated,
            order: 2,
            s: 1.0,
            radial_points: 100,
            input_state: None,
            output_dir: PathBuf::from("zkl-out"),
            seed: 0,
        }
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_eps_list(s: &str) -> Result<Vec<f64>, String> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| e.to_string())?;
    if v.is_empty() || v.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err("expected a comma-separated list of values in (0, 1)".into());
    }
    Ok(v)
}

impl ExperimentConfig {
    /// Flat `key = value` lines, one per field.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Ordered `(key, value)` pairs.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("experiment", self.experiment.name().to_string()),
            ("params.eps", format!("{:?}", self.params.eps)),
            ("params.theta_e", format!("{:?}", self.params.theta_e)),
            ("params.alpha", format!("{:?}", self.params.alpha)),
            ("sweep.eps", fmt_list(&self.eps_list)),
            ("grid.dim", self.grid.dim.to_string()),
            ("grid.n", self.grid.n.to_string()),
            ("grid.period", format!("{:?}", self.grid.period_factor)),
            ("run.dt", format!("{:?}", self.dt)),
            ("run.dt_factor", format!("{:?}", self.dt_factor)),
            ("run.t_final", format!("{:?}", self.t_final)),
            ("run.datum", self.datum.name().to_string()),
            ("run.order", self.order.to_string()),
            ("run.s", format!("{:?}", self.s)),
            ("run.radial_points", self.radial_points.to_string()),
        ];
        if let Some(p) = &self.input_state {
            e.push(("input.state", p.display().to_string()));
        }
        e.push(("output.dir", self.output_dir.display().to_string()));
        e.push(("seed", self.seed.to_string()));
        e
    }

    /// Parses config text on top of the defaults. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| HarnessError::Parse {
                line,
                field: body.to_string(),
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(prev) = seen.insert(key.to_string(), line) {
                return Err(HarnessError::Parse {
                    line,
                    field: key.into(),
                    message: format!("duplicate key (first set on line {prev})"),
                });
            }
            cfg.set(key, value).map_err(|message| HarnessError::Parse {
                line,
                field: key.into(),
                message,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>()
                .map_err(|e| format!("cannot parse `{v}`: {e}"))
        }
        match key {
            "experiment" => {
                self.experiment = Experiment::parse(value)
                    .ok_or_else(|| format!("unknown experiment `{value}`"))?
            }
            "params.eps" => self.params.eps = num(value)?,
            "params.theta_e" => self.params.theta_e = num(value)?,
            "params.alpha" => self.params.alpha = num(value)?,
            "sweep.eps" => self.eps_list = parse_eps_list(value)?,
            "grid.dim" => self.grid.dim = num(value)?,
            "grid.n" => self.grid.n = num(value)?,
            "grid.period" => self.grid.period_factor = num(value)?,
            "run.dt" => self.dt = num(value)?,
            "run.dt_factor" => self.dt_factor = num(value)?,
            "run.t_final" => self.t_final = num(value)?,
            "run.datum" => {
                self.datum =
                    Datum::parse(value).ok_or_else(|| format!("unknown datum `{value}`"))?
            }
            "run.order" => self.order = num(value)?,
            "run.s" => self.s = num(value)?,
            "run.radial_points" => self.radial_points = num(value)?,
            "input.state" => self.input_state = Some(PathBuf::from(value)),
            "output.dir" => self.output_dir = PathBuf::from(value),
            "seed" => self.seed = num(value)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.params.validate()?;
        let invalid = |field: &str, message: &str| {
            Err(HarnessError::Invalid {
                field: field.into(),
                message: message.into(),
            })
        };
        if !(self.dt > 0.0) {
            return invalid("run.dt", "must be positive");
        }
        if !(self.dt_factor > 0.0) {
            return invalid("run.dt_factor", "must be positive");
        }
        if !(self.t_final >= 0.0) {
            return invalid("run.t_final", "must be non-negative");
        }
        if self.order > 2 {
            return invalid("run.order", "WKB orders 0, 1 and 2 are available");
        }
        if self.radial_points == 0 {
            return invalid("run.radial_points", "must be positive");
        }
        self.grid.build()?;
        Ok(())
    }
}

/// Outcome of one check inside a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Plot data: one two-column file per curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (x, y) in &self.points {
            let _ = writeln!(s, "{x:.12e} {y:.12e}");
        }
        s
    }
}

/// Binary field dump: magic, version, header `{dims, n, eps, t, components, len}`, then values.
/// Every number is little-endian.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub dims: u32,
    pub n: u32,
    pub eps: f64,
    pub t: f64,
    pub components: Vec<Vec<f64>>,
}

impl FieldDump {
    pub fn to_bytes(&self) -> Vec<u8> {
        let len = self.components.first().map_or(0, |c| c.len());
        let mut b = Vec::with_capacity(64 + 8 * len * self.components.len());
        b.extend_from_slice(&DUMP_MAGIC);
        b.extend_from_slice(&DUMP_VERSION.to_le_bytes());
        b.extend_from_slice(&self.dims.to_le_bytes());
        b.extend_from_slice(&self.n.to_le_bytes());
        b.extend_from_slice(&self.eps.to_le_bytes());
        b.extend_from_slice(&self.t.to_le_bytes());
        b.extend_from_slice(&(self.components.len() as u32).to_le_bytes());
        b.extend_from_slice(&(len as u64).to_le_bytes());
        for c in &self.components {
            for v in c {
                b.extend_from_slice(&v.to_le_bytes());
            }
        }
        b
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, HarnessError> {
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8], HarnessError> {
            let s = bytes
                .get(pos..pos + n)
                .ok_or_else(|| HarnessError::Dump(format!("truncated at byte {pos}")))?;
            pos += n;
            Ok(s)
        };
        if take(16)? != DUMP_MAGIC {
            return Err(HarnessError::Dump("bad magic".into()));
        }
        let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().unwrap());
        let f64_at = |s: &[u8]| f64::from_le_bytes(s.try_into().unwrap());
        let version = u32_at(take(4)?);
        if version != DUMP_VERSION {
            return Err(HarnessError::Dump(format!("unsupported version {version}")));
        }
        let dims = u32_at(take(4)?);
        let n = u32_at(take(4)?);
        let eps = f64_at(take(8)?);
        let t = f64_at(take(8)?);
        let ncomp = u32_at(take(4)?) as usize;
        let len = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let mut components = Vec::with_capacity(ncomp);
        for _ in 0..ncomp {
            let raw = take(8 * len)?;
            components.push(raw.chunks_exact(8).map(f64_at).collect());
        }
        if pos != bytes.len() {
            return Err(HarnessError::Dump(format!(
                "{} trailing bytes",
                bytes.len() - pos
            )));
        }
        Ok(Self {
            dims,
            n,
            eps,
            t,
            components,
        })
    }

    /// Components `Re E_1, Im E_1, .., Re E_3, Im E_3, n, n_t`.
    pub fn from_zakharov(grid: &PeriodicGrid, eps: f64, st: &ZakharovState) -> Self {
        let mut components = Vec::with_capacity(8);
        for c in &st.e {
            components.push(c.iter().map(|z| z.re).collect());
            components.push(c.iter().map(|z| z.im).collect());
        }
        components.push(st.n.clone());
        components.push(st.nt.clone());
        Self {
            dims: grid.dim as u32,
            n: grid.n as u32,
            eps,
            t: st.t,
            components,
        }
    }

    pub fn to_zakharov(&self) -> Result<ZakharovState, HarnessError> {
        if self.components.len() != 8 {
            return Err(HarnessError::Dump(format!(
                "a Zakharov state has 8 components, found {}",
                self.components.len()
            )));
        }
        let c = &self.components;
        let cplx = |k: usize| -> Vec<C64> {
            c[2 * k]
                .iter()
                .zip(&c[2 * k + 1])
                .map(|(&a, &b)| C64::new(a, b))
                .collect()
        };
        Ok(ZakharovState {
            e: [cplx(0), cplx(1), cplx(2)],
            n: c[6].clone(),
            nt: c[7].clone(),
            t: self.t,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_bytes()).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        Self::from_bytes(&std::fs::read(path).map_err(io_err(path))?)
    }
}

/// Tables, summary, curves and dumps of one run.
#[derive(Clone, Debug, Default)]
pub struct ResultBundle {
    pub experiment: String,
    pub csv: Vec<(String, String)>,
    pub summary: Value,
    pub curves: Vec<Curve>,
    pub dumps: Vec<(String, FieldDump)>,
    pub checks: Vec<Check>,
}

impl ResultBundle {
    fn new(e: Experiment) -> Self {
        Self {
            experiment: e.name().into(),
            summary: json!({}),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Human-readable check lines.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        s
    }

    /// Writes every artifact and the manifest into `dir`; returns the written paths.
    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut files = Vec::new();
        let put =
            |files: &mut Vec<PathBuf>, name: &str, bytes: &[u8]| -> Result<(), HarnessError> {
                let path = dir.join(name);
                std::fs::write(&path, bytes).map_err(io_err(&path))?;
                files.push(path);
                Ok(())
            };
        for (name, text) in &self.csv {
            put(&mut files, name, text.as_bytes())?;
        }
        put(
            &mut files,
            "summary.json",
            serde_json::to_string_pretty(&self.summary)
                .unwrap()
                .as_bytes(),
        )?;
        for c in &self.curves {
            put(
                &mut files,
                &format!("{}.dat", c.name),
                c.to_text().as_bytes(),
            )?;
        }
        for (name, d) in &self.dumps {
            put(&mut files, name, &d.to_bytes())?;
        }
        let manifest = json!({
            "tool": "zkl",
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": self.experiment,
            "config": cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
            "files": files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            "exit_code": self.exit_code(),
        });
        put(
            &mut files,
            "manifest.json",
            serde_json::to_string_pretty(&manifest).unwrap().as_bytes(),
        )?;
        Ok(files)
    }
}

/// Dispatches to the experiment runner.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Spectrum => run_spectrum(cfg),
        Experiment::Resonances => run_resonances(cfg),
        Experiment::Transparency => run_transparency(cfg),
        Experiment::Zakharov => run_zakharov(cfg),
        Experiment::WkbResidual => run_wkb_residual(cfg),
        Experiment::Converge => run_converge(cfg),
        Experiment::PdoBench => run_pdo_bench(cfg),
    }
}

const SPECTRUM_POINTS: usize = 201;
const SPECTRUM_MAX: f64 = 10.0;

fn run_spectrum(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let p = &cfg.params;
    let mut csv = String::from("xi,index,lambda,class\n");
    let mut curves: Vec<Curve> = (0..crate::model::DIM)
        .map(|i| Curve {
            name: format!("spectrum_mode_{i:02}"),
            points: Vec::new(),
        })
        .collect();
    let (mut max_slow, mut min_fast) = (0.0f64, f64::INFINITY);
    for i in 0..SPECTRUM_POINTS {
        let k = SPECTRUM_MAX * i as f64 / (SPECTRUM_POINTS - 1) as f64;
        let xi = Vector3::new(0.0, 0.0, k);
        let (values, classes) = spectrum_row(p, &StateVector::zeros(), &xi)?;
        for (m, (v, c)) in values.iter().zip(&classes).enumerate() {
            let _ = writeln!(csv, "{k:.6},{m},{v:.12e},{c:?}");
            curves[m].points.push((k, *v));
            if *c == crate::spectral::ModeClass::KleinGordon {
                min_fast = min_fast.min(v.abs());
            } else {
                max_slow = max_slow.max(v.abs());
            }
        }
    }
    b.csv.push(("spectrum.csv".into(), csv));
    b.curves = curves;
    b.summary = json!({"max_slow": max_slow, "min_fast": min_fast});
    b.checks.push(Check::new(
        "spectral gap",
        max_slow < min_fast,
        format!("max slow |lambda| {max_slow:.4e} < min Klein-Gordon |lambda| {min_fast:.4e}"),
    ));
    Ok(b)
}

fn phase_curve(name: String, f: impl Fn(f64) -> f64, r_max: f64) -> Curve {
    let n = 400;
    Curve {
        name,
        points: (0..=n)
            .map(|i| {
                let r = r_max * i as f64 / n as f64;
                (r, f(r))
            })
            .collect(),
    }
}

fn run_resonances(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let p = &cfg.params;
    let mut csv = String::from("family,j,k,p,radius,residual\n");
    let mut families = Vec::new();
    for family in [Family::ZeroZero, Family::ZeroS, Family::ZeroZeroS] {
        let rep = resonance_report(p, family);
        for r in &rep.roots {
            let _ = writeln!(
                csv,
                "{},{},{},{},{:.12e},{:.3e}",
                family.label(),
                r.j.name(),
                r.k.name(),
                r.p,
                r.radius,
                r.residual
            );
        }
        let tag = family.label().replace('-', "");
        match family {
            Family::ZeroZero | Family::ZeroS => {
                let pe = if family == Family::ZeroZero {
                    PlasmaParams { eps: 0.0, ..*p }
                } else {
                    *p
                };
                let r_max = if family == Family::ZeroZero {
                    2.0 * C_M_UPPER
                } else {
                    4.0 * C_L
                };
                for (j, k, q) in pairs(family) {
                    if j == k || !rep.roots.iter().any(|r| r.j == j && r.k == k && r.p == q) {
                        continue;
                    }
                    let ph = Phase { j, k, p: q };
                    b.curves.push(phase_curve(
                        format!("phase_{tag}_{}_{}_{}", j.name(), k.name(), q)
                            .replace('+', "p")
                            .replace('-', "m"),
                        |r| ph.value(&pe, r),
                        r_max,
                    ));
                }
            }
            Family::ZeroZeroS => {
                for j in [Branch::LambdaPlus, Branch::MuPlus] {
                    b.curves.push(phase_curve(
                        format!("phase_{tag}_{}", j.name()).replace('+', "p"),
                        |r| psi(j, 1, 1, p, r),
                        2.0 * C_M,
                    ));
                }
            }
        }
        let located = locate_resonances(p, family);
        let radii: Vec<f64> = rep.roots.iter().map(|r| r.radius).collect();
        let window = match family {
            Family::ZeroZero => format!("[{C_M}, {C_M_UPPER}]"),
            Family::ZeroS => format!("|xi| <= {C_L}"),
            Family::ZeroZeroS => format!("none on |xi| <= {C_M}"),
        };
        b.checks.push(Check::new(
            &format!("resonance localization ({})", family.label()),
            located.is_ok(),
            format!(
                "roots {radii:.6?} against {window}, margin {:.4}",
                rep.margin
            ),
        ));
        families.push(json!({
            "family": family.label(),
            "roots": radii,
            "margin": rep.margin,
            "localized": located.is_ok(),
        }));
    }
    b.csv.push(("resonances.csv".into(), csv));
    b.summary = json!({"eps": p.eps, "theta_e": p.theta_e, "families": families});
    Ok(b)
}

/// Zakharov state after `steps` steps from `datum`, and the matching configuration.
pub fn reference_state(
    grid: &PeriodicGrid,
    params: &PlasmaParams,
    datum: Datum,
    dt: f64,
    steps: usize,
) -> Result<(ZakharovConfig, ZakharovState), HarnessError> {
    let zc = ZakharovConfig::new(grid.clone(), dt, params)?;
    let mut st = init_from_datum(grid, &datum.envelope(grid))?;
    for _ in 0..steps {
        st = step(&st, &zc)?;
    }
    Ok((zc, st))
}

/// Order-2 profile on a 1D grid of `n` points built on the modulated datum evolved to `t = 0.05`.
pub fn reference_profile(
    params: &PlasmaParams,
    n: usize,
) -> Result<(PeriodicGrid, WKBProfile), HarnessError> {
    let grid = PeriodicGrid::new(1, n, 1.0)?;
    let (zc, st) = reference_state(&grid, params, Datum::Modulated, 1e-3, 50)?;
    let prof = build_profile(&zc, &st, params, 2)?;
    Ok((grid, prof))
}

/// Sampling directions in frequency space: along the grid axis, along the
/// envelope polarization and an oblique one.
pub const XI_DIRECTIONS: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8]];

/// `nr` radii on `(0, r_max]` along each direction, plus `extra` radii.
pub fn radial_grid(nr: usize, r_max: f64, extra: &[f64]) -> Vec<Vector3<f64>> {
    let mut out = Vec::new();
    for d in XI_DIRECTIONS {
        let d = Vector3::from(d);
        for i in 1..=nr {
            out.push(d * (r_max * i as f64 / nr as f64));
        }
        for &r in extra {
            if r > 0.0 && r <= r_max {
                out.push(d * r);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransparencyRow {
    pub eps: f64,
    pub c: f64,
    pub c_b: f64,
    pub c_d: f64,
    pub eta: f64,
    pub witness_xi: [f64; 3],
    pub witness_phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransparencyStudy {
    pub rows: Vec<TransparencyRow>,
    /// Relative change of `C` at the first eps when the radial grid is doubled.
    pub refinement_change: f64,
    /// Relative changes of `C` between consecutive eps.
    pub halving_changes: Vec<f64>,
}

impl TransparencyStudy {
    pub fn stable(&self) -> bool {
        self.refinement_change.abs() <= TRANSPARENCY_TOLERANCE
            && self
                .halving_changes
                .iter()
                .all(|c| c.abs() <= TRANSPARENCY_TOLERANCE)
    }

    pub fn min_eta(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.eta)
            .fold(f64::INFINITY, f64::min)
    }
}

fn transparency_fit(
    params: &PlasmaParams,
    grid: &PeriodicGrid,
    prof: &WKBProfile,
    eps: f64,
    nr: usize,
) -> Result<TransparencyRow, HarnessError> {
    let p = params.with_eps(eps)?;
    let prof = prof.with_eps(eps);
    let snaps: Vec<_> = [0, grid.len() / 4]
        .iter()
        .map(|&j| prof.snapshot(grid, j))
        .collect();
    // the (0-s) roots sit inside |xi| <= c_l; sample them exactly
    let roots: Vec<f64> = resonance_report(&p, Family::ZeroS)
        .roots
        .iter()
        .map(|r| r.radius)
        .collect();
    let xi = radial_grid(nr, C_L, &roots);
    let fit = check_transparency(&p, &snaps, &xi)?;
    let near_origin = radial_grid(4, 0.05, &[]);
    let eta = snaps
        .iter()
        .map(|s| check_nontransparency(&p, s, &near_origin))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let w = fit.witness_c.as_ref();
    Ok(TransparencyRow {
        eps,
        c: fit.c,
        c_b: fit.c_b,
        c_d: fit.c_d,
        eta,
        witness_xi: w.map_or([0.0; 3], |w| w.xi),
        witness_phase: w.map_or(0.0, |w| w.phase),
    })
}

/// Transparency constants over `eps_list`, with a radial refinement at the first eps.
pub fn transparency_study(
    params: &PlasmaParams,
    eps_list: &[f64],
    nr: usize,
) -> Result<TransparencyStudy, HarnessError> {
    let (grid, prof) = reference_profile(params, 64)?;
    let (rows, fine) = rayon::join(
        || {
            eps_list
                .par_iter()
                .map(|&e| transparency_fit(params, &grid, &prof, e, nr))
                .collect::<Result<Vec<_>, _>>()
        },
        || transparency_fit(params, &grid, &prof, eps_list[0], 2 * nr),
    );
    let (rows, fine) = (rows?, fine?);
    let halving_changes = rows.windows(2).map(|w| w[1].c / w[0].c - 1.0).collect();
    Ok(TransparencyStudy {
        refinement_change: fine.c / rows[0].c - 1.0,
        halving_changes,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizerStudy {
    /// Worst Rayleigh constant `max(lambda_max(S), 1 / lambda_min(S))`.
    pub gamma: f64,
    pub gamma_witness: [f64; 3],
    /// `sup |S E + (S E)^*| / eps` at each eps.
    pub commutators: Vec<f64>,
    /// The same restricted to blocks inside one Klein-Gordon family.
    pub same_family: Vec<f64>,
    /// The same restricted to the slow blocks off `e_0`.
    pub slow: Vec<f64>,
    pub eps_values: Vec<f64>,
}

impl SymmetrizerStudy {
    pub fn non_increasing(&self) -> bool {
        self.commutators
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9))
    }
}

/// Rayleigh bounds on `|xi| <= 1` and the commutator sweep over `eps_list`.
pub fn symmetrizer_study(
    params: &PlasmaParams,
    eps_list: &[f64],
    nr: usize,
) -> Result<SymmetrizerStudy, HarnessError> {
    let (grid, prof) = reference_profile(params, 64)?;
    let xi = radial_grid(nr, 1.0, &[]);
    let mut gamma = 0.0f64;
    let mut gamma_witness = [0.0; 3];
    for x in &xi {
        let s = build_symmetrizer(params, x)?;
        if s.gamma > gamma {
            gamma = s.gamma;
            gamma_witness = [x.x, x.y, x.z];
        }
    }
    let per_eps = eps_list
        .par_iter()
        .map(|&eps| -> Result<[f64; 3], HarnessError> {
            let p = params.with_eps(eps)?;
            let (u, grad) = prof.with_eps(eps).snapshot(&grid, 0).total();
            let mut worst = [0.0f64; 3];
            for x in &xi {
                let s = build_symmetrizer(&p, x)?;
                let rest = RestPoint::new(&p, x)?;
                let c = symmetrizer_commutator_parts(&p, &s, &rest, &u, &grad);
                worst[0] = worst[0].max(c.full);
                worst[1] = worst[1].max(c.same_family);
                worst[2] = worst[2].max(c.slow);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let part = |i: usize| per_eps.iter().map(|w| w[i]).collect::<Vec<_>>();
    let (commutators, same_family, slow) = (part(0), part(1), part(2));
    Ok(SymmetrizerStudy {
        gamma,
        gamma_witness,
        commutators,
        same_family,
        slow,
        eps_values: eps_list.to_vec(),
    })
}

fn transparency_checks(study: &TransparencyStudy) -> Vec<Check> {
    let cs: Vec<f64> = study.rows.iter().map(|r| r.c).collect();
    vec![
        Check::new(
            "transparency",
            study.stable(),
            format!(
                "C {cs:.4?}; relative change under eps-halving {:.3?}, under radial refinement {:.3} (tolerance {TRANSPARENCY_TOLERANCE})",
                study.halving_changes, study.refinement_change
            ),
        ),
        Check::new(
            "non-transparency",
            study.min_eta() > 0.0,
            format!("margin eta {:.4e} near the limiting (0-s) resonance", study.min_eta()),
        ),
    ]
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|c| format!("{c:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn symmetrizer_checks(study: &SymmetrizerStudy) -> Vec<Check> {
    vec![
        Check::new(
            "symmetrizer Rayleigh bound",
            study.gamma <= GAMMA_BOUND,
            format!("gamma {:.4} at xi {:?} (bound {GAMMA_BOUND})", study.gamma, study.gamma_witness),
        ),
        Check::new(
            "symmetrizer commutator",
            study.non_increasing(),
            format!(
                "|S E + (S E)^*| / eps = [{}] at eps {:?} (same-family blocks [{}], slow blocks [{}])",
                sci(&study.commutators),
                study.eps_values,
                sci(&study.same_family),
                sci(&study.slow)
            ),
        ),
    ]
}

/// The eps values of the transparency and symmetrizer sweeps.
pub const TRANSPARENCY_EPS: [f64; 3] = [0.1, 0.05, 0.025];

fn run_transparency(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let study = transparency_study(&cfg.params, &TRANSPARENCY_EPS, cfg.radial_points)?;
    let sym = symmetrizer_study(&cfg.params, &TRANSPARENCY_EPS, cfg.radial_points.min(40))?;
    let mut csv =
        String::from("eps,C,C_B,C_D,eta,witness_xi1,witness_xi2,witness_xi3,witness_phase\n");
    for r in &study.rows {
        let _ = writeln!(
            csv,
            "{},{:.8e},{:.8e},{:.8e},{:.8e},{:.6},{:.6},{:.6},{:.6e}",
            r.eps,
            r.c,
            r.c_b,
            r.c_d,
            r.eta,
            r.witness_xi[0],
            r.witness_xi[1],
            r.witness_xi[2],
            r.witness_phase
        );
    }
    b.csv.push(("transparency.csv".into(), csv));
    b.curves.push(Curve {
        name: "transparency_C".into(),
        points: study.rows.iter().map(|r| (r.eps, r.c)).collect(),
    });
    b.summary = json!({
        "C": study.rows.iter().map(|r| r.c).collect::<Vec<_>>(),
        "C_B": study.rows.iter().map(|r| r.c_b).collect::<Vec<_>>(),
        "eta": study.min_eta(),
        "gamma": sym.gamma,
        "witnesses": study.rows.iter().map(|r| json!({"eps": r.eps, "xi": r.witness_xi, "phase": r.witness_phase})).collect::<Vec<_>>(),
    });
    b.checks.extend(transparency_checks(&study));
    b.checks.extend(symmetrizer_checks(&sym));
    Ok(b)
}

fn run_zakharov(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let grid = cfg.grid.build()?;
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let zc = ZakharovConfig::new(grid.clone(), cfg.dt, &cfg.params)?;
    let mut st = init_from_datum(&grid, &cfg.datum.envelope(&grid))?;
    let m0 = mass(&grid, &st);
    let every = (steps / 100).max(1);
    let mut csv = String::from("t,mass,max_E,max_n\n");
    let mut drift = Curve {
        name: "zakharov_mass_drift".into(),
        points: Vec::new(),
    };
    let mut max_drift = 0.0f64;
    for k in 0..=steps {
        if k > 0 {
            st = step(&st, &zc)?;
        }
        let m = mass(&grid, &st);
        max_drift = max_drift.max((m - m0).abs() / m0);
        if k % every == 0 || k == steps {
            let _ = writeln!(
                csv,
                "{:.8e},{:.15e},{:.12e},{:.12e}",
                st.t,
                m,
                st.max_e(),
                st.max_n()
            );
            drift.points.push((st.t, m / m0 - 1.0));
        }
    }
    let x: Vec<f64> = (0..grid.len()).map(|j| grid.point(j)[2]).collect();
    b.curves.push(drift);
    b.curves.push(Curve {
        name: "zakharov_intensity".into(),
        points: x.iter().copied().zip(st.intensity()).collect(),
    });
    b.curves.push(Curve {
        name: "zakharov_density".into(),
        points: x.iter().copied().zip(st.n.iter().copied()).collect(),
    });
    b.csv.push(("zakharov.csv".into(), csv));
    b.dumps.push((
        "zakharov_state.bin".into(),
        FieldDump::from_zakharov(&grid, cfg.params.eps, &st),
    ));
    let rate = if st.t > 0.0 { max_drift / st.t } else { 0.0 };
    b.summary = json!({"t": st.t, "mass": m0, "relative_mass_drift": max_drift, "drift_per_unit_time": rate});
    b.checks.push(Check::new(
        "mass conservation",
        rate < 1e-8,
        format!("relative drift {max_drift:.3e} over t = {:.4}", st.t),
    ));
    Ok(b)
}

fn run_wkb_residual(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let grid = cfg.grid.build()?;
    let (zc, st) = match &cfg.input_state {
        Some(path) => {
            let dump = FieldDump::read(path)?;
            if dump.n as usize != grid.n || dump.dims as usize != grid.dim {
                return Err(HarnessError::Invalid {
                    field: "input.state".into(),
                    message: format!(
                        "dump grid {}^{} differs from grid {}^{}",
                        dump.n, dump.dims, grid.n, grid.dim
                    ),
                });
            }
            (
                ZakharovConfig::new(grid.clone(), cfg.dt, &cfg.params)?,
                dump.to_zakharov()?,
            )
        }
        None => reference_state(
            &grid,
            &cfg.params,
            cfg.datum,
            cfg.dt,
            (cfg.t_final / cfg.dt).round() as usize,
        )?,
    };
    let mut csv = String::from("order,eps,residual_norm,fitted_order\n");
    let mut orders = Vec::new();
    for order in 0..=cfg.order {
        let r = residual_study(&zc, &st, &cfg.params, &cfg.eps_list, cfg.s, order)?;
        for (e, v) in r.eps_values.iter().zip(&r.residual_norms) {
            let _ = writeln!(csv, "{order},{e},{v:.10e},{:.6}", r.fitted_order);
        }
        b.curves.push(Curve {
            name: format!("wkb_residual_order{order}"),
            points: r
                .eps_values
                .iter()
                .copied()
                .zip(r.residual_norms.iter().copied())
                .collect(),
        });
        orders.push(r.fitted_order);
    }
    b.csv.push(("wkb_residual.csv".into(), csv));
    b.summary = json!({"fitted_orders": orders, "t": st.t});
    let gains: Vec<f64> = orders.windows(2).map(|w| w[1] - w[0]).collect();
    b.checks.push(Check::new(
        "wkb residual order gain",
        gains.iter().all(|g| *g >= WKB_ORDER_GAIN),
        format!("fitted orders {orders:.3?}, gains {gains:.3?} (minimum {WKB_ORDER_GAIN})"),
    ));
    Ok(b)
}

pub fn converge_config(cfg: &ExperimentConfig) -> ConvergeConfig {
    ConvergeConfig {
        eps_list: cfg.eps_list.clone(),
        grid_n: cfg.grid.n,
        period_factor: cfg.grid.period_factor,
        t_final: cfg.t_final,
        order: cfg.order,
        s: cfg.s,
        theta_e: cfg.params.theta_e,
        alpha: cfg.params.alpha,
        datum: cfg.datum.name().into(),
        dt_factor: cfg.dt_factor,
        zakharov_dt: cfg.dt,
        outputs: 10,
    }
}

fn run_converge(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    if cfg.grid.dim != 1 {
        return Err(HarnessError::Invalid {
            field: "grid.dim".into(),
            message: "the eps sweep runs on 1D grids".into(),
        });
    }
    let rep = converge(&converge_config(cfg))?;
    b.csv.push(("converge.csv".into(), rep.to_csv()));
    b.summary = serde_json::from_str(&rep.to_json()).unwrap_or(Value::Null);
    b.curves.push(Curve {
        name: "converge_err_E".into(),
        points: rep.rows.iter().map(|r| (r.eps, r.sup_err_e)).collect(),
    });
    b.curves.push(Curve {
        name: "converge_err_n".into(),
        points: rep.rows.iter().map(|r| (r.eps, r.sup_err_n)).collect(),
    });
    b.checks.push(Check::new(
        "asymptotic convergence order",
        rep.fitted_order >= CONVERGE_MIN_ORDER,
        format!(
            "fitted order {:.3} (E {:.3}, n {:.3}); minimum {CONVERGE_MIN_ORDER}",
            rep.fitted_order, rep.fitted_order_e, rep.fitted_order_n
        ),
    ));
    Ok(b)
}

/// Points of the one-dimensional paradifferential benchmark grids.
pub const PDO_POINTS: usize = 8192;
/// Period factor of the composition and adjoint grids.
pub const PDO_CALCULUS_PERIOD: f64 = 32.0;

/// Remainder, composition and adjoint scaling on the benchmark grids.
pub fn pdo_studies(s: f64) -> Result<[ScalingReport; 3], HarnessError> {
    let eps = default_eps_list();
    let g = PeriodicGrid::new(1, PDO_POINTS, 1.0)?;
    let rem = remainder_study(&g, &eps, s)?;
    let g = PeriodicGrid::new(1, PDO_POINTS, PDO_CALCULUS_PERIOD)?;
    Ok([rem, composition_study(&g, &eps)?, adjoint_study(&g, &eps)?])
}

fn run_pdo_bench(cfg: &ExperimentConfig) -> Result<ResultBundle, HarnessError> {
    let mut b = ResultBundle::new(cfg.experiment);
    let [rem, comp, adj] = pdo_studies(cfg.s)?;
    let target = cfg.s - 0.5;
    for (name, r) in [
        ("remainder", &rem),
        ("composition", &comp),
        ("adjoint", &adj),
    ] {
        b.csv.push((format!("pdo_{name}.csv"), r.to_csv()));
        b.curves.push(Curve {
            name: format!("pdo_{name}"),
            points: r.samples.iter().map(|x| (x.eps, x.measured)).collect(),
        });
    }
    b.summary = json!({
        "remainder_slope": rem.fitted_slope,
        "composition_slope": comp.fitted_slope,
        "adjoint_slope": adj.fitted_slope,
    });
    b.checks.push(Check::new(
        "remainder exponent",
        (rem.fitted_slope - target).abs() <= 0.5,
        format!("slope {:.3}, expected {target} +- 0.5", rem.fitted_slope),
    ));
    b.checks.push(Check::new(
        "composition defect",
        (comp.fitted_slope - 1.0).abs() <= 0.3,
        format!("slope {:.3}, expected 1 +- 0.3", comp.fitted_slope),
    ));
    b.checks.push(Check::new(
        "adjoint defect",
        adj.fitted_slope >= 0.8,
        format!("slope {:.3}, expected >= 0.8", adj.fitted_slope),
    ));
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct AggregateReport {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl AggregateReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let _ = writeln!(s, "{} checks, {:.1} s", self.checks.len(), self.seconds);
        s
    }
}

/// Spectral gap and reconstruction over random `(eps, u, xi)` with `eps <= 0.1`,
/// `|eps u| <= 0.1`, `|xi| <= 10`; the witness is the first failing sample.
pub fn gap_check(
    theta_e: f64,
    alpha: f64,
    samples: usize,
    seed: u64,
) -> Result<Check, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let eps: f64 = rng.gen_range(0.01..=0.1);
        let p = PlasmaParams::new(eps, theta_e, alpha)?;
        let mut u = StateVector::zeros();
        for c in u.0.iter_mut() {
            *c = rng.gen_range(-1.0..1.0);
        }
        let u = u.scaled(rng.gen_range(0.0..1.0) * 0.1 / (eps * u.norm()));
        let dir = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let xi = dir.normalize() * rng.gen_range(0.0..10.0);
        match eigendecompose(&p, &u, &xi) {
            Ok(d) => {
                let m = crate::model::assemble_symbol(&p, &u, &xi).entries;
                let a = m * C64::new(0.0, 1.0);
                worst = worst.max(max_abs(&(a - d.reconstruct())));
            }
            Err(e) => {
                return Ok(Check::new(
                    "hyperbolicity: spectral gap",
                    false,
                    format!("witness {e}"),
                ));
            }
        }
    }
    Ok(Check::new(
        "hyperbolicity: spectral gap",
        worst < 1e-9,
        format!("{samples} samples separated; reconstruction error {worst:.2e}"),
    ))
}

/// Assumption audit: hyperbolicity, resonances, transparency, symmetrizability.
pub fn verify_all(
    mode: VerifyMode,
    params: &PlasmaParams,
    seed: u64,
) -> Result<AggregateReport, HarnessError> {
    let start = Instant::now();
    params.validate()?;
    let (samples, nr) = match mode {
        VerifyMode::Quick => (200, 30),
        VerifyMode::Full => (1000, 100),
    };
    let mut checks = vec![gap_check(params.theta_e, params.alpha, samples, seed)?];
    for family in [Family::ZeroZero, Family::ZeroS, Family::ZeroZeroS] {
        let rep = resonance_report(params, family);
        let radii: Vec<f64> = rep.roots.iter().map(|r| r.radius).collect();
        let ok = locate_resonances(params, family).is_ok();
        checks.push(Check::new(
            &format!("resonances ({})", family.label()),
            ok,
            format!("roots at |xi| = {radii:.4?}, margin {:.4}", rep.margin),
        ));
    }
    checks.extend(transparency_checks(&transparency_study(
        params,
        &TRANSPARENCY_EPS,
        nr,
    )?));
    checks.extend(symmetrizer_checks(&symmetrizer_study(
        params,
        &TRANSPARENCY_EPS,
        nr.min(40),
    )?));
    Ok(AggregateReport {
        checks,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut c = ExperimentConfig::default();
        c.experiment = Experiment::Converge;
        c.eps_list = vec![0.3, 0.125, 1.0 / 3.0];
        c.params.alpha = 0.123456789012345;
        c.input_state = Some("state.bin".into());
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn parse_reports_line_and_field() {
        let err = ExperimentConfig::parse("experiment = spectrum\n\ngrid.n = sixty\n").unwrap_err();
        match err {
            HarnessError::Parse { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "grid.n");
            }
            e => panic!("{e}"),
        }
        assert_eq!(err_code("nonsense"), 2);
        assert_eq!(err_code("params.eps = 0"), 2);
    }

    fn err_code(text: &str) -> i32 {
        ExperimentConfig::parse(text).unwrap_err().exit_code()
    }

    #[test]
    fn dump_round_trip() {
        let d = FieldDump {
            dims: 1,
            n: 4,
            eps: 0.1,
            t: 0.25,
            components: vec![vec![1.0, -2.0, 3.5, 0.0], vec![0.0; 4]],
        };
        let bytes = d.to_bytes();
        assert_eq!(&bytes[..16], &DUMP_MAGIC);
        assert_eq!(FieldDump::from_bytes(&bytes).unwrap(), d);
        assert!(FieldDump::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
