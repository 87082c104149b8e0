//! `zkl`: command-line front end for the experiment harness.
//!
//! `zkl <subcommand> [flags] [--config PATH]`. Flags override the config file,
//! which overrides the defaults. `ZKL_THREADS` caps the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zkl_core::harness::{self, Experiment, ExperimentConfig, HarnessError, VerifyMode};

#[derive(Parser)]
#[command(name = "zkl", version, about = "Euler-Maxwell / Zakharov experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic variety along a frequency ray.
    Spectrum(Common),
    /// Resonance roots and localization of the three families.
    Resonances(Common),
    /// Transparency constants, non-transparency margin and symmetrizer bounds.
    Transparency(Common),
    /// Split-step Zakharov run with mass monitor and final state dump.
    Zakharov(Common),
    /// Residual orders of the WKB profiles over an eps sweep.
    WkbResidual(Common),
    /// Full-system eps sweep against the Zakharov prediction.
    Converge(Common),
    /// Paradifferential remainder, composition and adjoint scaling.
    PdoBench(Common),
    /// Assumption audit at quick or full scale.
    VerifyAll {
        #[arg(value_enum, default_value = "quick")]
        mode: Mode,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the experiment named on the command line or in the config.
    Run {
        /// Experiment name; defaults to the config's `experiment` key.
        experiment: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Quick,
    Full,
}

#[derive(Args, Default)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "theta-e")]
    theta_e: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated eps sweep.
    #[arg(long = "eps-list")]
    eps_list: Option<String>,
    /// Points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "dt-factor")]
    dt_factor: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    datum: Option<String>,
    /// WKB order.
    #[arg(long)]
    order: Option<u8>,
    /// Norm index.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long = "radial-points")]
    radial_points: Option<usize>,
    /// Zakharov state dump used by wkb-residual.
    #[arg(long = "input-state")]
    input_state: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn resolve(&self, experiment: Option<Experiment>) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })?;
                ExperimentConfig::parse(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(e) = experiment {
            cfg.experiment = e;
        }
        let flags: [(&str, Option<String>); 17] = [
            ("params.eps", self.eps.map(|v| v.to_string())),
            ("params.theta_e", self.theta_e.map(|v| v.to_string())),
            ("params.alpha", self.alpha.map(|v| v.to_string())),
            ("sweep.eps", self.eps_list.clone()),
            ("grid.n", self.grid.map(|v| v.to_string())),
            ("grid.dim", self.dim.map(|v| v.to_string())),
            ("grid.period", self.period.map(|v| v.to_string())),
            ("run.dt", self.dt.map(|v| v.to_string())),
            ("run.dt_factor", self.dt_factor.map(|v| v.to_string())),
            ("run.t_final", self.t_final.map(|v| v.to_string())),
            ("run.datum", self.datum.clone()),
            ("run.order", self.order.map(|v| v.to_string())),
            ("run.s", self.s.map(|v| v.to_string())),
            (
                "run.radial_points",
                self.radial_points.map(|v| v.to_string()),
            ),
            (
                "input.state",
                self.input_state.as_ref().map(|p| p.display().to_string()),
            ),
            (
                "output.dir",
                self.out.as_ref().map(|p| p.display().to_string()),
            ),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(|message| HarnessError::Invalid {
                    field: key.into(),
                    message,
                })?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run_experiment(common: &Common, experiment: Option<Experiment>) -> Result<i32, HarnessError> {
    let cfg = common.resolve(experiment)?;
    let bundle = harness::run(&cfg)?;
    let files = bundle.write(&cfg, &cfg.output_dir)?;
    print!("{}", bundle.report());
    println!(
        "{} files written to {}",
        files.len(),
        cfg.output_dir.display()
    );
    Ok(bundle.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, HarnessError> {
    let (common, experiment) = match &cli.command {
        Command::Spectrum(c) => (c, Experiment::Spectrum),
        Command::Resonances(c) => (c, Experiment::Resonances),
        Command::Transparency(c) => (c, Experiment::Transparency),
        Command::Zakharov(c) => (c, Experiment::Zakharov),
        Command::WkbResidual(c) => (c, Experiment::WkbResidual),
        Command::Converge(c) => (c, Experiment::Converge),
        Command::PdoBench(c) => (c, Experiment::PdoBench),
        Command::VerifyAll { mode, common } => {
            let cfg = common.resolve(None)?;
            let mode = match mode {
                Mode::Quick => VerifyMode::Quick,
                Mode::Full => VerifyMode::Full,
            };
            let report = harness::verify_all(mode, &cfg.params, cfg.seed)?;
            print!("{}", report.report());
            return Ok(report.exit_code());
        }
        Command::Run { experiment, common } => {
            let e = match experiment {
                Some(name) => {
                    Some(
                        Experiment::parse(name).ok_or_else(|| HarnessError::Invalid {
                            field: "experiment".into(),
                            message: format!("unknown experiment `{name}`"),
                        })?,
                    )
                }
                None => None,
            };
            return run_experiment(common, e);
        }
    };
    run_experiment(common, Some(experiment))
}

fn init_threads() -> Result<(), HarnessError> {
    if let Ok(v) = std::env::var("ZKL_THREADS") {
        let n: usize = v.parse().map_err(|_| HarnessError::Invalid {
            field: "ZKL_THREADS".into(),
            message: format!("expected a positive integer, got `{v}`"),
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| HarnessError::Invalid {
                field: "ZKL_THREADS".into(),
                message: e.to_string(),
            })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = init_threads()
        .and_then(|_| dispatch(cli))
        .unwrap_or_else(|e| {
            eprintln!("error: {e}");
            e.exit_code()
        });
    ExitCode::from(code as u8)
}
