use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vheat_core::redfield::IntegrateOptions;
use vheat_experiments::commands::{self, DEFAULT_RECTIFY_ALPHAS};
use vheat_experiments::thermo::{self, ThermoOptions};
use vheat_experiments::{Engine, Grid, Result, SweepConfig};

#[derive(Parser)]
#[command(name = "vheat", version, about = "Heat transport through a V-type three-level system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_hot: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_cold: Option<f64>,
    /// Coupling strength to both baths.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// MIN:MAX:N, log:MIN:MAX:N or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Tolerances {
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
}

impl Tolerances {
    fn apply(&self, mut o: IntegrateOptions) -> IntegrateOptions {
        o.rtol = self.rtol.unwrap_or(o.rtol);
        o.atol = self.atol.unwrap_or(o.atol);
        o
    }
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory from the ground state on a time grid.
    Transient {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Steady state against alpha, numeric and closed-form columns.
    SweepAlpha {
        #[command(flatten)]
        common: Common,
    },
    /// Steady currents against the excited-state splitting at alpha = -1 and 1.
    SweepDelta {
        #[command(flatten)]
        common: Common,
    },
    /// Forward and reverse currents at fixed mean temperature over a dT grid.
    Rectify {
        #[command(flatten)]
        common: Common,
        /// Alpha values, same syntax as --grid.
        #[arg(long, allow_hyphen_values = true, default_value = DEFAULT_RECTIFY_ALPHAS)]
        alphas: String,
    },
    /// Energy balance, entropy production and positivity along trajectories.
    ThermoCheck {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tol: Tolerances,
        /// Alpha values, same syntax as --grid.
        #[arg(long, allow_hyphen_values = true, default_value = "-1,0.5,1")]
        alphas: String,
        /// Decouple the cold bath.
        #[arg(long)]
        single_bath: bool,
        /// Flip the sign of the dissipators.
        #[arg(long)]
        negate_dissipator: bool,
    },
}

fn resolve(c: &Common) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = &c.config {
        cfg.apply_file(path)?;
    }
    let p = &mut cfg.params;
    p.nu = c.nu.unwrap_or(p.nu);
    p.delta = c.delta.unwrap_or(p.delta);
    p.alpha = c.alpha.unwrap_or(p.alpha);
    p.t_hot = c.t_hot.unwrap_or(p.t_hot);
    p.t_cold = c.t_cold.unwrap_or(p.t_cold);
    if let Some(g) = c.gamma {
        p.gamma_hot = g;
        p.gamma_cold = g;
    }
    if let Some(e) = c.engine {
        cfg.engine = e;
    }
    if let Some(g) = &c.grid {
        cfg.grid = Some(g.parse()?);
    }
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Transient { common, tol } => {
            let cfg = resolve(&common)?;
            commands::transient(&cfg, &tol.apply(IntegrateOptions::default()))?.write(cfg.out.as_deref())?;
        }
        Command::SweepAlpha { common } => {
            let cfg = resolve(&common)?;
            commands::sweep_alpha(&cfg)?.write(cfg.out.as_deref())?;
        }
        Command::SweepDelta { common } => {
            let cfg = resolve(&common)?;
            commands::sweep_delta(&cfg)?.write(cfg.out.as_deref())?;
        }
        Command::Rectify { common, alphas } => {
            let cfg = resolve(&common)?;
            let alphas = alphas.parse::<Grid>()?.values();
            commands::rectify(&cfg, &alphas)?.write(cfg.out.as_deref())?;
        }
        Command::ThermoCheck { common, tol, alphas, single_bath, negate_dissipator } => {
            let cfg = resolve(&common)?;
            let defaults = ThermoOptions::default();
            let opts = ThermoOptions {
                alphas: alphas.parse::<Grid>()?.values(),
                single_bath,
                negate_dissipator,
                integrate: tol.apply(defaults.integrate),
            };
            let report = thermo::thermo_check(&cfg, &opts)?;
            report.table().write(cfg.out.as_deref())?;
            for line in report.summary() {
                if cfg.out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
