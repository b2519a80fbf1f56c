mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};

/// High-density BCS gap, critical temperature and Fermi-surface quantities.
#[derive(Parser)]
#[command(name = "bcsgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// gaussian, lorentzian, yukawa or tabulated.
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Two-column `r V(r)` table; implies `--potential tabulated`.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Coupling constant.
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Chemical potentials, comma separated and increasing.
    #[arg(long, global = true)]
    mu: Option<String>,
    /// Values of κ, comma separated.
    #[arg(long, global = true)]
    kappa: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (`BCSGAP_WORKERS` takes precedence).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Halve every node count of the momentum grid.
    #[arg(long, global = true)]
    coarse: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility report for the potential.
    PotentialInfo,
    /// Fermi-sphere eigenvalues e^(l) and b^(κ) at each μ.
    Spectrum,
    /// Solve the gap equation at each μ.
    Gap,
    /// Critical temperature at each μ.
    Tc,
    /// Full pipeline at each μ, written as CSV, JSON lines and a summary.
    Sweep {
        /// Recompute points already in the cache.
        #[arg(long)]
        force: bool,
    },
    /// Run the acceptance checks.
    Verify {
        /// Run only these checks (keys or numbers, comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &c.config {
        cfg.apply_file(path)?;
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        cfg.set(k.trim(), v)?;
    }
    let flags = [
        ("potential", c.potential.clone()),
        ("g", c.g.map(|g| g.to_string())),
        ("mu", c.mu.clone()),
        ("kappa", c.kappa.clone()),
        ("workers", c.workers.map(|w| w.to_string())),
        ("table", c.table.as_ref().map(|p| p.display().to_string())),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v).with_context(|| format!("--{k}"))?;
        }
    }
    if let Ok(w) = std::env::var("BCSGAP_WORKERS") {
        cfg.set("workers", &w).context("BCSGAP_WORKERS")?;
    }
    if c.coarse {
        cfg.coarsen();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(&cli.common).map_err(ConfigError)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    pool.install(|| match cli.command {
        Command::PotentialInfo => commands::potential_info(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Gap => commands::gap(&cfg),
        Command::Tc => commands::tc(&cfg),
        Command::Sweep { force } => commands::sweep(&cfg, force),
        Command::Verify { only } => commands::verify(&cfg, only),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
