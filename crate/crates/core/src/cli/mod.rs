//! Command-line front end: one JSON config with a section per module, CSV outputs
//! whose first line is `#` followed by the resolved config.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{
    cmd_correlator, cmd_equilibrium, cmd_ff_validate, cmd_kernels, cmd_minff, cmd_sanity, cmd_smatrix, cmd_zn,
    SanityCheck, EQUILIBRIUM_SWEEP_MIN_N,
};
pub use config::{
    resolve_model, CorrelatorSection, EquilibriumSection, FfValidateSection, KernelsSection, MinffSection, RunConfig,
    SanitySection, SmatrixSection, ZnSection,
};

use crate::error::Error;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Parser)]
#[command(name = "sinhgordon", about = "Sinh-Gordon form-factor bootstrap laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config, or a CSV produced by an earlier run (its header is reused).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fast invariant suite.
    Sanity {
        /// Perturb the w cache to exercise the failure path.
        #[arg(long)]
        corrupt_cache: bool,
    },
    Smatrix,
    Minff,
    FfValidate,
    Kernels,
    Correlator,
    Zn,
    Equilibrium,
}

/// Exit status for an error: 2 for usage and configuration problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io { .. } | Error::InvalidParameter(_) | Error::Model(_) => 2,
        _ => 1,
    }
}

/// Parses arguments, runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> crate::Result<i32> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Sanity { corrupt_cache: true } = cli.command {
        cfg.sanity.corrupt_cache = true;
    }
    cfg.validate()?;
    let workers = cli.workers.unwrap_or_else(crate::correlator::default_workers);
    if workers == 0 {
        return Err(Error::Config("--workers must be at least 1".into()));
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| Error::Io { path: cli.out.display().to_string(), message: e.to_string() })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let out = cli.out.as_path();
    pool.install(|| match cli.command {
        Command::Sanity { .. } => cmd_sanity(&cfg, out),
        Command::Smatrix => cmd_smatrix(&cfg, out),
        Command::Minff => cmd_minff(&cfg, out),
        Command::FfValidate => cmd_ff_validate(&cfg, out),
        Command::Kernels => cmd_kernels(&cfg, out),
        Command::Correlator => cmd_correlator(&cfg, out, workers),
        Command::Zn => cmd_zn(&cfg, out, workers),
        Command::Equilibrium => cmd_equilibrium(&cfg, out),
    })
}
