mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use strip_lab::verify::{write_artifacts, Profile, DEFAULT_SEED};

use crate::config::{load, CertifyConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] strip_lab::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the config, 1 for runtime failures.
    fn exit_code(&self) -> u8 {
        use strip_lab::Error as E;
        match self {
            Self::Config(_) => 2,
            Self::Core(
                E::InvalidBounds(_)
                | E::InvalidParams(_)
                | E::CellPeclet { .. }
                | E::Parse(_)
                | E::Json(_)
                | E::Puncture
                | E::OutsideHalfPlane { .. }
                | E::PunctureProximity { .. }
                | E::PathThroughPuncture { .. }
                | E::InvalidPath(_),
            ) => 2,
            Self::Core(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "strip-lab",
    version,
    about = "Convection-diffusion on the strip: solvers, certificates and checks"
)]
struct Cli {
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports and CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Random seed; overrides any seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, default_value_t = Profile::Quick)]
    profile: Profile,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Finite-difference solve on a truncated strip.
    Solve,
    /// Sampled supersolution certificate for the barrier.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long = "R")]
        r: Option<f64>,
    },
    /// Push a strip field to the half-plane and check the weighted equation.
    Map,
    /// Build the dual potential on a half-plane patch.
    Dualize,
    /// Smallest Dirichlet eigenvalue of the truncated strip.
    Eigen,
    /// Drag and lift proxy sweep for the traveling field.
    Maglev,
    /// Run every acceptance check and print a pass/fail table.
    VerifyAll,
}

fn seed_of(cli: &Cli, from_config: Option<u64>) -> u64 {
    cli.seed.or(from_config).unwrap_or(DEFAULT_SEED)
}

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let cfg_path = cli.config.as_deref();
    match &cli.command {
        Command::Solve => {
            let c: config::SolveConfig = load(cfg_path)?;
            commands::solve(&c, seed_of(cli, c.seed))
        }
        Command::Certify { k, lambda, r } => {
            let mut c: CertifyConfig = load(cfg_path)?;
            c.k = k.unwrap_or(c.k);
            c.lambda = lambda.unwrap_or(c.lambda);
            c.r = r.unwrap_or(c.r);
            commands::certify(&c, seed_of(cli, c.seed))
        }
        Command::Map => {
            let c: config::MapConfig = load(cfg_path)?;
            commands::map(&c, seed_of(cli, c.seed))
        }
        Command::Dualize => {
            let c: config::DualizeConfig = load(cfg_path)?;
            commands::dualize(&c, seed_of(cli, c.seed))
        }
        Command::Eigen => {
            let c: config::EigenConfig = load(cfg_path)?;
            commands::eigen(&c, seed_of(cli, c.seed))
        }
        Command::Maglev => {
            let c: config::MaglevConfig = load(cfg_path)?;
            commands::maglev(&c, seed_of(cli, c.seed))
        }
        Command::VerifyAll => commands::verify_all(cli.profile, seed_of(cli, None)),
    }
}

fn write(out: &Path, outcome: &commands::Outcome) -> Result<(), CliError> {
    write_artifacts(out, &outcome.artifacts)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = write(&cli.out, &outcome) {
        eprintln!(
            "error: cannot write artifacts to {}: {e}",
            cli.out.display()
        );
        return ExitCode::from(1);
    }
    println!("{}", outcome.summary.trim_end());
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
