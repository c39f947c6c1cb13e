mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::{attenuation, beam, budget, netsim, pdt, profile, surface, visibility};
use config::{resolve, Common, Format};
use error::CliError;
use output::{emit, Artifact};

#[derive(Parser)]
#[command(name = "skyq", version, about = "Free-space quantum channel models for drone links")]
struct Cli {
    /// Default directory for artifacts when no output file is given.
    #[arg(long, env = "SKYQ_OUT_DIR", global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// C_n² against altitude for a turbulence profile.
    Profile {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: profile::Flags,
    },
    /// Fog attenuation against visibility and wavelength.
    Attenuation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: attenuation::Flags,
    },
    /// Gaussian beam spot size, capture efficiency and divergence loss.
    Beam {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: beam::Flags,
    },
    /// Probability distribution of transmittance for one link geometry.
    Pdt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: pdt::Flags,
    },
    /// Mean transmittance over an altitude × zenith grid.
    Surface {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: surface::Flags,
    },
    /// Link margin against range for several receiver diameters.
    Budget {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: budget::Flags,
    },
    /// Teleportation through a chain of drone repeaters.
    Netsim {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: netsim::Flags,
    },
    /// Fog attenuation for each record of a visibility CSV.
    VisibilityReport {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: visibility::Flags,
    },
    /// Run whatever subcommand a config file names.
    Run {
        /// JSON run configuration.
        config: PathBuf,
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn execute<P: DeserializeOwned>(
    name: &str,
    common: &Common,
    flags: &impl Serialize,
    out_dir: Option<&Path>,
    run: impl FnOnce(&P, Format, u64) -> Result<(Artifact, String), CliError>,
) -> Result<String, CliError> {
    let job = resolve::<P>(name, common, flags, out_dir)?;
    let (artifact, summary) = run(&job.params, job.format, job.seed)?;
    debug_assert_eq!(artifact.format(), job.format);
    let dest = emit(&artifact, &job.target)?;
    Ok(format!("{summary} -> {dest}"))
}

fn dispatch(command: Command, out_dir: Option<&Path>) -> Result<String, CliError> {
    match command {
        Command::Profile { common, flags } => {
            execute("profile", &common, &flags, out_dir, |p, f, _| profile::run(p, f))
        }
        Command::Attenuation { common, flags } => {
            execute("attenuation", &common, &flags, out_dir, |p, f, _| attenuation::run(p, f))
        }
        Command::Beam { common, flags } => {
            execute("beam", &common, &flags, out_dir, |p, f, _| beam::run(p, f))
        }
        Command::Pdt { common, flags } => {
            execute("pdt", &common, &flags.normalized(), out_dir, pdt::run)
        }
        Command::Surface { common, flags } => {
            execute("surface", &common, &flags.normalized(), out_dir, surface::run)
        }
        Command::Budget { common, flags } => {
            execute("budget", &common, &flags, out_dir, |p, f, _| budget::run(p, f))
        }
        Command::Netsim { common, flags } => {
            execute("netsim", &common, &flags.normalized(), out_dir, netsim::run)
        }
        Command::VisibilityReport { common, flags } => execute(
            "visibility-report",
            &common,
            &flags,
            out_dir,
            |p, f, _| visibility::run(p, f),
        ),
        Command::Run {
            config,
            output,
            format,
            seed,
        } => {
            let common = Common {
                config: Some(config.clone()),
                output,
                format,
                seed,
            };
            let command = match config::subcommand_of(&config)?.as_str() {
                "profile" => Command::Profile { common, flags: Default::default() },
                "attenuation" => Command::Attenuation { common, flags: Default::default() },
                "beam" => Command::Beam { common, flags: Default::default() },
                "pdt" => Command::Pdt { common, flags: Default::default() },
                "surface" => Command::Surface { common, flags: Default::default() },
                "budget" => Command::Budget { common, flags: Default::default() },
                "netsim" => Command::Netsim { common, flags: Default::default() },
                "visibility-report" => Command::VisibilityReport { common, flags: Default::default() },
                other => return Err(CliError::Config(format!("unknown subcommand `{other}` in config"))),
            };
            dispatch(command, out_dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command, cli.out_dir.as_deref()) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
