use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod plot;

use commands::RunContext;
use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "scatterlab", version, about = "Scattering experiments for the cubic wave equation on Schwarzschild")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `outputs` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Nested resolutions for `converge`, e.g. 256,512,1024.
    #[arg(long, global = true, value_delimiter = ',')]
    resolutions: Option<Vec<usize>>,

    /// Embed a generation timestamp in plot files.
    #[arg(long, global = true)]
    stamp: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Evolve Cauchy data forward and write the radiation fields and energy audit.
    Forward,
    /// Reconstruct Cauchy data from future radiation fields.
    Goursat,
    /// Trace forward then invert, reporting the residual.
    Roundtrip,
    /// Energy identity audit plus the four scattering inequalities.
    EnergyAudit,
    /// Fit energy and pointwise decay rates.
    DecayFit,
    /// Richardson convergence study on nested grids.
    Converge,
    /// Random-profile Sobolev ratio probe.
    Sobolev,
    /// Full scattering report with Lipschitz probes.
    Scatter,
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let config = RunConfig::load(&config_path)?;
    let out = cli.out.unwrap_or_else(|| config.outputs.clone());
    std::fs::create_dir_all(&out)?;
    let ctx = RunContext {
        run_id: commands::run_id(&config_path),
        config,
        out,
        resolutions: cli.resolutions,
        stamp: cli.stamp,
    };
    match cli.command {
        Command::Forward => commands::forward(&ctx),
        Command::Goursat => commands::goursat(&ctx),
        Command::Roundtrip => commands::roundtrip(&ctx),
        Command::EnergyAudit => commands::energy_audit(&ctx),
        Command::DecayFit => commands::decay_fit(&ctx),
        Command::Converge => commands::converge(&ctx),
        Command::Sobolev => commands::sobolev(&ctx),
        Command::Scatter => commands::scatter(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("scatterlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
