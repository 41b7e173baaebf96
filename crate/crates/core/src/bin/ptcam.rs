//! Command-line front end. Exit codes: 0 success, 1 a check failed,
//! 2 configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pt_metrology::commands::{self, CommandOutput};
use pt_metrology::config::{parse_config, RunConfig};
use pt_metrology::reproduce::Figure;
use pt_metrology::Error;

#[derive(Parser)]
#[command(name = "ptcam", version, about = "Coupled gain/loss cavity metrology simulator")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.path and PTCAM_OUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; nothing is stochastic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenfrequencies, phase and stability of the configured system.
    Supermodes,
    /// Composite output spectrum with mechanical sidebands.
    Spectrum,
    /// Amplification factor along the configured coupling sweep.
    Amplification,
    /// Displacement sensitivity sweep against the single cavity.
    Sensitivity,
    /// Gain-loss against loss-loss comparison.
    EpCompare,
    /// Figure data: fig1c, fig1d, fig2b, fig2c or all.
    Reproduce { figure: String },
    /// Oracle cross-validation and invariant checks.
    Validate,
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, Error> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::ConfigParse(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigParse(_) | Error::ConfigInvalid(_) => 2,
        e if e.is_numeric() => 3,
        Error::InvalidParameter { .. } => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<CommandOutput, Error> {
    let config = load_config(cli.config.as_ref())?;
    match &cli.command {
        Command::Supermodes => commands::supermodes(&config),
        Command::Spectrum => commands::spectrum(&config),
        Command::Amplification => commands::amplification(&config),
        Command::Sensitivity => commands::sensitivity(&config),
        Command::EpCompare => commands::ep_compare(&config),
        Command::Reproduce { figure } => {
            let which = if figure == "all" { None } else { Some(figure.parse::<Figure>()?) };
            commands::reproduce_figures(&config, which)
        }
        Command::Validate => Ok(commands::run_validation(&config)),
    }
}

fn out_dir(cli: &Cli) -> Result<PathBuf, Error> {
    if let Some(p) = &cli.out {
        return Ok(p.clone());
    }
    if let Some(p) = std::env::var_os("PTCAM_OUT_DIR") {
        return Ok(p.into());
    }
    Ok(load_config(cli.config.as_ref())?.output.path.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).and_then(|out| {
        if !out.files.is_empty() {
            let dir = out_dir(&cli)?;
            std::fs::create_dir_all(&dir)?;
            for (name, bytes) in &out.files {
                std::fs::write(dir.join(name), bytes)?;
                eprintln!("wrote {}", dir.join(name).display());
            }
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            println!("{}", out.report);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
