use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stratahj::applications::presets::{preset, PresetName};
use stratahj::config::{load_config, RunConfig};
use stratahj::run::{run, Command};
use stratahj::verify::{verify, Suite};
use stratahj::{Error, Result};

/// Junction Hamilton-Jacobi solvers.
#[derive(Parser, Debug)]
#[command(name = "stratahj", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides grid.dx.
    #[arg(long, global = true)]
    dx: Option<f64>,
    /// Overrides output.dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the horizon.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Rejects unknown configuration keys.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Explicit monotone scheme with the configured junction condition.
    Solve,
    /// Dynamic programming over all or regular strategies.
    Value,
    /// Parabolic regularization.
    Vanish,
    /// KPP rate function and front times.
    Kpp,
    /// Effective Hamiltonian from the discounted cell problem.
    Cell,
    /// Runs the self-check suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Lists the named presets.
    Presets,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("STRATAHJ_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("STRATAHJ_THREADS must be a count, got {v}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn load(cli: &Cli, command: &Cmd) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let (config, ignored) = load_config(path, cli.strict)?;
            for key in ignored {
                eprintln!("warning: ignored configuration key {key}");
            }
            config
        }
        None => match command {
            Cmd::Kpp => RunConfig::for_preset(PresetName::Kpp),
            Cmd::Cell => RunConfig::for_preset(PresetName::ChessboardStub),
            _ => return Err(Error::Config("this command needs --config".into())),
        },
    };
    if let Some(dx) = cli.dx {
        config.grid.dx = dx;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    if let Some(h) = cli.horizon {
        config.horizon = Some(h);
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let command = match &cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Value => Command::Value,
        Cmd::Vanish => Command::Vanish,
        Cmd::Kpp => Command::Kpp,
        Cmd::Cell => Command::Cell,
        Cmd::Verify { suite } => {
            let checks = verify(suite.parse::<Suite>()?);
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            return Ok(failed == 0);
        }
        Cmd::Presets => {
            for name in PresetName::ALL {
                println!("{name:<16} {}", preset(name).description);
            }
            return Ok(true);
        }
    };
    let config = load(cli, &cli.command)?;
    let outcome = run(&config, command)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
