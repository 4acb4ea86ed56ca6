use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chirality_cli::config::{self, Scenario};
use chirality_cli::{run_scenario, RunError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chirality", version, about = "Decoherence of a driven chirality qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario or a config file.
    Run {
        /// Scenario id (see list-scenarios) or path to a config file.
        target: String,
        /// Override a config key; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write SVG line plots.
        #[arg(long)]
        svg: bool,
    },
    /// Check a config file and print the resolved settings.
    Validate {
        path: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the built-in scenarios.
    ListScenarios,
}

fn load(target: &str, set: &[String]) -> Result<config::ScenarioConfig, RunError> {
    if let Some(s) = Scenario::parse(target) {
        if !Path::new(target).exists() {
            return Ok(config::resolve("", Some(s), set)?);
        }
    }
    let path = Path::new(target);
    let text = fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    Ok(config::resolve(&text, None, set)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<8} {}", s.id(), s.summary());
            }
            Ok(())
        }
        Command::Validate { path, set } => load(&path.to_string_lossy(), &set).map(|cfg| print!("{}", cfg.to_text())),
        Command::Run { target, mut set, out, svg } => {
            if svg {
                set.push("svg=true".into());
            }
            load(&target, &set).and_then(|cfg| {
                let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
                let report = run_scenario(&cfg, &dir)?;
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                println!("wrote {} files to {}", report.files.len(), report.out_dir.display());
                Ok(())
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
