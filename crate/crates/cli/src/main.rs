use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomag::scenario::{self, OutputFormat, ResultBundle, ScenarioConfig, ScenarioKind};
use optomag::Error;

#[derive(Parser)]
#[command(name = "optomag", version, about = "Hybrid qubit-mechanics-cavity network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run a two-node transfer for each value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Derive device parameters from a geometry.
    Design {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NumericalGuard { .. } | Error::Leakage { .. } | Error::NotADensityMatrix(_) => 3,
        Error::NonConvergence { .. } => 4,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<(ResultBundle, PathBuf, OutputFormat), Error> {
    match cli.command {
        Command::Simulate { config, out, format } => {
            let format = format.parse()?;
            let cfg = ScenarioConfig::from_path(&config)?;
            Ok((scenario::run(&cfg)?, out, format))
        }
        Command::Sweep { config, param, values, out, format } => {
            let format = format.parse()?;
            if param != "xi" {
                return Err(Error::Config(format!("only `xi` can be swept, got `{param}`")));
            }
            let mut cfg = ScenarioConfig::from_path(&config)?;
            match cfg.scenario {
                None | Some(ScenarioKind::TwoNodeTransfer) | Some(ScenarioKind::XiSweep) => {}
                Some(other) => return Err(Error::Config(format!("cannot sweep xi in a {} config", other.name()))),
            }
            cfg.scenario = Some(ScenarioKind::XiSweep);
            cfg.xi = None;
            cfg.xi_values = Some(values);
            Ok((scenario::run(&cfg)?, out, format))
        }
        Command::Design { config, out } => {
            let mut cfg = ScenarioConfig::from_path(&config)?;
            match cfg.scenario {
                None | Some(ScenarioKind::DesignReport) => cfg.scenario = Some(ScenarioKind::DesignReport),
                Some(other) => return Err(Error::Config(format!("design expects a design_report config, got {}", other.name()))),
            }
            Ok((scenario::run(&cfg)?, out, OutputFormat::Csv))
        }
    }
}

fn write(bundle: &ResultBundle, out: &Path, format: OutputFormat) -> Result<(), Error> {
    let files = bundle.write(out, format)?;
    for w in &bundle.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli).and_then(|(bundle, out, format)| write(&bundle, &out, format));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
