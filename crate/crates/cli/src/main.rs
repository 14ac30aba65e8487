use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dsvm::experiment::{cmd_run, parse_methods, render, run_fixture, ExperimentConfig, ExperimentReport, Format, RunError};

#[derive(Parser)]
#[command(name = "dsvm", version, about = "Distributed SVM election experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and compare the configured methods, or run an election on a fixture matrix.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long, required_unless_present = "fixture_matrix")]
    config: Option<PathBuf>,
    /// Skip training and elect from this accuracy matrix (JSON).
    #[arg(long)]
    fixture_matrix: Option<PathBuf>,
    /// Comma-separated subset of centralized,ensemble,dsvm.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: json, csv or table.
    #[arg(long, default_value = "json")]
    emit: String,
    /// Also write the rendered report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override any config field, e.g. `--set train.c=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}

fn run(args: RunArgs) -> Result<(), RunError> {
    let format: Format = args.emit.parse()?;
    let (result, output) = if let Some(matrix) = &args.fixture_matrix {
        (run_fixture(matrix), args.output.clone())
    } else {
        let mut overrides = args.overrides.clone();
        if let Some(seed) = args.seed {
            overrides.push(format!("seed={seed}"));
        }
        if let Some(list) = &args.methods {
            let methods = parse_methods(list).map_err(RunError::Config)?;
            let names: Vec<&str> = methods.iter().map(|m| m.as_str()).collect();
            overrides.push(format!("methods={}", serde_json_list(&names)));
        }
        let path = args.config.as_ref().expect("clap enforces --config");
        let config = ExperimentConfig::load(path, &overrides)?;
        let output = args.output.clone().or_else(|| config.output.clone());
        (cmd_run(&config), output)
    };
    match result {
        Ok(report) => emit(&report, format, output.as_ref()),
        Err(RunError::AllMethodsFailed(report)) => {
            emit(&report, format, output.as_ref())?;
            Err(RunError::AllMethodsFailed(report))
        }
        Err(e) => Err(e),
    }
}

fn serde_json_list(items: &[&str]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| format!("\"{s}\"")).collect();
    format!("[{}]", quoted.join(","))
}

fn emit(report: &ExperimentReport, format: Format, output: Option<&PathBuf>) -> Result<(), RunError> {
    let text = render(report, format);
    print!("{text}");
    if let Some(path) = output {
        std::fs::write(path, &text).map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
