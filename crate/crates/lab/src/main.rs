use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rwre_lab::result::{read_summary, summary_line};
use rwre_lab::{ExperimentConfig, Overrides, OUTPUT_DIR_VAR, WORKERS_VAR};

/// Exit codes: 0 success, 1 error, 2 an acceptance threshold failed.
#[derive(Parser)]
#[command(name = "rwre-lab", version, about = "Run RWRE and trap-model experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config or a previous manifest.json.
    Run {
        config: PathBuf,
        #[arg(long, env = OUTPUT_DIR_VAR)]
        output_dir: Option<PathBuf>,
        #[arg(long, env = WORKERS_VAR)]
        workers: Option<usize>,
    },
    /// Parse and validate a config, then print it fully resolved.
    Validate { config: PathBuf },
    /// Print the criteria of a result directory.
    Summary { result_dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cmd: Command) -> rwre_lab::Result<bool> {
    match cmd {
        Command::Run { config, output_dir, workers } => {
            let cfg = ExperimentConfig::from_file(&config, &Overrides { output_dir, workers })?;
            let (dir, output) = rwre_lab::run(&cfg)?;
            for c in &output.criteria {
                println!("{}", summary_line(c));
            }
            println!("results in {}", dir.display());
            Ok(output.passed())
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config, &Overrides::default())?;
            println!("{}", serde_json::to_string_pretty(&cfg.to_json())?);
            Ok(true)
        }
        Command::Summary { result_dir } => {
            let criteria = read_summary(&result_dir)?;
            for c in &criteria {
                println!("{}", summary_line(c));
            }
            Ok(criteria.iter().all(|c| c.passed))
        }
    }
}
