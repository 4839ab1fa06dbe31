use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use transversal_cli::{info, run, to_json, CliError, Job, Task};

/// Diagonal transversal gates of CSS codes.
#[derive(Parser)]
#[command(name = "transversal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct IoArgs {
    /// Job file (JSON); stdin when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for oracle checks.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Overrides the job's sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// H, T and Id as Howell generators.
    Groups,
    /// Logical actions of the job's gate, or of generated gates.
    Action,
    /// Cross-check the groups against the brute-force oracle.
    Verify,
    /// Monomial closed forms next to the generic groups.
    ClosedForm,
    /// Parameters and the levels at which closed forms apply.
    Info,
    /// Run the tasks listed in the job file.
    Run,
}

fn with_path(p: &Path, e: io::Error) -> CliError {
    CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display())))
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        Some(p) => text = fs::read_to_string(p).map_err(|e| with_path(p, e))?,
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| with_path(p, e))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Vec<String>, CliError> {
    let mut job = Job::from_json(&read_input(&cli.io.input)?)?;
    if let Some(seed) = cli.io.seed {
        job.seed = seed;
    }
    let task = match cli.command {
        Command::Groups => Some(Task::Groups),
        Command::Action => Some(Task::Action),
        Command::Verify => Some(Task::Verify),
        Command::ClosedForm => Some(Task::ClosedForm),
        Command::Info => {
            write_output(&cli.io.output, &to_json(&info(&job)?))?;
            return Ok(Vec::new());
        }
        Command::Run => None,
    };
    if let Some(t) = task {
        job.tasks = vec![t];
    }
    let outcome = run(&job, cli.io.threads)?;
    write_output(&cli.io.output, &to_json(&outcome.report))?;
    Ok(outcome.failures)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in failures {
                eprintln!("internal consistency failure: {f}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
