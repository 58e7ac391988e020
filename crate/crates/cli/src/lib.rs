//! Command-line front end: reads a problem file, runs one subcommand and
//! writes a JSON or text report.
//!
//! Exit codes: 0 on success, 1 when a computation fails (or a regression
//! row fails), 2 on usage or input-validation errors.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod input;
mod report;

pub use error::CliError;
pub use report::{render_json, render_text, round_numbers, Report};

#[derive(Debug, Parser)]
#[command(
    name = "intercomp",
    version,
    about = "Rates and bounds for interactive function computation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Problem file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for stochastic searches; overrides the problem file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Tolerance for pass/fail judgments in reports.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Entropies and mutual informations of a joint pmf.
    Info,
    /// Support, rectangle and monochromatic structure of a two-terminal problem.
    Analyze,
    /// Minimum sum-rate search with lower bounds.
    Sumrate,
    /// Rate-allocation curves for AND of independent bits.
    Allocate,
    /// Cut-set linear program and scheme rates for a network.
    Network,
    /// Regression table of the reproducible reference values.
    PaperExamples,
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Copy, Default)]
pub struct Settings {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

/// A finished report and whether every judgment in it passed.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<S: AsRef<str>>(argv: &[S], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let started = Instant::now();
    let result = execute(&cli).and_then(|outcome| {
        let value = outcome.report.to_value();
        let text = match cli.format {
            Format::Json => render_json(&value),
            Format::Text => render_text(&value),
        };
        match &cli.output {
            Some(path) => std::fs::write(path, &text)
                .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Output(e.to_string()))?,
        }
        Ok(outcome.ok)
    });
    let _ = writeln!(
        stderr,
        "wall time: {:.3} s",
        started.elapsed().as_secs_f64()
    );
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(stderr, "error: one or more checks failed");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::invalid(
                "--tolerance",
                format!("must be a positive number, got {t}"),
            ));
        }
    }
    let settings = Settings {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    let input = cli.input.as_deref();
    match cli.command {
        Command::Info => commands::info::run(input::load(input, "info")?, settings),
        Command::Analyze => commands::analyze::run(input::load(input, "analyze")?, settings),
        Command::Sumrate => commands::sumrate::run(input::load(input, "sumrate")?, settings),
        Command::Allocate => commands::allocate::run(input::load(input, "allocate")?, settings),
        Command::Network => commands::network::run(input::load(input, "network")?, settings),
        Command::PaperExamples => commands::examples::run(settings),
    }
}
