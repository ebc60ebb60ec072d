mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "orthwalk", version, about = "Counts, diagonals and asymptotics of orthant lattice walks")]
pub struct Cli {
    /// TOML file with tolerance profiles and resource caps.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ModelSource {
    /// Model description in JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Built-in corpus entry (see `orthwalk examples`).
    #[arg(long)]
    pub example: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the model class.
    Classify {
        #[command(flatten)]
        source: ModelSource,
    },
    /// Count walks of length 0..=N.
    Enumerate {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long)]
        max_n: usize,
        /// Double-precision counts normalized by S(1)^n instead of exact values.
        #[arg(long)]
        float: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print the closed-form asymptotic prediction.
    Predict {
        #[command(flatten)]
        source: ModelSource,
        /// Include the second-order coefficient (zero-drift and highly symmetric models).
        #[arg(long)]
        second_order: bool,
    },
    /// List the critical points on the unit torus.
    Gamma {
        #[command(flatten)]
        source: ModelSource,
    },
    /// Check the rational diagonal representation against exact counts.
    DiagonalCheck {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long, default_value_t = orthwalk::diagonal::DEFAULT_VERIFY_DEPTH)]
        max_n: usize,
    },
    /// Fit the counts and compare against the prediction; exit 2 on failure.
    Verify {
        #[command(flatten)]
        source: ModelSource,
        /// Defaults to 400 in two dimensions and 80 in three.
        #[arg(long)]
        max_n: Option<usize>,
        /// default, strict, loose, or a profile from the config file.
        #[arg(long)]
        tolerance: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the full pipeline and print one document.
    Report {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        tolerance: Option<String>,
        /// Also evaluate the residue integral at this n (zero-drift models).
        #[arg(long)]
        residue_n: Option<usize>,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// List the built-in corpus.
    Examples {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

/// What a command produced: text for stdout and whether the check passed.
pub struct Output {
    pub text: String,
    pub pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            if !out.text.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
