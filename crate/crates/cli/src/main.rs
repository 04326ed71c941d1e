//! `sofic` command-line front end. Every run prints exactly one JSON report
//! on stdout; logs go to stderr.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::CliReport;

#[derive(Parser)]
#[command(name = "sofic", version, about = "Analyze sofic shifts and build explicit embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fischer cover of a presentation with its structural report.
    Cover {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Also write the cover document here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Periodic-point census, word counts and entropy.
    Invariants {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = sofic::invariants::DEFAULT_TOL)]
        tol: f64,
    },
    /// Checks the embedding hypotheses for X into Y.
    CheckEmbed {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Builds and serializes an embedding code.
    BuildEmbed {
        #[command(flatten)]
        pair: Pair,
        /// Where to write the code; without it the code is part of the report.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Encodes a word of X with a stored code.
    Encode {
        #[command(flatten)]
        io: CodeWord,
    },
    /// Decodes a word of Y with a stored code.
    Decode {
        #[command(flatten)]
        io: CodeWord,
    },
    /// Checks a stored code on periodic points and sampled windows.
    Verify {
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        #[arg(long, default_value_t = 8)]
        periods: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Pair {
    #[arg(long, value_name = "FILE")]
    x: PathBuf,
    #[arg(long, value_name = "FILE")]
    y: PathBuf,
}

#[derive(Args)]
struct CodeWord {
    #[arg(long, value_name = "FILE")]
    code: PathBuf,
    /// Whitespace-separated symbols, `-` for stdin.
    #[arg(long, value_name = "FILE")]
    word: PathBuf,
    /// Also write the resulting word here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cover { .. } => "cover",
            Command::Invariants { .. } => "invariants",
            Command::CheckEmbed { .. } => "check-embed",
            Command::BuildEmbed { .. } => "build-embed",
            Command::Encode { .. } => "encode",
            Command::Decode { .. } => "decode",
            Command::Verify { .. } => "verify",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let report = match Cli::try_parse() {
        Ok(cli) => {
            let name = cli.command.name();
            commands::run(cli.command).unwrap_or_else(|e| CliReport::failure(name, e))
        }
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{}", e.render());
            CliReport::failure("usage", commands::CliError::usage("usage", first_line(&e.to_string())))
        }
    };
    let mut out = std::io::stdout().lock();
    let text = serde_json::to_string_pretty(&report.to_value()).expect("report serializes");
    if writeln!(out, "{text}").and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code())
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string()
}
