use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use sftmd::catalog::FIXTURES;
use sftmd::orbits::{default_pi, DEFAULT_BUDGET};
use sftmd::rational::{parse_rational, Rational};
use sftmd::symplectic::CrossingTolerances;
use sftmd_cli::paths::{analyze_path, path_to_text};
use sftmd_cli::report::{analyze, to_json, to_text, Settings};

#[derive(Parser)]
#[command(name = "sftmd", version, about = "Minimal discrepancy and minimal SFT index of isolated singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a resolution document.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Largest total degree of the enumerated orbit families.
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        d_max: u64,
        /// Rational stand-in for pi in period formulas.
        #[arg(long, value_parser = parse_pi)]
        pi_rational: Option<Rational>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Compare md with both computations of mi and set the exit code.
        #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
        check_theorem: bool,
    },
    /// Conley-Zehnder index of a path file.
    Paths {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the bundled example resolutions, optionally writing them out.
    Fixtures {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn parse_pi(text: &str) -> Result<Rational, String> {
    let value = parse_rational(text).map_err(|e| e.to_string())?;
    if value <= Rational::from_integer(0.into()) {
        return Err("must be positive".into());
    }
    Ok(value)
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            input,
            d_max,
            pi_rational,
            format,
            check_theorem,
        } => {
            let settings = Settings {
                d_max,
                pi: pi_rational.unwrap_or_else(default_pi),
                check_theorem,
            };
            let report = analyze(&display_name(&input), &read(&input)?, &settings)?;
            print!(
                "{}",
                match format {
                    Format::Text => to_text(&report),
                    Format::Json => to_json(&report),
                }
            );
            Ok(if report.is_mismatch() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Paths { input, format } => {
            let report = analyze_path(&display_name(&input), &read(&input)?, &CrossingTolerances::default())?;
            match format {
                Format::Text => print!("{}", path_to_text(&report)),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixtures { write } => {
            for f in FIXTURES {
                println!("{:<22} {}", f.name, f.description);
                if let Some(dir) = &write {
                    let target = dir.join(format!("{}.json", f.name));
                    fs::write(&target, f.document).with_context(|| format!("cannot write {}", target.display()))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Exit code 2 is reserved for a failed theorem check.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
