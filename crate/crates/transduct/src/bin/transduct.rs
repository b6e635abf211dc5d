//! Thin command-line front end; all computation lives in the library.
//!
//! Exit codes: 0 success, 2 validation error, 3 numeric/domain error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use transduct::render::{render_table, OutputFormat};
use transduct::scenario::{parse_scenario, run_cotter_pin, run_scenario, CotterPinParams};
use transduct::selftest;
use transduct::Error;

#[derive(Parser)]
#[command(
    name = "transduct",
    version,
    about = "Model-averaged and plug-in predictive inference over finite model spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the cotter-pin rejected-boxes table: one row per prior sample
    /// size plus the known-proportion baseline
    Cotter {
        /// Prior sample sizes, comma separated (e.g. 100,1000,10000)
        #[arg(long, value_delimiter = ',')]
        n0: Vec<u64>,
        /// Defect ratio r0/n0 shared by every prior sample
        #[arg(long)]
        ratio: f64,
        /// Future sample size (pins per box)
        #[arg(long)]
        n: u64,
        /// A box fails when more than this many pins are defective
        #[arg(long)]
        threshold: u64,
        /// Output format: csv, markdown or json
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Significant digits in printed values
        #[arg(long, default_value_t = 4)]
        precision: u32,
        /// Smooth each prior sample with this many pseudo successes and
        /// failures (permits boundary defect counts)
        #[arg(long)]
        pseudo_count: Option<f64>,
    },
    /// Run a JSON scenario file and print its report
    Run {
        /// Path to the scenario document
        file: PathBuf,
    },
    /// Run the numeric self-checks and print one line per check
    Selftest,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch() -> Result<ExitCode, Error> {
    match Cli::parse().command {
        Command::Cotter {
            n0,
            ratio,
            n,
            threshold,
            format,
            precision,
            pseudo_count,
        } => {
            let format: OutputFormat = format.parse()?;
            if !(1..=17).contains(&precision) {
                return Err(Error::ScenarioField {
                    path: "--precision".into(),
                    message: format!("must lie in [1, 17], got {precision}"),
                });
            }
            let params = CotterPinParams {
                n0,
                ratio,
                n,
                threshold,
                pseudo_count,
            };
            let rows = run_cotter_pin(&params)?;
            if let Some(alpha) = params.pseudo_count {
                eprintln!(
                    "note: pseudo-count {alpha} added as both successes and failures to every prior sample"
                );
            }
            print!("{}", render_table(&rows, format, precision));
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::ScenarioIo(format!("{}: {e}", file.display())))?;
            let spec = parse_scenario(&text)?;
            if let transduct::scenario::ScenarioParams::CotterPin(p) = &spec.params {
                if let Some(alpha) = p.pseudo_count {
                    eprintln!(
                        "note: pseudo-count {alpha} added as both successes and failures to every prior sample"
                    );
                }
            }
            print!("{}", run_scenario(&spec)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let (report, all_passed) = selftest::report();
            print!("{report}");
            if all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}
