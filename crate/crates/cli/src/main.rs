//! `fibspace`: exact computations on Fibonacci-lambda difference spaces.
//!
//! Exit status: 0 when the reported verdict passes, 1 when it fails,
//! 2 on usage or input errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "fibspace", version, about = "Exact-rational toolkit for Fibonacci-lambda difference sequence spaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Weight sequence: shorthand, inline JSON or a path to a JSON file.
    #[arg(long, global = true, default_value = "linear")]
    pub lambda: String,
    /// Sequence: builtin name, inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub seq: Option<String>,
    /// Matrix: builtin name, inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    #[arg(long, global = true, default_value_t = 200)]
    pub depth: usize,
    #[arg(long, global = true, default_value_t = 16)]
    pub window: usize,
    /// Cauchy tolerance as p/q or decimal.
    #[arg(long, global = true, default_value = "1/1000000")]
    pub tol: String,
    /// Divergence threshold as p/q or decimal.
    #[arg(long, global = true, default_value = "1000000000")]
    pub threshold: String,
    /// Subset horizon for l1-type suprema (at most 16).
    #[arg(long, global = true, default_value_t = 8)]
    pub horizon: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The Fibonacci number f_n (f_0 = f_1 = 1).
    Fib { n: usize },
    /// Cassini, sum-formula and golden-ratio residuals for n = 0..=max.
    Identities {
        #[arg(long, default_value_t = 100)]
        max: usize,
    },
    /// First depth+1 terms of a transform of --seq.
    Transform {
        #[arg(long, value_parser = ["fhat", "fbar", "inverse"])]
        direction: String,
    },
    /// Membership of --seq in a space.
    Member {
        #[arg(long)]
        space: String,
    },
    /// Norm of --seq in the lambda spaces.
    Norm,
    /// Expansion of --seq in the Schauder basis.
    Basis {
        #[arg(long, default_value = "c0_lambda_fhat")]
        space: String,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Dual conditions for --seq.
    Dual {
        #[arg(long, default_value = "beta")]
        dual: String,
        #[arg(long, default_value = "c0_lambda_fhat")]
        space: String,
    },
    /// Class conditions for --matrix, e.g. --class "c_lambda_fhat->c".
    Classify {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = fibspace_core::classes::DEFAULT_ROW_BUDGET)]
        row_budget: usize,
    },
    /// Tail norms, Hausdorff-measure estimate and compactness of --matrix.
    Compact {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = fibspace_core::compactness::DEFAULT_GRID_MAX)]
        grid_max: usize,
    },
    /// Leading order x order block of --matrix.
    Truncate {
        #[arg(long)]
        order: usize,
    },
    /// Built-in verification suite.
    Selftest {
        /// Perturb a builtin sequence to exercise failure reporting.
        #[arg(long)]
        corrupt: Option<String>,
        #[arg(long, default_value_t = fibspace_core::selftest::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
