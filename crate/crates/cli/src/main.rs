use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(
    name = "fsel",
    version,
    about = "Finite-state selection over shift spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Measure selection shared by several subcommands. Without `--measure` the
/// uniform measure over the selector alphabet is used.
#[derive(Args, Clone)]
struct MeasureArgs {
    /// Markov measure file (`alphabet`/`pi`/`row` lines).
    #[arg(long, conflicts_with = "uniform")]
    measure: Option<PathBuf>,
    /// Use the uniform measure.
    #[arg(long)]
    uniform: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parry measure of an irreducible 0/1 matrix.
    Parry {
        matrix: PathBuf,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Stationary distribution of the `row` lines of a measure file.
    Stationary {
        measure: PathBuf,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Compatibility of a selector (or automaton) with a measure.
    Compat {
        #[arg(long)]
        selector: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Treat the file as an automaton and check ι only.
        #[arg(long)]
        automaton: bool,
    },
    /// Exhaustive finite-n checks of the run-counting bounds.
    LemmaCheck {
        #[arg(long)]
        selector: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
        /// upper, markov-upper, equirun or markov-equirun.
        #[arg(long)]
        lemma: Option<String>,
        /// Largest run length.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Largest output prefix length for the upper bounds.
        #[arg(long, default_value_t = 6)]
        w_max: usize,
        /// Block length for the equirun scan.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Cap on (#A)^n per enumeration.
        #[arg(long, default_value_t = fsel_core::oracles::DEFAULT_ENUM_CAP)]
        max_enum: u128,
        /// Print failing checks only.
        #[arg(long)]
        failures_only: bool,
    },
    /// Snake chain of length-n runs and its closed-form distribution.
    Snake {
        #[arg(long)]
        selector: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Weight snake states with η instead of ι (Markov mode).
        #[arg(long)]
        eta: bool,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Markov chain induced on the states of a selector or automaton.
    Chain {
        #[arg(long)]
        selector: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Apply a selector to a sequence read from a file or standard input.
    Select {
        #[arg(long)]
        selector: PathBuf,
        input: Option<PathBuf>,
    },
    /// Block frequencies of a sequence read from a file or standard input.
    Freq {
        #[arg(long = "k", required = true)]
        ks: Vec<usize>,
        #[arg(long, default_value = "sliding")]
        mode: String,
        /// Compare against this measure.
        #[arg(long, conflicts_with = "uniform")]
        measure: Option<PathBuf>,
        /// Compare against the uniform measure.
        #[arg(long)]
        uniform: bool,
        /// Space-separated symbols when no measure is given.
        #[arg(long)]
        alphabet: Option<String>,
        input: Option<PathBuf>,
    },
    /// Generate a sequence.
    Gen {
        /// champernowne or sample.
        #[arg(long, default_value = "sample")]
        input: String,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n: u64,
    },
    /// Stream a generated sequence through a selector and compare output
    /// block frequencies with the target measure.
    Experiment {
        #[arg(long)]
        selector: PathBuf,
        #[command(flatten)]
        measure: MeasureArgs,
        /// champernowne or sample.
        #[arg(long, default_value = "sample")]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = fsel_core::experiment::DEFAULT_N)]
        n: u64,
        #[arg(long = "k")]
        ks: Vec<usize>,
        #[arg(long, default_value = "sliding")]
        mode: String,
        #[arg(long, default_value_t = fsel_core::experiment::DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        after_recurrent: bool,
        /// Run seeds seed, seed+1, … in parallel.
        #[arg(long, default_value_t = 1)]
        replicates: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fsel: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
