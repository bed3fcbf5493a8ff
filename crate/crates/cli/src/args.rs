use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use urn_core::exact::Var;
use urn_core::montecarlo::Sampler;
use urn_core::urnproc::{Quantity, Variant};

#[derive(Debug, Parser)]
#[command(name = "urn", version, about = "Exact and simulated urn solitaire")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; single values default to text, everything else to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the payload to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct State {
    /// Green balls
    #[arg(long)]
    pub m: u32,
    /// Red balls
    #[arg(long)]
    pub n: u32,
    /// returning | simple
    #[arg(long, default_value = "returning")]
    pub variant: Variant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact probability that the last ball is green
    Prob(State),
    /// Exact expected number of rounds (json adds the second moment)
    Expect(State),
    /// Table of a quantity over 0..=max-m x 0..=max-n
    Table {
        /// win_prob | expected_rounds | second_moment | simple_expected |
        /// simple_prob | simple_second_moment
        #[arg(long)]
        quantity: Quantity,
        #[arg(long)]
        max_m: u32,
        #[arg(long)]
        max_n: u32,
    },
    /// Monte Carlo estimate of the win frequency and round count
    Simulate {
        #[command(flatten)]
        state: State,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// ball (draw one ball at a time) | run (sample whole rounds)
        #[arg(long, default_value = "ball")]
        sampler: Sampler,
    },
    /// Search for a recurrence satisfied by a table or its diagonal
    Guess(GuessArgs),
    /// Check a known recurrence against exact values
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        /// First starting index (m for theorem 1, n for theorem 2)
        #[arg(long, default_value_t = 1)]
        from: u32,
        /// Last starting n for theorem 2
        #[arg(long, default_value_t = 27)]
        up_to: u32,
        /// Last starting m for theorem 1
        #[arg(long, default_value_t = 26)]
        max_m: u32,
        /// Last n for theorem 1
        #[arg(long, default_value_t = 30)]
        max_n: u32,
    },
    /// Values of a quantity at (1,1), (2,2), ..., (up-to, up-to)
    Diag {
        #[arg(long, default_value = "expected_rounds")]
        quantity: Quantity,
        #[arg(long, default_value_t = 10)]
        up_to: u32,
    },
    /// Time the quadratic table against the linear recurrence for E(m, n)
    Bench {
        #[arg(long, default_value_t = 5)]
        n: u32,
        /// Values of m to time
        #[arg(long, value_delimiter = ',', default_values_t = [100u32, 1000, 10000])]
        sizes: Vec<u32>,
        /// Largest m for which the table is built; larger sizes are skipped
        #[arg(long, default_value_t = 500)]
        dp_limit: u32,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GuessArgs {
    #[arg(long, default_value = "expected_rounds")]
    pub quantity: Quantity,
    /// Fit the diagonal sequence instead of the whole table
    #[arg(long)]
    pub diagonal: bool,
    /// Shift variable for table guessing
    #[arg(long, default_value = "m")]
    pub shift: Var,
    #[arg(long, default_value_t = 40)]
    pub max_m: u32,
    #[arg(long, default_value_t = 40)]
    pub max_n: u32,
    /// Number of diagonal terms
    #[arg(long, default_value_t = 60)]
    pub up_to: u32,
    /// Largest order tried [default: 4, or 3 with --diagonal]
    #[arg(long)]
    pub order: Option<usize>,
    /// Degree bound in m [default: 4]
    #[arg(long)]
    pub deg_m: Option<u32>,
    /// Degree bound in n [default: 3, or 7 with --diagonal]
    #[arg(long)]
    pub deg_n: Option<u32>,
    /// Held-out equations that a candidate must also satisfy
    #[arg(long, default_value_t = 20)]
    pub margin: usize,
}
