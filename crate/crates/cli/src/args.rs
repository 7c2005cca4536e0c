use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "wedge3",
    version,
    about = "LU invariants and canonical forms of three-fermion and three-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// binary64, extended (64 digits) or extended:DIGITS.
    #[arg(long, global = true, default_value = "binary64")]
    pub precision: String,
    /// Tolerance of the command's main check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Random restarts of the overlap maximization.
    #[arg(long, global = true, default_value_t = 32)]
    pub starts: usize,
    /// Worker threads for batches.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Fermion20,
    Qubit8,
    W6,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Named {
    /// e246.
    Separable,
    /// (e235 + e246)/sqrt(2).
    Biseparable,
    /// (e235 + e145 + e136)/sqrt(3).
    W,
    /// (e135 + e246)/sqrt(2).
    Ghz,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Canonical,
    Gme,
    Spectrum,
    Qubit,
    All,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit a random, named or randomly rotated state.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Fermion20)]
        kind: Kind,
        #[arg(long, value_enum, conflicts_with = "input")]
        named: Option<Named>,
        /// Apply a seeded Haar random unitary to this state instead of sampling a new one.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// M1..M7, F, J and the identity residuals.
    Invariants {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
    },
    /// Canonical point in Delta, or in Theta with --qubit.
    Canonicalize {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        qubit: bool,
        /// Local unitaries reaching the qubit canonical form; implies --qubit.
        #[arg(long)]
        witness: bool,
    },
    /// LU equivalence of two states.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// SLOCC type and quasi-reality.
    Classify {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
    },
    /// Maximal overlap with decomposable states.
    Gme {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
    },
    /// Canonical region membership and sampling.
    Region {
        #[command(subcommand)]
        action: RegionAction,
    },
    /// Move a state between the qubit and the fermionic pictures.
    QubitMap {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Seeded self checks with a summary of the worst residuals.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum RegionAction {
    /// Inequalities, boundary status and orbit case of a five-term point.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Random members of Delta.
    Sample {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}
