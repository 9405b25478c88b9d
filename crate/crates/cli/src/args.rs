use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const COLUMNS: &str = "\
Output formats (CSV files always start with a header row):
  simulate, adding machine or solenoid:
    n          scale, 1..=n_max
    L_i        cylinder depth of hole i at scale n
    tau_i      first-hit time of hole i (decimal)
    winner     1-based index of the unique strictly earliest hole, 0 if none
    overlap    1 if two holes intersect at this scale, else 0
    coarse     1 if some hole has depth 0 (radius above 1/2); such scales
               are left out of switch and win counts
  simulate, tent map:
    n, tau_i, winner, overlap, coarse as above; tau_i is 'inf' when the
    orbit closes a cycle without entering hole i and 'undecided' when the
    horizon ends first (the scale then has no winner and is not counted)
  sample (per trial):
    trial         trial index, 0-based
    point_seed    seed of the sampled point (digit n drawn from ChaCha stream n)
    switch_count  winner changes between consecutive counted scales
    wins_i        counted scales won by hole i
  sample also writes a JSON summary (histograms, fractions H-indecisive for
  H = 1..3) next to --out as <stem>.summary.json, or to --summary.
  solenoid:
    label, left, right   stage-k intervals I_{k,label} as exact rationals

Exit codes: 0 success, 1 negative answer (not conjugate, not verified),
2 usage or config error, 3 search budget exhausted.
Set ODESC_LOG (error, warn, info, debug, trace) for diagnostics on stderr.";

#[derive(Debug, Parser)]
#[command(
    name = "odesc",
    version,
    about = "Competing shrinking holes on adding machines and interval maps",
    after_long_help = COLUMNS
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON experiment config
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "INT")]
    pub n_max: Option<usize>,
    /// Iteration bound for exact interval orbits
    #[arg(long, global = true, value_name = "INT")]
    pub horizon: Option<u64>,
    /// Worker threads for sampling; results do not depend on it
    #[arg(long, global = true, value_name = "INT")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the action named in the config
    Run,
    /// Winner trace of one point, one CSV row per scale
    Simulate {
        /// Point to trace (overrides the config)
        #[arg(long)]
        x: Option<String>,
    },
    /// Build a point realizing a schedule of winners
    Construct {
        /// 1-based hole indices, e.g. 2,1,2
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_offset: Option<u64>,
        #[arg(long)]
        max_scale: Option<usize>,
    },
    /// Decide conjugacy of two adding machines, or report M for one
    Classify {
        a: Option<String>,
        b: Option<String>,
    },
    /// Monte Carlo winner statistics over sampled points
    Sample {
        #[arg(long)]
        trials: Option<u64>,
        /// Path of the JSON summary
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
    /// Check a schedule of winners, or the cyclic partitions up to --depth
    Verify {
        #[arg(long)]
        x: Option<String>,
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<usize>>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Build and check the substitution model, dumping one stage as CSV
    Solenoid {
        /// Branching factors, e.g. 2 or 2,3
        #[arg(long)]
        branching: Option<String>,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Exact tent-map utilities
    Tent {
        #[command(subcommand)]
        op: TentOp,
    },
}

#[derive(Debug, Subcommand)]
pub enum TentOp {
    /// Forward orbit until it repeats (or --horizon steps)
    Orbit { x: String },
    /// All d-th preimages of y
    Preimages {
        y: String,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Largest gap of the d-th preimages of y in [0, 1]
    Gap { y: String, depth: usize },
    /// First time the orbit of x enters the open interval (lo, hi)
    Hit { x: String, lo: String, hi: String },
}
