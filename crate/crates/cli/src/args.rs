use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prbp::game::{ComputeCostSplit, GameKind};
use prbp::partitions::PartitionKind;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "prbp",
    version,
    about = "Red-blue pebbling with partial computations"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of distinct states the solver may store.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub budget_states: usize,
    /// Wall-clock limit for the solver.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also emit Graphviz output (next to --out, or inline).
    #[arg(long, global = true)]
    pub dot: bool,
    /// Where to write the run manifest (default: <out>.manifest.json, or stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate a DAG.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Replay a schedule and report its cost.
    Verify {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Exact optimal I/O cost.
    Solve {
        #[arg(long)]
        dag: PathBuf,
        #[command(flatten)]
        game: GameArgs,
        /// Also write the optimal schedule here.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// A known achievable cost, used to prune the search.
        #[arg(long)]
        upper_bound: Option<usize>,
    },
    /// Optimal costs of both games at one capacity.
    Compare {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Partition tools.
    Partition {
        #[command(subcommand)]
        action: PartitionCmd,
    },
    /// Leading-order asymptotic bound for a structured family.
    Bound {
        #[arg(long, value_enum)]
        family: BoundFamily,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        m1: Option<usize>,
        #[arg(long)]
        m2: Option<usize>,
        #[arg(long)]
        m3: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        r: usize,
    },
    /// Build the maxinset reduction DAG for an undirected graph.
    Reduce {
        /// Text graph: node count on the first line, then one `u v` edge per line.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        v0: usize,
        #[arg(long)]
        b: usize,
    },
    /// Emit a hand-built schedule with its claimed cost.
    Golden {
        #[command(subcommand)]
        family: GoldenFamily,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Figure1 {
        /// Include the extra source u0 and sink v0.
        #[arg(long)]
        endpoints: bool,
    },
    Chain {
        #[arg(long)]
        g: usize,
    },
    Matvec {
        #[arg(long)]
        m: usize,
    },
    Zipper {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
    },
    Kary {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    Collector {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
    },
    Spart {
        #[arg(long)]
        h: usize,
    },
    Fft {
        #[arg(long)]
        m: usize,
    },
    Matmul {
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        #[arg(long)]
        m3: usize,
    },
    Attention {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
    },
    /// Random DAG without isolated nodes, edges from lower to higher id.
    Random {
        #[arg(long)]
        n: usize,
        /// Edge probability.
        #[arg(long, default_value_t = 0.4)]
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Rbp,
    Prbp,
}

impl From<Game> for GameKind {
    fn from(g: Game) -> Self {
        match g {
            Game::Rbp => GameKind::Rbp,
            Game::Prbp => GameKind::Prbp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    PerEdge,
    PerEdgeScaledByIndegree,
}

impl From<Split> for ComputeCostSplit {
    fn from(s: Split) -> Self {
        match s {
            Split::PerEdge => ComputeCostSplit::PerEdge,
            Split::PerEdgeScaledByIndegree => ComputeCostSplit::PerEdgeScaledByIndegree,
        }
    }
}

/// Game rules. Omitted values fall back to the schedule file's own config
/// where there is one.
#[derive(Debug, Args, Serialize)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    pub game: Option<Game>,
    /// Red pebble capacity.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub sliding: bool,
    #[arg(long)]
    pub clear: bool,
    #[arg(long)]
    pub no_deletion: bool,
    /// Cost of one compute step, as an integer or fraction such as 1/10.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long, value_enum)]
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::enum_variant_names)]
pub enum KindArg {
    SPartition,
    SEdgePartition,
    SDominatorPartition,
}

impl From<KindArg> for PartitionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::SPartition => PartitionKind::SPartition,
            KindArg::SEdgePartition => PartitionKind::SEdgePartition,
            KindArg::SDominatorPartition => PartitionKind::SDominatorPartition,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionCmd {
    /// Partition read off a complete PRBP schedule.
    Extract {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Capacity, if the schedule file carries no config.
        #[arg(long)]
        r: Option<usize>,
        /// Node (dominator) partition instead of edge partition.
        #[arg(long)]
        nodes: bool,
    },
    /// Check a partition against the conditions of a kind.
    Validate {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Minimum class count by exhaustive enumeration.
    Min {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Enumerate even above the ground-set limit.
        #[arg(long)]
        force: bool,
    },
    /// I/O lower bound r * (k - 1), from a given k or by enumeration at S = 2r.
    Bound {
        #[arg(long)]
        r: usize,
        #[arg(long, required_unless_present = "dag")]
        min_k: Option<usize>,
        #[arg(long, requires = "kind")]
        dag: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        force: bool,
    },
    /// Counting certificate for the fan-out/fan-in S-partition counterexample.
    Spart {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundFamily {
    Fft,
    Matmul,
    Attention,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldenFamily {
    Figure1 {
        #[arg(long, value_enum)]
        game: Game,
    },
    Chain {
        #[arg(long)]
        g: usize,
    },
    Matvec {
        #[arg(long)]
        m: usize,
    },
    Tree {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum)]
        game: Game,
    },
    Zipper {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, value_enum)]
        game: Game,
    },
    Collector {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        l: usize,
    },
    /// Generic topological PRBP schedule for any DAG.
    Streaming {
        #[arg(long)]
        dag: PathBuf,
        #[arg(long)]
        r: usize,
    },
}
