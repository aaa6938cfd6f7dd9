//! `contig`: sampling and exact analysis of bounded contiguous partitions.
//!
//! Every subcommand writes one JSON document (or JSON Lines for traces)
//! whose first field is the full run configuration. Worker count and output
//! paths are left out of that header so reruns compare byte for byte.

mod input;
mod report;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use contig::Error;
use input::{GraphArgs, OrderingMethod, PairSpec, SlackArgs};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug, Serialize)]
#[command(name = "contig", version, about = "Glauber dynamics on bounded contiguous partitions")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, default_value_t = 1)]
    #[serde(skip)]
    workers: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// CSV mirror of tabular results (torpid, canonical).
    #[arg(long, global = true)]
    #[serde(skip)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Run the chain and write a JSON Lines trace.
    Sample(SampleArgs),
    /// Build a starting partition by tree breaking.
    Seed(SeedArgs),
    /// Enumerate all states up to relabelling.
    Enumerate(EnumerateArgs),
    /// Exact stationary vector, spectral gap and mixing time.
    Mix(MixArgs),
    /// Conductance of the set of states with few classes.
    Conductance(ConductanceArgs),
    /// Canonical paths, their checks and congestion.
    Canonical(CanonicalArgs),
    /// Balanced arc sequence for cycle labels.
    Climb(ClimbArgs),
    /// Bottleneck measurements for two-colorings.
    Torpid(TorpidArgs),
    /// Vertex ordering and its bandwidth.
    Bandwidth(BandwidthArgs),
}

#[derive(Args, Debug, Serialize)]
struct ChainArgs {
    #[arg(long)]
    q: usize,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    b: usize,
    #[arg(long, default_value = "partition-metropolis")]
    variant: contig::glauber::ChainVariant,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    #[serde(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    steps: u64,
    /// Record every `thin`-th state.
    #[arg(long, default_value_t = 1)]
    thin: u64,
    #[arg(long, default_value_t = 0)]
    burn_in: u64,
    /// Start from singletons instead of the tree-breaking partition.
    #[arg(long)]
    singletons: bool,
}

#[derive(Args, Debug, Serialize)]
struct SeedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    b: usize,
    /// Class sizes along the serpentine path (grids only).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Slot count; defaults to the number of classes.
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct EnumerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    q: usize,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    b: usize,
    #[arg(long, default_value_t = contig::diagnostics::DEFAULT_STATE_CAP)]
    cap: usize,
    /// Include every state in the output.
    #[arg(long)]
    list: bool,
}

#[derive(Args, Debug, Serialize)]
struct MixArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    #[serde(flatten)]
    chain: ChainArgs,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    /// Give up on the exact mixing time after this many steps.
    #[arg(long, default_value_t = 100_000)]
    max_t: usize,
    #[arg(long, default_value_t = contig::diagnostics::DEFAULT_STATE_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct ConductanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    #[serde(flatten)]
    chain: ChainArgs,
    /// The set S holds states with at most this many classes.
    #[arg(long)]
    kappa_max: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, default_value_t = contig::diagnostics::DEFAULT_STATE_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct CanonicalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    q: usize,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    b: usize,
    #[command(flatten)]
    #[serde(flatten)]
    slack: SlackArgs,
    /// `all` or `sample:N`.
    #[arg(long, default_value = "all")]
    pairs: PairSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chain steps per sampled endpoint; defaults to `n^2`.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, value_enum, default_value_t = OrderingMethod::Auto)]
    ordering: OrderingMethod,
    /// Largest reduction region, in classes.
    #[arg(long, default_value_t = 3)]
    max_classes: usize,
    #[arg(long, default_value_t = contig::diagnostics::DEFAULT_STATE_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct ClimbArgs {
    /// Comma-separated integer labels summing to zero.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    labels: Vec<i64>,
    /// Label bound; defaults to the largest absolute label.
    #[arg(long)]
    k: Option<i64>,
}

#[derive(Args, Debug, Serialize)]
struct TorpidArgs {
    #[arg(long, value_enum)]
    family: input::Family,
    /// Inclusive range `a..b` or a comma list.
    #[arg(long, default_value = "4..10")]
    ell_range: input::EllRange,
    #[arg(long, default_value_t = 50_000_000)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct BandwidthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = OrderingMethod::Auto)]
    method: OrderingMethod,
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    #[serde(flatten)]
    command: &'a Command,
}

fn header(cli: &Cli) -> Header<'_> {
    Header { tool: "contig", version: env!("CARGO_PKG_VERSION"), command: &cli.command }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_) | Error::ReductionUnavailable { .. }) => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if cli.workers == 0 {
        bail!("--workers must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global().context("starting worker pool")?;
    let hdr = header(cli);
    let out = report::Output::new(cli.out.as_deref(), cli.csv.as_deref());
    match &cli.command {
        Command::Sample(a) => report::sample(&hdr, a, &out),
        Command::Seed(a) => report::seed(&hdr, a, &out),
        Command::Enumerate(a) => report::enumerate(&hdr, a, &out),
        Command::Mix(a) => report::mix(&hdr, a, &out),
        Command::Conductance(a) => report::conductance(&hdr, a, &out),
        Command::Canonical(a) => report::canonical(&hdr, a, &out),
        Command::Climb(a) => report::climb(&hdr, a, &out),
        Command::Torpid(a) => report::torpid(&hdr, a, &out),
        Command::Bandwidth(a) => report::bandwidth(&hdr, a, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
