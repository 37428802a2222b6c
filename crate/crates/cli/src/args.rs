// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use msnet::ingest::{PlantedEvent, VersionRange};
use msnet::states::Metric;

#[derive(Debug, Parser)]
#[command(name = "msnet", version, about = "Temporal network analyses of microservice systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a JSON Lines span dump into a contact stream.
    IngestTraces(IngestTracesArgs),
    /// Parse a release manifest into a snapshot sequence.
    IngestReleases(IngestReleasesArgs),
    /// Generate an evolving system with planted ground truth.
    Synth(SynthArgs),
    /// Supra-adjacency eigenvector centrality.
    Centrality(CentralityArgs),
    /// Streaming temporal Katz centrality over a contact stream.
    KatzStream(KatzArgs),
    /// Temporal communities by nonnegative tensor factorization.
    Communities(CommunitiesArgs),
    /// SIS spreading ensemble over the snapshot sequence.
    Sis(SisArgs),
    /// Cluster layers into system states.
    States(StatesArgs),
    /// Enumerate maximal Δ-cliques in a contact stream.
    Cliques(CliquesArgs),
    /// Turn analysis artifacts into degradation findings.
    Detect(DetectArgs),
    /// Render a findings report as text.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::IngestTraces(_) => "ingest-traces",
            Command::IngestReleases(_) => "ingest-releases",
            Command::Synth(_) => "synth",
            Command::Centrality(_) => "centrality",
            Command::KatzStream(_) => "katz-stream",
            Command::Communities(_) => "communities",
            Command::Sis(_) => "sis",
            Command::States(_) => "states",
            Command::Cliques(_) => "cliques",
            Command::Detect(_) => "detect",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = "MSNET_OUT_DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestTracesArgs {
    /// Span file (JSON Lines).
    #[arg(long = "in", alias = "spans")]
    pub input: PathBuf,
    /// Also cut the stream into snapshots of this many ticks.
    #[arg(long)]
    pub window: Option<u64>,
    /// Origin of the first window.
    #[arg(long, default_value_t = 0, requires = "window")]
    pub t0: u64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct IngestReleasesArgs {
    /// Release manifest (JSON).
    #[arg(long = "in", alias = "manifest")]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    pub services: usize,
    #[arg(long, default_value_t = 7)]
    pub versions: usize,
    #[arg(long, default_value_t = 0.06)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability that a pair's latent draw carries over between versions.
    #[arg(long, default_value_t = msnet::ingest::DEFAULT_PERSISTENCE)]
    pub persistence: f64,
    /// Hub on versions `A..B`, optionally at node `A..B:ID`.
    #[arg(long, value_parser = parse_hub)]
    pub hub: Vec<PlantedEvent>,
    /// Clique of SIZE members on versions `A..B:SIZE`.
    #[arg(long, value_parser = parse_clique)]
    pub clique: Vec<PlantedEvent>,
    /// Split on versions `A..B`, optionally `A..B:NODE,PARTNER`.
    #[arg(long, value_parser = parse_split)]
    pub split: Vec<PlantedEvent>,
    /// Edge probability P on versions `A..B:P`.
    #[arg(long, value_parser = parse_switch)]
    pub state_switch: Vec<PlantedEvent>,
    /// Full generator config (JSON); replaces the flags above.
    #[arg(long, conflicts_with_all = ["hub", "clique", "split", "state_switch"])]
    pub config: Option<PathBuf>,
    /// Also emit a synthetic trace stream with this many requests.
    #[arg(long)]
    pub requests: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    /// Snapshot sequence, or a directory holding snapshots.json.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Inter-layer coupling strength.
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = msnet::centrality::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = msnet::centrality::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct KatzArgs {
    /// Contact stream (stream.json, a directory, or a .jsonl span file).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Decay rate per tick.
    #[arg(long = "c", default_value_t = 0.0)]
    pub decay: f64,
    /// Query time; defaults to the last contact.
    #[arg(long)]
    pub query_at: Option<u64>,
    /// Output directory; without one the CSV goes to standard output.
    #[arg(long, env = "MSNET_OUT_DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CommunitiesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = msnet::communities::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = msnet::communities::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = msnet::communities::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub node_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub time_threshold: f64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SisArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Per-contact infection probability.
    #[arg(long)]
    pub beta: f64,
    /// Per-step recovery probability.
    #[arg(long)]
    pub mu: f64,
    /// Initially infected services (names or ids), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub steps_per_layer: usize,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Spread only along call direction.
    #[arg(long)]
    pub directed: bool,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = Metric::Frobenius)]
    pub metric: Metric,
    /// Number of states; chosen by silhouette when absent.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct CliquesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Window length in ticks.
    #[arg(long)]
    pub delta: u64,
    /// Largest member set to consider.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Directory holding analysis artifacts.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Conditional-centrality threshold; defaults to min(1, 3/N).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = msnet::detect::DEFAULT_MIN_SLOPE)]
    pub min_slope: f64,
    #[arg(long, default_value_t = msnet::detect::DEFAULT_MIN_SIZE)]
    pub min_size: usize,
    #[arg(long, default_value_t = msnet::detect::DEFAULT_MIN_FRACTION)]
    pub min_fraction: f64,
    #[arg(long, default_value_t = msnet::detect::DEFAULT_MAX_MINORITY_FRACTION)]
    pub max_minority: f64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// report.json, or a directory holding it.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

fn parse_range(s: &str) -> Result<VersionRange, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let start = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
    let end = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
    Ok(VersionRange::new(start, end))
}

fn split_param(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((r, p)) => (r, Some(p)),
        None => (s, None),
    }
}

fn parse_hub(s: &str) -> Result<PlantedEvent, String> {
    let (r, node) = split_param(s);
    let node = node.map(|n| n.parse().map_err(|_| format!("bad node id {n:?}"))).transpose()?;
    Ok(PlantedEvent::Hub { versions: parse_range(r)?, node })
}

fn parse_clique(s: &str) -> Result<PlantedEvent, String> {
    let (r, size) = split_param(s);
    let size = size.ok_or("expected A..B:SIZE")?;
    let size = size.parse().map_err(|_| format!("bad clique size {size:?}"))?;
    Ok(PlantedEvent::Clique { versions: parse_range(r)?, size, nodes: None })
}

fn parse_split(s: &str) -> Result<PlantedEvent, String> {
    let (r, pair) = split_param(s);
    let (node, partner) = match pair {
        None => (None, None),
        Some(p) => {
            let (a, b) = p.split_once(',').ok_or("expected A..B:NODE,PARTNER")?;
            let id = |x: &str| x.parse::<usize>().map_err(|_| format!("bad node id {x:?}"));
            (Some(id(a)?), Some(id(b)?))
        }
    };
    Ok(PlantedEvent::Split { versions: parse_range(r)?, node, partner })
}

fn parse_switch(s: &str) -> Result<PlantedEvent, String> {
    let (r, p) = split_param(s);
    let p = p.ok_or("expected A..B:P")?;
    let edge_prob = p.parse().map_err(|_| format!("bad probability {p:?}"))?;
    Ok(PlantedEvent::StateSwitch { versions: parse_range(r)?, edge_prob })
}
