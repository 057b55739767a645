//! Command-line front end. The binary parses [`Cli`] and hands it to [`run`].

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynrank::{evolve, static_pagerank, EvolveParams, Teleport};
use crate::error::{Error, Result};
use crate::forecast::{compare_models, CompareConfig};
use crate::graph::{load_edge_list, Graph};
use crate::io::{self as fileio, Layout, TeleportSeries};
use crate::scores::{self, At, ScoreKind, ScoreVector, Summary};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dynpr",
    version,
    about = "PageRank with an evolving teleportation vector"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Static PageRank for one teleportation vector.
    Static(StaticArgs),
    /// Integrate the rank dynamics over a teleportation series.
    Evolve(EvolveArgs),
    /// Collapse a stored rank sequence into one score per node.
    Scores(ScoresArgs),
    /// Intersection similarity profile of two score files.
    Isim(IsimArgs),
    /// Compare forecasting with and without dynamic rank features.
    Forecast(ForecastArgs),
    /// Write a seeded synthetic graph and interest series.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DampingArgs {
    /// Probability of following an out-edge instead of teleporting
    /// (0.85, the usual PageRank damping).
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub damping: DampingArgs,
    /// Euler step, 0 < h <= 1 (1 makes each step a power-method step).
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Integrator steps per data period (5: a handful of power-method
    /// sweeps between data updates).
    #[arg(long, default_value_t = 5)]
    pub steps_per_period: usize,
    /// Smooth the teleportation vector across periods with this EWMA factor
    /// instead of switching abruptly.
    #[arg(long)]
    pub teleport_theta: Option<f64>,
}

impl DynamicsArgs {
    fn params(&self) -> EvolveParams {
        EvolveParams {
            teleport: match self.teleport_theta {
                Some(theta) => Teleport::Ewma { theta },
                None => Teleport::PiecewiseConstant,
            },
            ..EvolveParams::new(self.damping.alpha, self.h, self.steps_per_period)
        }
    }
}

#[derive(Debug, Args)]
pub struct StaticArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Teleport series (`period node count`); uniform teleportation when absent.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Which period of the series to use.
    #[arg(long, default_value_t = 0)]
    pub period: usize,
    #[command(flatten)]
    pub damping: DampingArgs,
    /// Stop when successive iterates differ by at most this in 1-norm.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Triples,
    Dense,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Teleport series (`period node count`).
    #[arg(long)]
    pub series: PathBuf,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Keep every k-th column.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    #[arg(long, value_enum, default_value_t = LayoutArg::Triples)]
    pub layout: LayoutArg,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Transient,
    Cumulative,
    Difference,
    Mean,
    Min,
    Max,
    Variance,
}

#[derive(Debug, Args)]
pub struct ScoresArgs {
    /// Rank sequence written by `evolve`.
    #[arg(long)]
    pub sequence: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Sample time for `transient` scores, or `last`.
    #[arg(long, default_value = "last")]
    pub at: String,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IsimArgs {
    /// First score file.
    #[arg(long)]
    pub a: PathBuf,
    /// Second score file.
    #[arg(long)]
    pub b: PathBuf,
    /// Deepest prefix compared; clamped to the node count.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Teleport series (`period node count`).
    #[arg(long)]
    pub series: PathBuf,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Number of lagged values per feature.
    #[arg(long, default_value_t = 3)]
    pub w: usize,
    /// Feature smoothing factor (0.7 suits dense hourly data, 0.3 sparse
    /// monthly data).
    #[arg(long, default_value_t = 0.7)]
    pub theta: f64,
    /// Nodes in each of the volatile and stable groups (capped at n/2).
    #[arg(long, default_value_t = 1000)]
    pub partition_size: usize,
    /// Trailing periods held out for evaluation.
    #[arg(long, default_value_t = 1)]
    pub holdout: usize,
    /// Fit a separate model per node instead of one pooled model.
    #[arg(long)]
    pub per_node: bool,
    /// Name written in the report's dataset column.
    #[arg(long, default_value = "synthetic")]
    pub dataset: String,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 8)]
    pub avg_degree: usize,
    #[arg(long, default_value_t = 20)]
    pub periods: usize,
    /// Directory receiving `graph.txt` and `series.txt`.
    #[arg(long)]
    pub output: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))
}

fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Error::Input(format!("cannot create {}: {e}", p.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> Result<Graph> {
    load_edge_list(open(path)?)
}

fn load_series(path: &Path, n: usize) -> Result<TeleportSeries> {
    fileio::load_teleport_series(open(path)?, n)
}

/// Executes one subcommand.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Static(args) => run_static(args),
        Command::Evolve(args) => run_evolve(args),
        Command::Scores(args) => run_scores(args),
        Command::Isim(args) => run_isim(args),
        Command::Forecast(args) => run_forecast(args),
        Command::Synth(args) => run_synth(args),
    }
}

fn run_static(args: StaticArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let n = graph.node_count();
    let v = match &args.series {
        Some(path) => {
            let series = load_series(path, n)?;
            if args.period >= series.period_count() {
                return Err(Error::Config(format!(
                    "--period {} but the series has {} periods",
                    args.period,
                    series.period_count()
                )));
            }
            series.period(args.period).to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let rank = static_pagerank(&graph, args.damping.alpha, &v, args.tol, args.max_iter)?;
    log::info!(
        "converged in {} iterations, residual {:e}",
        rank.iterations,
        rank.residual
    );
    let scores = ScoreVector::new(rank.x, ScoreKind::Static)?;
    let mut out = create(args.output.as_deref())?;
    fileio::write_scores(&scores, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_evolve(args: EvolveArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let series = load_series(&args.series, graph.node_count())?;
    let seq = evolve(&graph, &series, &args.dynamics.params(), None)?;
    let layout = match args.layout {
        LayoutArg::Triples => Layout::Triples,
        LayoutArg::Dense => Layout::Dense,
    };
    let mut out = create(args.output.as_deref())?;
    fileio::write_rank_sequence(&seq, &mut out, layout, args.every)?;
    out.flush()?;
    Ok(())
}

fn run_scores(args: ScoresArgs) -> Result<()> {
    let seq = fileio::load_rank_sequence(open(&args.sequence)?)?;
    let scores = match args.kind {
        KindArg::Transient => {
            let at = if args.at == "last" {
                At::Last
            } else {
                At::Time(args.at.parse().map_err(|_| {
                    Error::Config(format!("--at expects a time or `last`, got {:?}", args.at))
                })?)
            };
            scores::transient_rank(&seq, at)?
        }
        KindArg::Cumulative => scores::cumulative_rank(&seq),
        KindArg::Difference => scores::difference_rank(&seq),
        KindArg::Mean => scores::summarize(&seq, Summary::Mean),
        KindArg::Min => scores::summarize(&seq, Summary::Min),
        KindArg::Max => scores::summarize(&seq, Summary::Max),
        KindArg::Variance => scores::summarize(&seq, Summary::Variance),
    };
    let mut out = create(args.output.as_deref())?;
    fileio::write_scores(&scores, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_isim(args: IsimArgs) -> Result<()> {
    let a = fileio::load_scores(open(&args.a)?)?;
    let b = fileio::load_scores(open(&args.b)?)?;
    let mut k = args.k;
    if k > a.len() {
        log::warn!("--k {k} exceeds the {} scored nodes; clamping", a.len());
        k = a.len();
    }
    let profile = scores::intersection_similarity(&a, &b, k)?;
    let mut out = create(args.output.as_deref())?;
    fileio::write_profile(&profile, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_forecast(args: ForecastArgs) -> Result<()> {
    let graph = load_graph(&args.graph)?;
    let n = graph.node_count();
    let series = load_series(&args.series, n)?;
    let params = args.dynamics.params();
    let seq = evolve(&graph, &series, &params, None)?;
    let difference = scores::difference_rank(&seq);

    let steps = params.steps_per_period;
    let period_ends: Vec<&[f64]> = (0..series.period_count())
        .map(|p| seq.column((p + 1) * steps - 1))
        .collect();
    let ranks: Vec<Vec<f64>> = (0..n)
        .map(|i| period_ends.iter().map(|c| c[i]).collect())
        .collect();
    let pageviews: Vec<Vec<f64>> = (0..n).map(|i| series.node_counts(i)).collect();

    let config = CompareConfig {
        dataset: args.dataset,
        w: args.w,
        theta: args.theta,
        partition_size: args.partition_size,
        holdout: args.holdout,
        per_node: args.per_node,
        ..CompareConfig::default()
    };
    let report = compare_models(&pageviews, &ranks, &difference, &config)?;
    log::info!("\n{report}");
    let mut out = create(args.output.as_deref())?;
    report.write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        nodes: args.nodes,
        avg_degree: args.avg_degree,
        periods: args.periods,
        seed: args.seed,
    };
    let (graph, series) = generate(&config)?;
    std::fs::create_dir_all(&args.output)?;
    let mut g = create(Some(&args.output.join("graph.txt")))?;
    fileio::write_edge_list(&graph, &mut g)?;
    g.flush()?;
    let mut s = create(Some(&args.output.join("series.txt")))?;
    fileio::write_teleport_series(&series, &mut s)?;
    s.flush()?;
    Ok(())
}
