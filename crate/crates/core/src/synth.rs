//! Seeded synthetic graphs and interest series, so the whole pipeline can be
//! exercised without external data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::TeleportSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub nodes: usize,
    /// Mean out-degree; each node draws its degree uniformly from
    /// `0..=2·avg_degree`, so some nodes are dangling.
    pub avg_degree: usize,
    pub periods: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            nodes: 1000,
            avg_degree: 8,
            periods: 20,
            seed: 0,
        }
    }
}

/// Random directed graph with uniformly chosen destinations.
pub fn random_graph(nodes: usize, avg_degree: usize, rng: &mut impl Rng) -> Result<Graph> {
    let mut edges = Vec::with_capacity(nodes * avg_degree);
    for src in 0..nodes {
        let degree = rng.random_range(0..=2 * avg_degree);
        edges.extend((0..degree).map(|_| (src, rng.random_range(0..nodes))));
    }
    Graph::from_edges(nodes, &edges)
}

/// Interest profile of one node.
#[derive(Debug, Clone, Copy)]
enum Pattern {
    Steady,
    Seasonal { phase: f64, cycle: f64 },
    Burst { at: usize, height: f64, decay: f64 },
    Trend { slope: f64 },
}

/// Whole-number counts per node and period. Every node has a log-uniform base
/// rate in `[1, 1000)` with multiplicative noise, and follows a steady,
/// seasonal, bursty, or trending profile.
pub fn interest_series(nodes: usize, periods: usize, rng: &mut impl Rng) -> Result<TeleportSeries> {
    let profiles: Vec<(f64, Pattern)> = (0..nodes)
        .map(|_| {
            let base = 10f64.powf(rng.random_range(0.0..3.0));
            let pattern = match rng.random_range(0..4) {
                0 => Pattern::Steady,
                1 => Pattern::Seasonal {
                    phase: rng.random_range(0.0..std::f64::consts::TAU),
                    cycle: rng.random_range(4.0..12.0),
                },
                2 => Pattern::Burst {
                    at: rng.random_range(0..periods.max(1)),
                    height: rng.random_range(5.0..30.0),
                    decay: rng.random_range(0.3..0.8),
                },
                _ => Pattern::Trend {
                    slope: rng.random_range(-0.04..0.08),
                },
            };
            (base, pattern)
        })
        .collect();
    let counts = (0..periods)
        .map(|t| {
            profiles
                .iter()
                .enumerate()
                .filter_map(|(node, &(base, pattern))| {
                    let shape = match pattern {
                        Pattern::Steady => 1.0,
                        Pattern::Seasonal { phase, cycle } => {
                            1.0 + 0.6 * (std::f64::consts::TAU * t as f64 / cycle + phase).sin()
                        }
                        Pattern::Burst { at, height, decay } if t >= at => {
                            1.0 + height * decay.powi((t - at) as i32)
                        }
                        Pattern::Burst { .. } => 1.0,
                        Pattern::Trend { slope } => (1.0 + slope * t as f64).max(0.05),
                    };
                    let noise = rng.random_range(0.8..1.2);
                    let count = (base * shape * noise).round();
                    (count > 0.0).then_some((node, count))
                })
                .collect()
        })
        .collect();
    TeleportSeries::from_counts(nodes, counts)
}

/// Generates a graph and interest series from `config.seed`; identical
/// configurations produce identical data on every platform.
pub fn generate(config: &SynthConfig) -> Result<(Graph, TeleportSeries)> {
    if config.nodes == 0 || config.periods == 0 {
        return Err(Error::Config(
            "synthetic data needs nodes > 0 and periods > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let graph = random_graph(config.nodes, config.avg_degree, &mut rng)?;
    let series = interest_series(config.nodes, config.periods, &mut rng)?;
    Ok((graph, series))
}
