//! PageRank with an evolving teleportation vector.
//!
//! Static PageRank fixes a teleportation distribution `v`. Here `v(t)`
//! follows external interest (page views per hour, posts per month), and the
//! rank vector evolves under
//!
//! ```text
//! x'(t) = (1 − α) v(t) − (I − αP) x(t)
//! ```
//!
//! integrated with forward Euler. When `v` stops changing, `x(t)` converges
//! to ordinary PageRank. The resulting trajectory is summarized into node
//! scores (transient, cumulative, difference), compared across rankings with
//! intersection similarity, and used as a forecasting feature.
//!
//! ```
//! use dynpr::{evolve, load_edge_list, static_pagerank, EvolveParams, TeleportSeries};
//!
//! let graph = load_edge_list("0 1\n1 2\n2 0\n0 2".as_bytes())?;
//! let v = vec![0.2, 0.3, 0.5];
//! let series = TeleportSeries::from_dense(vec![v.clone(); 12])?;
//! let seq = evolve(&graph, &series, &EvolveParams::new(0.85, 1.0, 5), None)?;
//!
//! let exact = static_pagerank(&graph, 0.85, &v, 1e-12, 1000)?;
//! let last = seq.column(seq.len() - 1);
//! let err: f64 = last.iter().zip(&exact.x).map(|(a, b)| (a - b).abs()).sum();
//! assert!(err <= 1e-4);
//! # Ok::<(), dynpr::Error>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynrank;
pub mod error;
pub mod forecast;
pub mod graph;
pub mod io;
pub mod scores;
pub mod synth;

#[cfg(doctest)]
mod book;

pub use dynrank::{
    euler_step, evolve, residual, static_pagerank, EvolveParams, RankSequence, Richardson,
    StaticRank, Teleport,
};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph};
pub use io::{load_teleport_series, TeleportSeries};
pub use scores::{
    cumulative_rank, difference_rank, intersection_similarity, top_k, transient_rank, At,
    ScoreKind, ScoreVector, SimilarityProfile,
};
