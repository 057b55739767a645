//! Sparse directed graphs and the random-walk transition operator.
//!
//! A [`Graph`] stores out-edges in compressed form (one offset per source
//! node, followed by the concatenated destination lists). The operator
//! applied by [`Graph::transition_apply`] is the transposed, column-stochastic
//! transition matrix of the uniform random walk, `P = Aᵀ D⁻¹`, with the zero
//! columns of dangling nodes (out-degree 0) replaced by the uniform
//! distribution `e / n`. The repaired operator does not depend on the
//! teleportation vector, so it stays fixed while the teleportation evolves.

use std::io::BufRead;

use crate::error::{check_len, Error, Result};

/// Immutable directed multigraph over the dense node ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    dangling: Vec<usize>,
}

impl Graph {
    /// Builds a graph from `(src, dst)` pairs. Duplicate edges are kept, so a
    /// node with two edges to the same target sends `2 / deg` of its mass there.
    /// Each node's edges keep their input order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("graph must have at least one node".into()));
        }
        let mut counts = vec![0usize; n];
        for &(src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::Input(format!(
                    "edge ({src}, {dst}) has an endpoint outside 0..{n}"
                )));
            }
            counts[src] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; edges.len()];
        for &(src, dst) in edges {
            targets[cursor[src]] = dst;
            cursor[src] += 1;
        }
        let dangling = (0..n).filter(|&i| counts[i] == 0).collect();
        Ok(Self {
            n,
            offsets,
            targets,
            dangling,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Destinations of `node`'s out-edges, duplicates included.
    pub fn successors(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Nodes with no out-edges, ascending.
    pub fn dangling(&self) -> &[usize] {
        &self.dangling
    }

    /// Iterates over all edges as `(src, dst)`, grouped by source.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |src| self.successors(src).iter().map(move |&dst| (src, dst)))
    }

    /// Computes `y = P̄ x`, where `P̄` is the transition matrix with dangling
    /// columns set to `1/n`.
    pub fn transition_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.transition_apply_into(x, &mut y)?;
        Ok(y)
    }

    /// In-place form of [`Graph::transition_apply`].
    ///
    /// Summation order is fixed, so results are reproducible bit for bit:
    /// every entry starts at `(Σ_{dangling i} x_i) / n` (dangling ids
    /// ascending), then sources are visited in ascending id order and each
    /// out-edge adds `x_src / deg(src)` to its destination in stored order.
    pub fn transition_apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        check_len(self.n, y.len())?;
        let dangling_mass: f64 = self.dangling.iter().map(|&i| x[i]).sum();
        y.fill(dangling_mass / self.n as f64);
        for (&xs, bounds) in x.iter().zip(self.offsets.windows(2)) {
            let edges = &self.targets[bounds[0]..bounds[1]];
            if edges.is_empty() {
                continue;
            }
            let share = xs / edges.len() as f64;
            for &dst in edges {
                y[dst] += share;
            }
        }
        Ok(())
    }
}

/// Parses a whitespace-separated edge list.
///
/// Each non-blank line is `src dst` with 0-based ids; lines starting with `#`
/// are comments. An optional `%n <count>` line fixes the node count, which
/// otherwise is one more than the largest id seen.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("%n") {
            let count = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad node-count header {trimmed:?}"),
            })?;
            declared_n = Some(count);
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `src dst`, found {trimmed:?}"),
            });
        };
        let src = parse_id(a, lineno)?;
        let dst = parse_id(b, lineno)?;
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push((src, dst));
    }
    let seen = max_id.map_or(0, |m| m + 1);
    let n = match declared_n {
        Some(n) if n < seen => {
            return Err(Error::Input(format!(
                "header declares {n} nodes but id {} appears",
                seen - 1
            )))
        }
        Some(n) => n,
        None => seen,
    };
    Graph::from_edges(n, &edges)
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    let value = token.parse::<i64>().map_err(|_| Error::Parse {
        line,
        message: format!("node id {token:?} is not an integer"),
    })?;
    usize::try_from(value).map_err(|_| Error::Parse {
        line,
        message: format!("node id {value} is negative"),
    })
}
