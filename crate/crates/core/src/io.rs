//! Input parsing and output writers.
//!
//! Every writer emits tab-delimited text with a one-line header naming the
//! columns; floating-point values are written with 17 significant digits so
//! that reading a file back reproduces the values exactly. Lines starting
//! with `#` are comments and are skipped by every reader. Rank-sequence files
//! carry one leading `# step <h>` comment recording the sample spacing.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::dynrank::RankSequence;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scores::{ScoreKind, ScoreVector, SimilarityProfile};

/// Formats a value with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-period external interest (page views, posts, …) and the teleportation
/// vectors derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportSeries {
    n: usize,
    counts: Vec<Vec<(usize, f64)>>,
    periods: Vec<Vec<f64>>,
    labels: Option<BTreeMap<usize, String>>,
}

impl TeleportSeries {
    /// Builds a series from per-period sparse counts, sorted by node id and
    /// with duplicate nodes summed. Each period is normalized to a
    /// probability vector; an all-zero period becomes uniform.
    pub fn from_counts(n: usize, mut counts: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("series must cover at least one node".into()));
        }
        let mut periods = Vec::with_capacity(counts.len());
        for (p, entries) in counts.iter_mut().enumerate() {
            for &(node, c) in entries.iter() {
                if node >= n {
                    return Err(Error::Input(format!(
                        "period {p}: node {node} is not below n = {n}"
                    )));
                }
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::Input(format!(
                        "period {p}: node {node} has invalid count {c}"
                    )));
                }
            }
            entries.sort_by_key(|&(node, _)| node);
            entries.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    earlier.1 += later.1;
                    true
                } else {
                    false
                }
            });
            let mut dense = vec![0.0; n];
            for &(node, c) in entries.iter() {
                dense[node] = c;
            }
            if !normalize(&mut dense) {
                log::warn!("period {p} has no interest; using uniform teleportation");
            }
            periods.push(dense);
        }
        Ok(Self {
            n,
            counts,
            periods,
            labels: None,
        })
    }

    /// Treats each dense vector as one period's counts.
    pub fn from_dense(periods: Vec<Vec<f64>>) -> Result<Self> {
        let n = periods.first().map_or(0, Vec::len);
        let counts = periods
            .into_iter()
            .enumerate()
            .map(|(p, dense)| {
                if dense.len() != n {
                    return Err(Error::Input(format!(
                        "period {p} has length {}, expected {n}",
                        dense.len()
                    )));
                }
                Ok(dense
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, c)| c != 0.0)
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_counts(n, counts)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn period_count(&self) -> usize {
        self.periods.len()
    }

    /// Normalized teleportation vector of period `p`.
    pub fn period(&self, p: usize) -> &[f64] {
        &self.periods[p]
    }

    pub fn periods(&self) -> &[Vec<f64>] {
        &self.periods
    }

    /// Raw (unnormalized) counts of period `p`, sorted by node.
    pub fn counts(&self, p: usize) -> &[(usize, f64)] {
        &self.counts[p]
    }

    /// Raw count of `node` in every period.
    pub fn node_counts(&self, node: usize) -> Vec<f64> {
        self.counts
            .iter()
            .map(|entries| {
                entries
                    .binary_search_by_key(&node, |&(i, _)| i)
                    .map_or(0.0, |pos| entries[pos].1)
            })
            .collect()
    }

    pub fn labels(&self) -> Option<&BTreeMap<usize, String>> {
        self.labels.as_ref()
    }

    pub fn set_labels(&mut self, labels: BTreeMap<usize, String>) {
        self.labels = Some(labels);
    }
}

/// Scales `v` to sum to one. Returns `false` (and fills `v` with `1/n`) when
/// the sum is zero.
pub fn normalize(v: &mut [f64]) -> bool {
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        if sum != 1.0 {
            v.iter_mut().for_each(|x| *x /= sum);
        }
        true
    } else {
        let u = 1.0 / v.len() as f64;
        v.fill(u);
        false
    }
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e.into())),
            Ok(line) => {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_owned())))
                }
            }
        })
}

fn parse_field<T: std::str::FromStr>(token: &str, what: &str, line: usize) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{what} {token:?} is not a valid number"),
    })
}

fn is_header(line: &str) -> bool {
    line.split_whitespace()
        .next()
        .is_some_and(|tok| tok.parse::<f64>().is_err())
}

/// Reads `period node count` triples into a [`TeleportSeries`] over `n` nodes.
///
/// Periods are numbered from 0 and may appear in any order. Missing periods
/// up to the largest id are empty and fall back to uniform teleportation.
/// Repeated `(period, node)` entries are summed. A leading column-name line
/// is skipped.
pub fn load_teleport_series<R: BufRead>(reader: R, n: usize) -> Result<TeleportSeries> {
    let mut by_period: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    let mut first = true;
    for item in data_lines(reader) {
        let (lineno, line) = item?;
        if std::mem::take(&mut first) && is_header(&line) {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [p, node, count] = tokens[..] else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `period node count`, found {line:?}"),
            });
        };
        let p: usize = parse_field(p, "period", lineno)?;
        let node: usize = parse_field(node, "node id", lineno)?;
        let count: f64 = parse_field(count, "count", lineno)?;
        if node >= n {
            return Err(Error::Input(format!(
                "line {lineno}: node {node} is not below n = {n}"
            )));
        }
        if !(count >= 0.0 && count.is_finite()) {
            return Err(Error::Input(format!(
                "line {lineno}: count {count} is negative"
            )));
        }
        by_period.entry(p).or_default().push((node, count));
    }
    let periods = by_period.keys().next_back().map_or(0, |&p| p + 1);
    let mut counts = vec![Vec::new(); periods];
    for (p, entries) in by_period {
        counts[p] = entries;
    }
    TeleportSeries::from_counts(n, counts)
}

/// Writes the raw counts of a series as `period node count` triples.
pub fn write_teleport_series<W: Write>(series: &TeleportSeries, mut sink: W) -> Result<()> {
    writeln!(sink, "period\tnode\tcount")?;
    for p in 0..series.period_count() {
        for &(node, c) in series.counts(p) {
            writeln!(sink, "{p}\t{node}\t{}", fmt_f64(c))?;
        }
    }
    Ok(())
}

/// Reads `id label` lines; the label is the remainder of the line.
pub fn load_labels<R: BufRead>(reader: R) -> Result<BTreeMap<usize, String>> {
    let mut labels = BTreeMap::new();
    for item in data_lines(reader) {
        let (lineno, line) = item?;
        let (id, label) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected `id label`, found {line:?}"),
            })?;
        labels.insert(parse_field(id, "node id", lineno)?, label.trim().to_owned());
    }
    Ok(labels)
}

/// Writes the graph in the edge-list format read by [`crate::graph::load_edge_list`].
pub fn write_edge_list<W: Write>(graph: &Graph, mut sink: W) -> Result<()> {
    writeln!(sink, "%n {}", graph.node_count())?;
    for (src, dst) in graph.edges() {
        writeln!(sink, "{src} {dst}")?;
    }
    Ok(())
}

/// Layout of a rank-sequence file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One `time node value` row per entry.
    Triples,
    /// One row per node; the header lists the sample times.
    Dense,
}

/// Writes every `stride`-th column of `seq` (columns `0, stride, …`).
pub fn write_rank_sequence<W: Write>(
    seq: &RankSequence,
    mut sink: W,
    layout: Layout,
    stride: usize,
) -> Result<()> {
    let thinned;
    let seq = if stride == 1 {
        seq
    } else {
        thinned = seq.subsample(stride)?;
        &thinned
    };
    writeln!(sink, "# step {}", fmt_f64(seq.h()))?;
    match layout {
        Layout::Triples => {
            writeln!(sink, "time\tnode\tvalue")?;
            for (t, col) in seq.times().iter().zip(seq.columns()) {
                let t = fmt_f64(*t);
                for (i, x) in col.iter().enumerate() {
                    writeln!(sink, "{t}\t{i}\t{}", fmt_f64(*x))?;
                }
            }
        }
        Layout::Dense => {
            write!(sink, "node")?;
            for t in seq.times() {
                write!(sink, "\t{}", fmt_f64(*t))?;
            }
            writeln!(sink)?;
            for i in 0..seq.node_count() {
                write!(sink, "{i}")?;
                for col in seq.columns() {
                    write!(sink, "\t{}", fmt_f64(col[i]))?;
                }
                writeln!(sink)?;
            }
        }
    }
    Ok(())
}

/// Reads a file produced by [`write_rank_sequence`], in either layout.
pub fn load_rank_sequence<R: BufRead>(reader: R) -> Result<RankSequence> {
    let mut h: Option<f64> = None;
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("# step") {
            h = Some(parse_field(rest.trim(), "step", i + 1)?);
        } else if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_owned()));
        }
    }
    let Some(((header_line, header), rows)) = lines.split_first() else {
        return Err(Error::Input("rank sequence file is empty".into()));
    };
    let header: Vec<&str> = header.split_whitespace().collect();
    let (times, columns) = match header.first().copied() {
        Some("time") => parse_triples(rows)?,
        Some("node") => parse_dense(&header[1..], *header_line, rows)?,
        _ => {
            return Err(Error::Parse {
                line: *header_line,
                message: "expected a `time node value` or `node <times…>` header".into(),
            })
        }
    };
    let h = match h {
        Some(h) => h,
        None if times.len() >= 2 => times[1] - times[0],
        None => times.first().copied().unwrap_or(1.0),
    };
    RankSequence::new(times, columns, h)
}

fn parse_triples(rows: &[(usize, String)]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut times: Vec<f64> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in rows {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [t, node, value] = tokens[..] else {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("expected `time node value`, found {line:?}"),
            });
        };
        let t: f64 = parse_field(t, "time", *lineno)?;
        let node: usize = parse_field(node, "node id", *lineno)?;
        let value: f64 = parse_field(value, "value", *lineno)?;
        if times.last() != Some(&t) {
            times.push(t);
            columns.push(Vec::new());
        }
        let col = columns.last_mut().unwrap();
        if node != col.len() {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("expected node {} at time {t}, found {node}", col.len()),
            });
        }
        col.push(value);
    }
    Ok((times, columns))
}

fn parse_dense(
    header: &[&str],
    header_line: usize,
    rows: &[(usize, String)],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let times = header
        .iter()
        .map(|t| parse_field(t, "time", header_line))
        .collect::<Result<Vec<f64>>>()?;
    let mut columns = vec![Vec::with_capacity(rows.len()); times.len()];
    for (expected, (lineno, line)) in rows.iter().enumerate() {
        let mut tokens = line.split_whitespace();
        let node: usize = parse_field(tokens.next().unwrap_or(""), "node id", *lineno)?;
        if node != expected {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("expected node {expected}, found {node}"),
            });
        }
        let values = tokens
            .map(|tok| parse_field(tok, "value", *lineno))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != times.len() {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("expected {} values, found {}", times.len(), values.len()),
            });
        }
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    Ok((times, columns))
}

/// Writes `node <kind>` rows.
pub fn write_scores<W: Write>(scores: &ScoreVector, mut sink: W) -> Result<()> {
    writeln!(sink, "node\t{}", scores.kind.name())?;
    for (i, x) in scores.values.iter().enumerate() {
        writeln!(sink, "{i}\t{}", fmt_f64(*x))?;
    }
    Ok(())
}

/// Reads a file produced by [`write_scores`]. Unknown kinds load as
/// [`ScoreKind::External`].
pub fn load_scores<R: BufRead>(reader: R) -> Result<ScoreVector> {
    let mut kind = ScoreKind::External;
    let mut values = Vec::new();
    let mut first = true;
    for item in data_lines(reader) {
        let (lineno, line) = item?;
        if std::mem::take(&mut first) && is_header(&line) {
            if let Some(name) = line.split_whitespace().nth(1) {
                kind = ScoreKind::from_name(name).unwrap_or(ScoreKind::External);
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [node, value] = tokens[..] else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `node value`, found {line:?}"),
            });
        };
        let node: usize = parse_field(node, "node id", lineno)?;
        if node != values.len() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected node {}, found {node}", values.len()),
            });
        }
        values.push(parse_field(value, "value", lineno)?);
    }
    ScoreVector::new(values, kind)
}

/// Writes `k isim` rows for `k = 1..=k_max`.
pub fn write_profile<W: Write>(profile: &SimilarityProfile, mut sink: W) -> Result<()> {
    writeln!(sink, "k\tisim")?;
    for (j, v) in profile.values().iter().enumerate() {
        writeln!(sink, "{}\t{}", j + 1, fmt_f64(*v))?;
    }
    Ok(())
}
