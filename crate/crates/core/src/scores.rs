//! Single-number node scores extracted from a rank trajectory, and ranking
//! comparison by intersection similarity.

use std::cmp::Ordering;

use crate::dynrank::RankSequence;
use crate::error::{check_len, Error, Result};
use crate::io::TeleportSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Static,
    Transient,
    Cumulative,
    Difference,
    /// Any other summary over the trajectory (mean, min, max, variance).
    Summary,
    /// Derived from data outside the ranking, e.g. total page views.
    External,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Static => "static",
            Self::Transient => "transient",
            Self::Cumulative => "cumulative",
            Self::Difference => "difference",
            Self::Summary => "summary",
            Self::External => "external",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Self::Static,
            Self::Transient,
            Self::Cumulative,
            Self::Difference,
            Self::Summary,
            Self::External,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

/// One score per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub kind: ScoreKind,
}

impl ScoreVector {
    pub fn new(values: Vec<f64>, kind: ScoreKind) -> Result<Self> {
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!("score of node {i} is not finite")));
        }
        if kind == ScoreKind::Difference && values.iter().any(|&x| x < 0.0) {
            return Err(Error::Input("difference scores must be nonnegative".into()));
        }
        Ok(Self { values, kind })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Which column [`transient_rank`] should return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum At {
    Time(f64),
    Last,
}

/// The trajectory sampled at exactly `at`; no interpolation between samples.
pub fn transient_rank(seq: &RankSequence, at: At) -> Result<ScoreVector> {
    let times = seq.times();
    let k = match at {
        At::Last => times.len() - 1,
        At::Time(t) => {
            let slack = 1e-9 * seq.h();
            match times.iter().position(|&s| (s - t).abs() <= slack) {
                Some(k) => k,
                None => {
                    let split = times.partition_point(|&s| s < t);
                    let nearest =
                        times[split.saturating_sub(1)..(split + 1).min(times.len())].to_vec();
                    return Err(Error::Lookup {
                        requested: t,
                        nearest,
                    });
                }
            }
        }
    };
    ScoreVector::new(seq.column(k).to_vec(), ScoreKind::Transient)
}

/// Left-endpoint quadrature of `∫ x(t) dt`: `h` times the row sums of the
/// sampled matrix. The bias is `O(h)` relative to the true integral.
pub fn cumulative_rank(seq: &RankSequence) -> ScoreVector {
    let mut sums = vec![0.0; seq.node_count()];
    for col in seq.columns() {
        for (s, x) in sums.iter_mut().zip(col) {
            *s += x;
        }
    }
    let h = seq.h();
    sums.iter_mut().for_each(|s| *s *= h);
    ScoreVector {
        values: sums,
        kind: ScoreKind::Cumulative,
    }
}

/// Per-node `max − min` over the sampled columns.
pub fn difference_rank(seq: &RankSequence) -> ScoreVector {
    let first = seq.column(0);
    let mut lo = first.to_vec();
    let mut hi = first.to_vec();
    for col in &seq.columns()[1..] {
        for ((l, h), &x) in lo.iter_mut().zip(hi.iter_mut()).zip(col) {
            *l = l.min(x);
            *h = h.max(x);
        }
    }
    let values = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
    ScoreVector {
        values,
        kind: ScoreKind::Difference,
    }
}

/// Per-node `max − min` of the raw activity counts across periods, the
/// external-interest counterpart of [`difference_rank`].
pub fn count_difference(series: &TeleportSeries) -> ScoreVector {
    let values = (0..series.node_count())
        .map(|node| {
            let counts = series.node_counts(node);
            let hi = counts.iter().copied().fold(f64::MIN, f64::max);
            let lo = counts.iter().copied().fold(f64::MAX, f64::min);
            hi - lo
        })
        .collect();
    ScoreVector {
        values,
        kind: ScoreKind::External,
    }
}

/// Applies `reduce` to each node's trajectory.
pub fn reduce_columns<F>(seq: &RankSequence, kind: ScoreKind, mut reduce: F) -> Result<ScoreVector>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut series = vec![0.0; seq.len()];
    let values = (0..seq.node_count())
        .map(|i| {
            for (s, col) in series.iter_mut().zip(seq.columns()) {
                *s = col[i];
            }
            reduce(&series)
        })
        .collect();
    ScoreVector::new(values, kind)
}

/// Ready-made reducers for [`reduce_columns`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summary {
    Mean,
    Min,
    Max,
    /// Population variance.
    Variance,
}

impl Summary {
    pub fn apply(self, xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        match self {
            Self::Mean => xs.iter().sum::<f64>() / n,
            Self::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            Self::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Self::Variance => {
                let mean = xs.iter().sum::<f64>() / n;
                xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
            }
        }
    }
}

pub fn summarize(seq: &RankSequence, summary: Summary) -> ScoreVector {
    reduce_columns(seq, ScoreKind::Summary, |xs| summary.apply(xs))
        .expect("summaries of finite trajectories are finite")
}

/// Descending by value, ties broken by ascending node id.
fn rank_order(values: &[f64], a: usize, b: usize) -> Ordering {
    values[b].total_cmp(&values[a]).then(a.cmp(&b))
}

/// Ids of the `k` largest scores, best first; equal scores rank the lower id
/// first.
pub fn top_k(score: &ScoreVector, k: usize) -> Result<Vec<usize>> {
    let n = score.len();
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 1,
            max: n,
        });
    }
    let values = &score.values;
    let mut ids: Vec<usize> = (0..n).collect();
    if k < n {
        ids.select_nth_unstable_by(k - 1, |&a, &b| rank_order(values, a, b));
        ids.truncate(k);
    }
    ids.sort_unstable_by(|&a, &b| rank_order(values, a, b));
    Ok(ids)
}

/// `isim_j` for `j = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityProfile {
    values: Vec<f64>,
}

impl SimilarityProfile {
    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    /// `values()[j − 1]` is `isim_j`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Intersection similarity of the two rankings at every depth up to `k`:
///
/// ```text
/// isim_k(a, b) = (1/k) Σ_{j=1..k} |A_j Δ B_j| / (2j)
/// ```
///
/// where `A_j`, `B_j` are the top-`j` sets under [`top_k`]'s ordering.
/// Identical rankings score 0, rankings with disjoint prefixes score 1.
pub fn intersection_similarity(
    a: &ScoreVector,
    b: &ScoreVector,
    k: usize,
) -> Result<SimilarityProfile> {
    check_len(a.len(), b.len())?;
    let top_a = top_k(a, k)?;
    let top_b = top_k(b, k)?;
    let mut in_a = vec![false; a.len()];
    let mut in_b = vec![false; a.len()];
    let mut common = 0usize;
    let mut running = 0.0;
    let mut values = Vec::with_capacity(k);
    for (j, (&x, &y)) in top_a.iter().zip(&top_b).enumerate() {
        let depth = j + 1;
        in_a[x] = true;
        common += usize::from(in_b[x]);
        in_b[y] = true;
        common += usize::from(in_a[y]);
        let sym_diff = 2 * (depth - common);
        running += sym_diff as f64 / (2 * depth) as f64;
        values.push(running / depth as f64);
    }
    Ok(SimilarityProfile { values })
}
