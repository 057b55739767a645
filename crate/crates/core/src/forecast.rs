//! One-step-ahead forecasting of external interest from lagged, smoothed
//! features.
//!
//! Every feature series is smoothed with an exponentially damped moving
//! average, `f̄(t) = θ f(t) + (1 − θ) f̄(t − 1)` with `f̄(0) = f(0)`. A model
//! with window `w` regresses the target `p(t)` on `f̄(t − 1), …, f̄(t − w)` for
//! each feature source plus an intercept, and predicts `p(t + 1)` from
//! `f̄(t), …, f̄(t − w + 1)`. Errors are scored with sMAPE:
//!
//! ```text
//! smape(p̂, p) = mean_i |p̂_i − p_i| / ((|p̂_i| + |p_i|) / 2),   0/0 := 0
//! ```
//!
//! which lies in `[0, 2]`. [`compare_models`] fits a pageview-only base
//! model and a model that also sees the dynamic rank trajectory, and reports
//! their sMAPE on volatile and stable node groups.

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::io::fmt_f64;
use crate::scores::{top_k, ScoreVector};

/// Origin of a feature series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    /// The external interest itself (page views, posts).
    PageViews,
    /// Dynamic PageRank value at the end of each period.
    DynamicRank,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Self::PageViews => "pageviews",
            Self::DynamicRank => "dynamic_rank",
        }
    }
}

/// Values of one feature for one node over consecutive periods.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    pub node: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: Source,
}

impl FeatureSeries {
    /// A series sampled at the period indices `0, 1, …`.
    pub fn per_period(node: usize, source: Source, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|t| t as f64).collect();
        Self::new(node, source, times, values)
    }

    pub fn new(node: usize, source: Source, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_len(times.len(), values.len())?;
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Input(format!(
                "node {node}: feature times must increase"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "node {node}: feature values must be finite"
            )));
        }
        Ok(Self {
            node,
            times,
            values,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "theta must be in (0, 1], got {theta}"
        )))
    }
}

/// Exponentially damped moving average, started at `f̄(0) = f(0)`.
pub fn ewma(series: &FeatureSeries, theta: f64) -> Result<FeatureSeries> {
    check_theta(theta)?;
    if series.is_empty() {
        return Err(Error::Input(format!(
            "node {}: empty feature series",
            series.node
        )));
    }
    Ok(FeatureSeries {
        values: smooth(&series.values, theta),
        ..series.clone()
    })
}

fn smooth(values: &[f64], theta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = values[0];
    for &f in values {
        acc = theta * f + (1.0 - theta) * acc;
        out.push(acc);
    }
    out
}

/// Shape of a model before fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSpec {
    pub w: usize,
    pub theta: f64,
    pub sources: Vec<Source>,
}

impl ForecastSpec {
    pub fn new(w: usize, theta: f64, sources: Vec<Source>) -> Self {
        Self { w, theta, sources }
    }

    fn validate(&self) -> Result<()> {
        if self.w == 0 {
            return Err(Error::Config("window w must be at least 1".into()));
        }
        if self.sources.is_empty() {
            return Err(Error::Config(
                "a model needs at least one feature source".into(),
            ));
        }
        check_theta(self.theta)
    }

    /// Coefficient count: `w` lags per source plus the intercept.
    pub fn width(&self) -> usize {
        self.w * self.sources.len() + 1
    }
}

/// Training data for one node: the raw target `p(t)` and one raw feature
/// series per source.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeHistory {
    pub node: usize,
    pub target: Vec<f64>,
    pub features: Vec<FeatureSeries>,
}

impl NodeHistory {
    fn smoothed(&self, spec: &ForecastSpec) -> Result<Vec<Vec<f64>>> {
        spec.sources
            .iter()
            .map(|&source| {
                let series = self
                    .features
                    .iter()
                    .find(|f| f.source == source)
                    .ok_or_else(|| {
                        Error::Input(format!("node {}: no {} feature", self.node, source.name()))
                    })?;
                check_len(self.target.len(), series.len())?;
                Ok(ewma(series, spec.theta)?.values)
            })
            .collect()
    }
}

/// Fills `row` with `f̄_s(end − 1), …, f̄_s(end − w)` for each source, then 1.
fn lag_row(smoothed: &[Vec<f64>], end: usize, w: usize, row: &mut Vec<f64>) {
    row.clear();
    for series in smoothed {
        row.extend((1..=w).map(|lag| series[end - lag]));
    }
    row.push(1.0);
}

/// Stacks one regression row per `(node, t)` with `w ≤ t < horizon(node)`.
/// Rows end with the intercept column.
pub fn build_design(
    spec: &ForecastSpec,
    data: &[NodeHistory],
    horizon: impl Fn(&NodeHistory) -> usize,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for node in data {
        let smoothed = node.smoothed(spec)?;
        let end = horizon(node).min(node.target.len());
        for t in spec.w..end {
            let mut row = Vec::with_capacity(spec.width());
            lag_row(&smoothed, t, spec.w, &mut row);
            rows.push(row);
            targets.push(node.target[t]);
        }
    }
    Ok((rows, targets))
}

/// A fitted linear forecaster.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    pub w: usize,
    pub theta: f64,
    pub sources: Vec<Source>,
    /// `w` lag weights per source in `sources` order (most recent lag
    /// first), then the intercept.
    pub coefficients: Vec<f64>,
    /// `‖Xb − p‖₂` on the training rows.
    pub training_residual: f64,
}

impl ForecastModel {
    pub fn intercept(&self) -> f64 {
        *self
            .coefficients
            .last()
            .expect("intercept is always present")
    }

    /// Predicts the next value from the `w` most recent smoothed values of
    /// each source, ordered newest first.
    pub fn predict_next(&self, lags: &[Vec<f64>]) -> Result<f64> {
        if lags.len() != self.sources.len() || lags.iter().any(|l| l.len() != self.w) {
            return Err(Error::Input(format!(
                "expected {} lags for each of {} sources",
                self.w,
                self.sources.len()
            )));
        }
        let dot: f64 = lags
            .iter()
            .flatten()
            .zip(&self.coefficients)
            .map(|(x, b)| x * b)
            .sum();
        Ok(dot + self.intercept())
    }

    /// Predicts `p(t)` for every `t ≥ w` of a node history, returning
    /// `(t, prediction)` pairs.
    pub fn predict_history(&self, node: &NodeHistory) -> Result<Vec<(usize, f64)>> {
        let spec = ForecastSpec::new(self.w, self.theta, self.sources.clone());
        let smoothed = node.smoothed(&spec)?;
        let mut row = Vec::with_capacity(spec.width());
        Ok((self.w..node.target.len())
            .map(|t| {
                lag_row(&smoothed, t, self.w, &mut row);
                (
                    t,
                    row.iter().zip(&self.coefficients).map(|(x, b)| x * b).sum(),
                )
            })
            .collect())
    }
}

/// Fits one pooled least-squares model over the rows `w ≤ t < target.len()`
/// of every node.
pub fn fit(spec: &ForecastSpec, data: &[NodeHistory]) -> Result<ForecastModel> {
    fit_until(spec, data, |n| n.target.len())
}

/// Like [`fit`], but each node contributes only targets before `horizon(node)`.
pub fn fit_until(
    spec: &ForecastSpec,
    data: &[NodeHistory],
    horizon: impl Fn(&NodeHistory) -> usize,
) -> Result<ForecastModel> {
    let (rows, targets) = build_design(spec, data, horizon)?;
    if rows.len() < spec.width() {
        return Err(Error::Input(format!(
            "{} training rows cannot determine {} coefficients",
            rows.len(),
            spec.width()
        )));
    }
    let (coefficients, training_residual) = least_squares(&rows, &targets)?;
    Ok(ForecastModel {
        w: spec.w,
        theta: spec.theta,
        sources: spec.sources.clone(),
        coefficients,
        training_residual,
    })
}

/// Minimum-norm least squares via SVD of the column-scaled design matrix.
/// Returns the coefficients and the residual 2-norm.
pub fn least_squares(rows: &[Vec<f64>], targets: &[f64]) -> Result<(Vec<f64>, f64)> {
    check_len(rows.len(), targets.len())?;
    let m = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    if m == 0 || width == 0 {
        return Err(Error::Input("empty regression problem".into()));
    }
    let design = DMatrix::from_fn(m, width, |i, j| rows[i][j]);
    let scale: Vec<f64> = design
        .column_iter()
        .map(|c| {
            let norm = c.norm();
            if norm > 0.0 {
                norm
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = design.clone();
    for (j, s) in scale.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let rhs = DVector::from_column_slice(targets);
    let svd = scaled.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = sigma_max * m.max(width) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < width {
        log::warn!("design matrix has rank {rank} < {width}; using the minimum-norm solution");
    }
    let solution = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::Input(format!("least squares failed: {e}")))?;
    let coefficients: Vec<f64> = solution.iter().zip(&scale).map(|(b, s)| b / s).collect();
    let fitted = &design * DVector::from_column_slice(&coefficients);
    Ok((coefficients, (fitted - rhs).norm()))
}

/// Symmetric mean absolute percentage error; a point where both values are
/// zero contributes zero.
pub fn smape(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_len(actual.len(), predicted.len())?;
    if actual.is_empty() {
        return Err(Error::Input("sMAPE of an empty series".into()));
    }
    let total: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(&f, &a)| {
            let denom = (f.abs() + a.abs()) / 2.0;
            if denom == 0.0 {
                0.0
            } else {
                (f - a).abs() / denom
            }
        })
        .sum();
    Ok(total / actual.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    /// Nodes with the largest difference rank.
    NonStationary,
    /// Nodes with the smallest difference rank.
    Stationary,
}

impl Partition {
    pub fn name(self) -> &'static str {
        match self {
            Self::NonStationary => "non-stationary",
            Self::Stationary => "stationary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    DynamicPageRank,
    Base,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::DynamicPageRank => "dynamic",
            Self::Base => "base",
        }
    }
}

/// Settings for [`compare_models`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub dataset: String,
    pub w: usize,
    pub theta: f64,
    /// Maximum nodes per partition; reduced to `n / 2` on small inputs.
    pub partition_size: usize,
    /// Trailing periods held out for evaluation.
    pub holdout: usize,
    /// Fit one model per node instead of one pooled model per partition.
    pub per_node: bool,
    pub base_sources: Vec<Source>,
    pub dynamic_sources: Vec<Source>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            dataset: "synthetic".into(),
            w: 3,
            theta: 0.7,
            partition_size: 1000,
            holdout: 1,
            per_node: false,
            base_sources: vec![Source::PageViews],
            dynamic_sources: vec![Source::PageViews, Source::DynamicRank],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub partition: Partition,
    pub model: ModelKind,
    pub nodes: usize,
    pub smape: f64,
}

/// Average sMAPE per partition and model.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub dataset: String,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn smape(&self, partition: Partition, model: ModelKind) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.partition == partition && r.model == model)
            .map(|r| r.smape)
    }

    /// Tab-delimited `dataset partition model nodes smape` table, preceded by
    /// a comment stating the sMAPE definition.
    pub fn write<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(
            sink,
            "# smape = mean |forecast - actual| / ((|forecast| + |actual|) / 2), 0/0 = 0"
        )?;
        writeln!(sink, "dataset\tpartition\tmodel\tnodes\tsmape")?;
        for r in &self.rows {
            writeln!(
                sink,
                "{}\t{}\t{}\t{}\t{}",
                self.dataset,
                r.partition.name(),
                r.model.name(),
                r.nodes,
                fmt_f64(r.smape)
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16}{:<16}{:>12}{:>12}",
            "dataset", "forecasting", "dynamic", "base"
        )?;
        for partition in [Partition::NonStationary, Partition::Stationary] {
            let cell = |m| {
                self.smape(partition, m)
                    .map_or("-".to_owned(), |v| format!("{v:.4}"))
            };
            writeln!(
                f,
                "{:<16}{:<16}{:>12}{:>12}",
                self.dataset,
                partition.name(),
                cell(ModelKind::DynamicPageRank),
                cell(ModelKind::Base)
            )?;
        }
        Ok(())
    }
}

/// Splits nodes into the `size` highest and `size` lowest scorers. The size
/// is capped at `n / 2` so the groups never overlap.
pub fn partition_nodes(score: &ScoreVector, size: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = score.len();
    let cap = size.min(n / 2);
    if cap < size {
        log::warn!(
            "partition size {size} exceeds n / 2 = {}; truncating to keep partitions disjoint",
            n / 2
        );
    }
    if cap == 0 {
        return Err(Error::Input(format!(
            "cannot form two nonempty partitions of {n} nodes"
        )));
    }
    let order = top_k(score, n)?;
    let top = order[..cap].to_vec();
    let bottom = order[n - cap..].iter().rev().copied().collect();
    Ok((top, bottom))
}

/// Fits the base and dynamic-rank models on all but the last `holdout`
/// periods and reports their average out-of-sample sMAPE on the volatile and
/// stable partitions of `partition_by`.
///
/// `pageviews[i]` and `ranks[i]` are node `i`'s per-period series.
pub fn compare_models(
    pageviews: &[Vec<f64>],
    ranks: &[Vec<f64>],
    partition_by: &ScoreVector,
    config: &CompareConfig,
) -> Result<Report> {
    check_len(pageviews.len(), ranks.len())?;
    check_len(pageviews.len(), partition_by.len())?;
    let periods = pageviews.first().map_or(0, Vec::len);
    for (pv, rk) in pageviews.iter().zip(ranks) {
        check_len(periods, pv.len())?;
        check_len(periods, rk.len())?;
    }
    if config.holdout == 0 {
        return Err(Error::Config("holdout must be at least one period".into()));
    }
    if periods < config.w + config.holdout + 1 {
        return Err(Error::Input(format!(
            "{periods} periods leave no training rows for w = {} and holdout = {}",
            config.w, config.holdout
        )));
    }
    let (volatile, stable) = partition_nodes(partition_by, config.partition_size)?;
    let history = |node: usize| -> Result<NodeHistory> {
        Ok(NodeHistory {
            node,
            target: pageviews[node].clone(),
            features: vec![
                FeatureSeries::per_period(node, Source::PageViews, pageviews[node].clone())?,
                FeatureSeries::per_period(node, Source::DynamicRank, ranks[node].clone())?,
            ],
        })
    };

    let train_end = periods - config.holdout;
    let mut rows = Vec::new();
    for (partition, nodes) in [
        (Partition::NonStationary, &volatile),
        (Partition::Stationary, &stable),
    ] {
        let histories = nodes
            .iter()
            .map(|&i| history(i))
            .collect::<Result<Vec<_>>>()?;
        for (model, sources) in [
            (ModelKind::DynamicPageRank, &config.dynamic_sources),
            (ModelKind::Base, &config.base_sources),
        ] {
            let spec = ForecastSpec::new(config.w, config.theta, sources.clone());
            let pooled = if config.per_node {
                None
            } else {
                Some(fit_until(&spec, &histories, |_| train_end)?)
            };
            let mut total = 0.0;
            for h in &histories {
                let model = match &pooled {
                    Some(m) => m.clone(),
                    None => fit_until(&spec, std::slice::from_ref(h), |_| train_end)?,
                };
                let predictions = model.predict_history(h)?;
                let (forecast, actual): (Vec<f64>, Vec<f64>) = predictions
                    .into_iter()
                    .filter(|&(t, _)| t >= train_end)
                    .map(|(t, p)| (p, h.target[t]))
                    .unzip();
                total += smape(&forecast, &actual)?;
            }
            rows.push(ReportRow {
                partition,
                model,
                nodes: histories.len(),
                smape: total / histories.len() as f64,
            });
        }
    }
    Ok(Report {
        dataset: config.dataset.clone(),
        rows,
    })
}
