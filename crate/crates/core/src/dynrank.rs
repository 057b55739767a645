//! Static PageRank and PageRank with an evolving teleportation vector.
//!
//! Static PageRank solves `(I − αP̄) x = (1 − α) v` by Richardson iteration,
//! `x ← αP̄x + (1 − α)v`. Reading the iteration's increment as a derivative
//! gives the linear dynamical system
//!
//! ```text
//! x'(t) = (1 − α) v(t) − (I − αP̄) x(t)
//! ```
//!
//! which [`evolve`] integrates with forward Euler while `v(t)` follows a
//! [`TeleportSeries`]. With a constant `v` the trajectory converges to the
//! static PageRank vector, and with `h = 1` each Euler step is exactly one
//! Richardson step.
//!
//! The eigenvalues of `−(I − αP̄)` lie in `[−1 − α, −(1 − α)]`, so forward
//! Euler is stable for `h < 2 / (1 + α)`. [`EvolveParams`] enforces the
//! stricter `h ≤ 1`, under which every step is a convex combination of
//! probability vectors and stays nonnegative.

use crate::error::{check_len, Error, Result};
use crate::graph::Graph;
use crate::io::TeleportSeries;

/// Tolerance on `|Σx − 1|` for anything treated as a probability vector.
pub const PROBABILITY_TOLERANCE: f64 = 1e-10;

/// Column-sum drift beyond which [`evolve`] renormalizes (and logs).
pub const DRIFT_TOLERANCE: f64 = 1e-8;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "alpha must satisfy 0 <= alpha < 1, got {alpha}"
        )))
    }
}

pub(crate) fn check_probability(name: &str, v: &[f64]) -> Result<()> {
    if let Some((i, x)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_finite() || **x < 0.0)
    {
        return Err(Error::Input(format!(
            "{name}[{i}] = {x} is not a nonnegative number"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(Error::Input(format!("{name} sums to {sum}, expected 1")));
    }
    Ok(())
}

fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Richardson iteration for static PageRank, started from `x₀ = v`.
///
/// Exposed so callers can inspect individual iterates; [`static_pagerank`]
/// drives it to convergence.
#[derive(Debug, Clone)]
pub struct Richardson<'g> {
    graph: &'g Graph,
    alpha: f64,
    v: Vec<f64>,
    x: Vec<f64>,
    next: Vec<f64>,
    iteration: usize,
}

impl<'g> Richardson<'g> {
    pub fn new(graph: &'g Graph, alpha: f64, v: &[f64]) -> Result<Self> {
        check_alpha(alpha)?;
        check_len(graph.node_count(), v.len())?;
        check_probability("v", v)?;
        Ok(Self {
            graph,
            alpha,
            v: v.to_vec(),
            x: v.to_vec(),
            next: vec![0.0; v.len()],
            iteration: 0,
        })
    }

    /// Performs one update and returns `‖x_{k+1} − x_k‖₁`.
    pub fn step(&mut self) -> f64 {
        self.graph
            .transition_apply_into(&self.x, &mut self.next)
            .expect("lengths checked at construction");
        let (alpha, beta) = (self.alpha, 1.0 - self.alpha);
        for (y, &vi) in self.next.iter_mut().zip(&self.v) {
            *y = alpha * *y + beta * vi;
        }
        let delta = l1_distance(&self.x, &self.next);
        std::mem::swap(&mut self.x, &mut self.next);
        self.iteration += 1;
        delta
    }

    pub fn current(&self) -> &[f64] {
        &self.x
    }

    /// Number of updates applied so far.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn into_vector(self) -> Vec<f64> {
        self.x
    }
}

/// Converged static PageRank.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticRank {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖x_k − x_{k−1}‖₁` at termination.
    pub delta: f64,
    /// `‖(1 − α)v − (I − αP̄)x‖₁` for the returned vector.
    pub residual: f64,
}

/// Solves `(I − αP̄) x = (1 − α) v` by Richardson iteration from `x₀ = v`,
/// stopping once successive iterates differ by at most `tol` in 1-norm.
pub fn static_pagerank(
    graph: &Graph,
    alpha: f64,
    v: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<StaticRank> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tol must be positive, got {tol}")));
    }
    let mut iter = Richardson::new(graph, alpha, v)?;
    let mut delta = f64::INFINITY;
    while iter.iteration() < max_iter {
        delta = iter.step();
        if delta <= tol {
            let iterations = iter.iteration();
            let x = iter.into_vector();
            let residual = residual(graph, &x, v, alpha)?;
            return Ok(StaticRank {
                x,
                iterations,
                delta,
                residual,
            });
        }
    }
    let last = iter.into_vector();
    let residual = residual(graph, &last, v, alpha)?;
    Err(Error::NonConvergence {
        iterations: max_iter,
        delta,
        residual,
        last,
    })
}

/// Returns `‖(1 − α)v − (I − αP̄)x‖₁`, the 1-norm of the dynamical system's
/// right-hand side at `x`. It vanishes exactly at the static PageRank of `v`.
pub fn residual(graph: &Graph, x: &[f64], v: &[f64], alpha: f64) -> Result<f64> {
    check_len(graph.node_count(), v.len())?;
    let px = graph.transition_apply(x)?;
    Ok(x.iter()
        .zip(&px)
        .zip(v)
        .map(|((&xi, &pxi), &vi)| ((1.0 - alpha) * vi - xi + alpha * pxi).abs())
        .sum())
}

/// One forward Euler step of size `h`:
/// `(1 − h)x + hαP̄x + h(1 − α)v`, which equals `x + h[(1 − α)v − (I − αP̄)x]`.
pub fn euler_step(graph: &Graph, x: &[f64], v: &[f64], alpha: f64, h: f64) -> Result<Vec<f64>> {
    check_len(graph.node_count(), v.len())?;
    let mut out = vec![0.0; x.len()];
    graph.transition_apply_into(x, &mut out)?;
    combine_step(x, v, alpha, h, &mut out);
    Ok(out)
}

/// Overwrites `px` (holding `P̄x`) with the Euler update. With `h = 1` the
/// first term is an exact zero, so the result matches a Richardson step bit
/// for bit.
fn combine_step(x: &[f64], v: &[f64], alpha: f64, h: f64, px: &mut [f64]) {
    let keep = 1.0 - h;
    let beta = 1.0 - alpha;
    for ((y, &xi), &vi) in px.iter_mut().zip(x).zip(v) {
        *y = keep * xi + h * (alpha * *y) + h * (beta * vi);
    }
}

/// How the teleportation vector moves between data periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Teleport {
    /// `v(t)` jumps to the next period's vector at each period boundary.
    PiecewiseConstant,
    /// `v(t)` is the running exponential average `θ v_p + (1 − θ) v̄_{p−1}`
    /// of the period vectors, renormalized to sum to one.
    Ewma { theta: f64 },
}

/// Integration settings for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveParams {
    pub alpha: f64,
    /// Euler step, `0 < h ≤ 1`.
    pub h: f64,
    /// Integrator steps spent on each data period.
    pub steps_per_period: usize,
    /// Total integration time. `None` integrates over the whole series;
    /// otherwise it must equal `h × steps_per_period × periods`.
    pub t_max: Option<f64>,
    pub teleport: Teleport,
    /// Keep every `sample_every`-th column (columns `0, s, 2s, …`).
    pub sample_every: usize,
}

impl Default for EvolveParams {
    fn default() -> Self {
        Self {
            alpha: 0.85,
            h: 1.0,
            steps_per_period: 5,
            t_max: None,
            teleport: Teleport::PiecewiseConstant,
            sample_every: 1,
        }
    }
}

impl EvolveParams {
    pub fn new(alpha: f64, h: f64, steps_per_period: usize) -> Self {
        Self {
            alpha,
            h,
            steps_per_period,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.h > 0.0 && self.h <= 1.0) {
            return Err(Error::Config(format!(
                "h must satisfy 0 < h <= 1, got {}",
                self.h
            )));
        }
        if self.steps_per_period == 0 {
            return Err(Error::Config("steps_per_period must be positive".into()));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be positive".into()));
        }
        if let Teleport::Ewma { theta } = self.teleport {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::Config(format!(
                    "teleport smoothing theta must be in (0, 1], got {theta}"
                )));
            }
        }
        Ok(())
    }

    /// Total integration time implied by a series of `periods` periods.
    pub fn horizon(&self, periods: usize) -> f64 {
        self.h * (self.steps_per_period * periods) as f64
    }
}

/// Sampled trajectory: column `k` is `x(times[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankSequence {
    times: Vec<f64>,
    columns: Vec<Vec<f64>>,
    h: f64,
}

impl RankSequence {
    /// `h` is the time between consecutive stored columns.
    pub fn new(times: Vec<f64>, columns: Vec<Vec<f64>>, h: f64) -> Result<Self> {
        check_len(times.len(), columns.len())?;
        if columns.is_empty() {
            return Err(Error::Input(
                "rank sequence needs at least one column".into(),
            ));
        }
        let n = columns[0].len();
        for c in &columns {
            check_len(n, c.len())?;
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Input(
                "sample times must be strictly increasing".into(),
            ));
        }
        if !(h > 0.0) {
            return Err(Error::Input(format!(
                "sample spacing must be positive, got {h}"
            )));
        }
        Ok(Self { times, columns, h })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.columns[0].len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The trajectory of a single node across all samples.
    pub fn node_series(&self, node: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[node]).collect()
    }

    /// Keeps columns `0, every, 2·every, …`.
    pub fn subsample(&self, every: usize) -> Result<Self> {
        if every == 0 {
            return Err(Error::Config("subsample stride must be positive".into()));
        }
        Ok(Self {
            times: self.times.iter().step_by(every).copied().collect(),
            columns: self.columns.iter().step_by(every).cloned().collect(),
            h: self.h * every as f64,
        })
    }
}

/// Integrates the dynamic-teleportation system with forward Euler.
///
/// Step `k` (0-based) advances from `t = k·h` to `(k + 1)·h` using the
/// teleportation vector of period `⌊k / steps_per_period⌋`, so period `p`
/// covers `t ∈ [p·s·h, (p + 1)·s·h)`. The output holds `x(h), x(2h), …,
/// x(t_max)`, thinned by `params.sample_every`. The initial condition
/// defaults to the first period's (possibly smoothed) vector.
pub fn evolve(
    graph: &Graph,
    series: &TeleportSeries,
    params: &EvolveParams,
    initial: Option<&[f64]>,
) -> Result<RankSequence> {
    params.validate()?;
    let n = graph.node_count();
    check_len(n, series.node_count())?;
    let periods = series.period_count();
    if periods == 0 {
        return Err(Error::Input("teleport series has no periods".into()));
    }
    let total_steps = params.steps_per_period * periods;
    if let Some(t_max) = params.t_max {
        let expected = params.horizon(periods);
        if (t_max - expected).abs() > 1e-9 * expected.max(1.0) {
            return Err(Error::Config(format!(
                "t_max = {t_max} but h x steps_per_period x periods = {expected}"
            )));
        }
    }

    let mut teleport = TeleportState::new(params.teleport, series);
    let mut x = match initial {
        Some(x0) => {
            check_len(n, x0.len())?;
            check_probability("initial condition", x0)?;
            x0.to_vec()
        }
        None => teleport.vector().to_vec(),
    };

    let keep = total_steps.div_ceil(params.sample_every);
    let mut times = Vec::with_capacity(keep);
    let mut columns = Vec::with_capacity(keep);
    let mut next = vec![0.0; n];
    for k in 0..total_steps {
        if k > 0 && k % params.steps_per_period == 0 {
            teleport.advance(series, k / params.steps_per_period);
        }
        graph.transition_apply_into(&x, &mut next)?;
        combine_step(&x, teleport.vector(), params.alpha, params.h, &mut next);
        std::mem::swap(&mut x, &mut next);

        let mass: f64 = x.iter().sum();
        if (mass - 1.0).abs() > DRIFT_TOLERANCE {
            log::warn!("step {k}: column mass drifted to {mass}; renormalizing");
            x.iter_mut().for_each(|xi| *xi /= mass);
        }
        if k % params.sample_every == 0 {
            times.push((k + 1) as f64 * params.h);
            columns.push(x.clone());
        }
    }
    RankSequence::new(times, columns, params.h * params.sample_every as f64)
}

struct TeleportState {
    mode: Teleport,
    current: Vec<f64>,
}

impl TeleportState {
    fn new(mode: Teleport, series: &TeleportSeries) -> Self {
        Self {
            mode,
            current: series.period(0).to_vec(),
        }
    }

    fn vector(&self) -> &[f64] {
        &self.current
    }

    fn advance(&mut self, series: &TeleportSeries, period: usize) {
        let incoming = series.period(period);
        match self.mode {
            Teleport::PiecewiseConstant => self.current.copy_from_slice(incoming),
            Teleport::Ewma { theta } => {
                for (c, &v) in self.current.iter_mut().zip(incoming) {
                    *c = theta * v + (1.0 - theta) * *c;
                }
                let sum: f64 = self.current.iter().sum();
                self.current.iter_mut().for_each(|c| *c /= sum);
            }
        }
    }
}
