//! Dense reference implementations used as independent oracles.
#![allow(dead_code)]

use dynpr::{Graph, TeleportSeries};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).unwrap()
}

pub fn two_cycle() -> (usize, Vec<(usize, usize)>) {
    (2, vec![(0, 1), (1, 0)])
}

/// `0→1, 1→2, 2→0, 0→2`
pub fn triangle() -> (usize, Vec<(usize, usize)>) {
    (3, vec![(0, 1), (1, 2), (2, 0), (0, 2)])
}

/// `0→1, 0→2, 1→2`; node 2 dangles.
pub fn dangling_three() -> (usize, Vec<(usize, usize)>) {
    (3, vec![(0, 1), (0, 2), (1, 2)])
}

pub fn random_edges(n: usize, max_degree: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for src in 0..n {
        for _ in 0..rng.random_range(0..=max_degree) {
            edges.push((src, rng.random_range(0..n)));
        }
    }
    edges
}

pub type Fixture = (&'static str, usize, Vec<(usize, usize)>);

/// Small directed graphs (n ≤ 10) used by the ODE tests.
pub fn small_fixtures() -> Vec<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (n2, e2) = two_cycle();
    let (n3, e3) = triangle();
    let (nd, ed) = dangling_three();
    vec![
        ("two-cycle", n2, e2),
        ("triangle", n3, e3),
        ("dangling-three", nd, ed),
        ("random-7", 7, random_edges(7, 3, &mut rng)),
        ("random-10", 10, random_edges(10, 4, &mut rng)),
    ]
}

/// Dense `P̄ = Aᵀ D⁻¹` with dangling columns set to `1/n`, built straight from
/// the edge list.
pub fn dense_transition(n: usize, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let mut degree = vec![0usize; n];
    for &(s, _) in edges {
        degree[s] += 1;
    }
    let mut p = DMatrix::zeros(n, n);
    for &(s, d) in edges {
        p[(d, s)] += 1.0 / degree[s] as f64;
    }
    for (s, &deg) in degree.iter().enumerate() {
        if deg == 0 {
            for d in 0..n {
                p[(d, s)] = 1.0 / n as f64;
            }
        }
    }
    p
}

/// `M = I − αP̄`
pub fn system_matrix(n: usize, edges: &[(usize, usize)], alpha: f64) -> DMatrix<f64> {
    DMatrix::identity(n, n) - dense_transition(n, edges) * alpha
}

/// Static PageRank by LU solve of `(I − αP̄) x = (1 − α) v`.
pub fn dense_pagerank(n: usize, edges: &[(usize, usize)], alpha: f64, v: &[f64]) -> Vec<f64> {
    let m = system_matrix(n, edges, alpha);
    let rhs = DVector::from_column_slice(v) * (1.0 - alpha);
    m.lu()
        .solve(&rhs)
        .expect("I - aP is nonsingular")
        .as_slice()
        .to_vec()
}

/// Exact solution of `x' = (1 − α)v_p − Mx` with `v` piecewise constant on
/// periods of length `period_len`, sampled at `times`. Within a period
/// starting at `t₀`, `x(t₀ + τ) = exp(−Mτ)(x(t₀) − x*_p) + x*_p`.
pub fn exact_trajectory(
    n: usize,
    edges: &[(usize, usize)],
    alpha: f64,
    periods: &[Vec<f64>],
    period_len: f64,
    x0: &[f64],
    times: &[f64],
) -> Vec<Vec<f64>> {
    let m = system_matrix(n, edges, alpha);
    let lu = m.clone().lu();
    let fixed: Vec<DVector<f64>> = periods
        .iter()
        .map(|v| {
            lu.solve(&(DVector::from_column_slice(v) * (1.0 - alpha)))
                .unwrap()
        })
        .collect();
    let mut start = DVector::from_column_slice(x0);
    let mut start_period = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let p = ((t / period_len) * (1.0 + 1e-12)).floor() as usize;
        let p = p.min(periods.len());
        while start_period < p {
            let step = (-&m * period_len).exp();
            let xs = &fixed[start_period];
            start = step * (&start - xs) + xs;
            start_period += 1;
        }
        let tau = t - start_period as f64 * period_len;
        let x = if start_period >= periods.len() {
            start.clone()
        } else {
            let xs = &fixed[start_period];
            (-&m * tau).exp() * (&start - xs) + xs
        };
        out.push(x.as_slice().to_vec());
    }
    out
}

/// Classical RK4 with a fine step, used to cross-check [`exact_trajectory`].
#[allow(clippy::too_many_arguments)]
pub fn rk4_trajectory(
    n: usize,
    edges: &[(usize, usize)],
    alpha: f64,
    periods: &[Vec<f64>],
    period_len: f64,
    x0: &[f64],
    t_end: f64,
    substeps_per_period: usize,
) -> Vec<f64> {
    let m = system_matrix(n, edges, alpha);
    let dt = period_len / substeps_per_period as f64;
    let total = (t_end / dt).round() as usize;
    let mut x = DVector::from_column_slice(x0);
    for k in 0..total {
        let b = DVector::from_column_slice(&periods[k / substeps_per_period]) * (1.0 - alpha);
        let f = |y: &DVector<f64>| &b - &m * y;
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (dt / 2.0)));
        let k3 = f(&(&x + &k2 * (dt / 2.0)));
        let k4 = f(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    x.as_slice().to_vec()
}

pub fn random_probability(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_series(n: usize, periods: usize, rng: &mut impl Rng) -> TeleportSeries {
    TeleportSeries::from_dense((0..periods).map(|_| random_probability(n, rng)).collect()).unwrap()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Node ids by descending value, ties by ascending id, via a full sort.
pub fn sorted_order(v: &[f64]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..v.len()).collect();
    ids.sort_by(|&i, &j| v[j].partial_cmp(&v[i]).unwrap().then(i.cmp(&j)));
    ids
}

/// Brute-force isim: materialize both top-j sets at every depth.
pub fn isim_oracle(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    use std::collections::BTreeSet;
    let (oa, ob) = (sorted_order(a), sorted_order(b));
    let mut out = Vec::new();
    let mut acc = 0.0;
    for j in 1..=k {
        let x: BTreeSet<usize> = oa[..j].iter().copied().collect();
        let y: BTreeSet<usize> = ob[..j].iter().copied().collect();
        acc += x.symmetric_difference(&y).count() as f64 / (2 * j) as f64;
        out.push(acc / j as f64);
    }
    out
}
