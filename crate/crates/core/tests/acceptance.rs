//! Acceptance criteria. Runs as a plain binary (`harness = false`) so that
//! every criterion prints exactly one PASS/FAIL line; the process exits
//! nonzero if any criterion fails.

// `!(a < b)` is deliberate: a NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use dynpr::forecast::{compare_models, CompareConfig, ModelKind, Partition};
use dynpr::synth::{generate, SynthConfig};
use dynpr::{
    cumulative_rank, difference_rank, evolve, intersection_similarity, static_pagerank, top_k,
    EvolveParams, Graph, RankSequence, Richardson, ScoreKind, ScoreVector, TeleportSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn synthetic_10k() -> (Graph, TeleportSeries) {
    generate(&SynthConfig {
        nodes: 10_000,
        avg_degree: 8,
        periods: 4,
        seed: 2012,
    })
    .unwrap()
}

/// 1. Constant v, α = 0.85, h = 1: ‖x(60) − x_static‖₁ ≤ 1e−4 on every fixture, < 5 s.
fn steady_state(big: &(Graph, TeleportSeries)) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut cases: Vec<(String, Graph, Vec<f64>)> = Vec::new();
    for (name, n, edges) in
        [("two-cycle", two_cycle()), ("triangle", triangle())].map(|(name, (n, e))| (name, n, e))
    {
        cases.push((
            name.into(),
            graph(n, &edges),
            random_probability(n, &mut rng),
        ));
    }
    cases.push((
        "synthetic-10k".into(),
        big.0.clone(),
        big.1.period(0).to_vec(),
    ));

    let mut worst: f64 = 0.0;
    for (name, g, v) in &cases {
        let series = TeleportSeries::from_dense(vec![v.clone()]).unwrap();
        let seq = evolve(g, &series, &EvolveParams::new(0.85, 1.0, 60), None).unwrap();
        let reference = static_pagerank(g, 0.85, v, 1e-14, 100_000).unwrap().x;
        let err = l1(seq.column(59), &reference);
        if err > 1e-4 {
            return outcome(false, format!("{name}: ‖x(60) − x‖₁ = {err:e} > 1e-4"));
        }
        worst = worst.max(err);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 5.0,
        format!(
            "worst ‖x(60) − x‖₁ = {worst:.3e} ≤ 1e-4 over {} fixtures in {secs:.2} s (< 5 s)",
            cases.len()
        ),
    )
}

/// 2. h = 1, constant v: evolve column k equals Richardson iterate k (≤ 1e−14).
fn richardson_equivalence(big: &(Graph, TeleportSeries)) -> Outcome {
    let (g, s) = big;
    let v = s.period(0).to_vec();
    let series = TeleportSeries::from_dense(vec![v.clone()]).unwrap();
    let seq = evolve(g, &series, &EvolveParams::new(0.85, 1.0, 100), None).unwrap();
    let mut rich = Richardson::new(g, 0.85, &v).unwrap();
    let mut worst: f64 = 0.0;
    for col in seq.columns() {
        rich.step();
        worst = worst.max(max_abs(col, rich.current()));
    }
    outcome(
        worst <= 1e-14 && seq.len() == 100,
        format!(
            "max-abs deviation {worst:e} over {} steps (≤ 1e-14)",
            seq.len()
        ),
    )
}

/// 3. Forward Euler error at t = 5 halves as h halves, on every fixture with n ≤ 10.
fn ode_convergence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ratios = Vec::new();
    for (name, n, edges) in small_fixtures() {
        let periods: Vec<Vec<f64>> = (0..5).map(|_| random_probability(n, &mut rng)).collect();
        let series = TeleportSeries::from_dense(periods.clone()).unwrap();
        let exact = &exact_trajectory(n, &edges, 0.85, &periods, 1.0, &periods[0], &[5.0])[0];
        let g = graph(n, &edges);
        let errors: Vec<f64> = [(0.1, 10), (0.05, 20), (0.025, 40)]
            .iter()
            .map(|&(h, steps)| {
                let seq = evolve(&g, &series, &EvolveParams::new(0.85, h, steps), None).unwrap();
                max_abs(seq.column(seq.len() - 1), exact)
            })
            .collect();
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            if !(1.5..=2.5).contains(&ratio) {
                return outcome(false, format!("{name}: errors {errors:?}, ratio {ratio}"));
            }
            ratios.push(ratio);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    outcome(
        secs < 10.0,
        format!("error ratios per halving in [{lo:.3}, {hi:.3}] ⊂ [1.5, 2.5] on {} graphs in {secs:.2} s (< 10 s)", ratios.len() / 2),
    )
}

/// 4. 1,000 steps with random per-period v: columns sum to 1 ± 1e−10 and stay ≥ 0.
fn conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (big, _) = generate(&SynthConfig {
        nodes: 2_000,
        avg_degree: 6,
        periods: 1,
        seed: 4,
    })
    .unwrap();
    let (n3, e3) = dangling_three();
    let mut worst: f64 = 0.0;
    let mut columns = 0;
    for (g, h) in [(big, 1.0), (graph(n3, &e3), 0.3)] {
        let n = g.node_count();
        let series = random_series(n, 200, &mut rng);
        let seq = evolve(&g, &series, &EvolveParams::new(0.85, h, 5), None).unwrap();
        for col in seq.columns() {
            if col.iter().any(|&x| x < 0.0) {
                return outcome(false, "negative entry found");
            }
            worst = worst.max((col.iter().sum::<f64>() - 1.0).abs());
        }
        columns += seq.len();
    }
    outcome(
        worst <= 1e-10,
        format!("{columns} columns nonnegative, worst |Σx − 1| = {worst:e} (≤ 1e-10)"),
    )
}

/// 5. cumulative, difference, top-k, isim against brute force on 200 instances.
fn score_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.random_range(1..=50);
        let k_cols = rng.random_range(1..=20);
        let h = rng.random_range(0.01..1.0);
        // Quantized values make ties common.
        let draw = |rng: &mut ChaCha8Rng| {
            (rng.random_range(0..16) as f64) / 16.0 + rng.random_range(0..2) as f64 * 1e-3
        };
        let cols: Vec<Vec<f64>> = (0..k_cols)
            .map(|_| (0..n).map(|_| draw(&mut rng)).collect())
            .collect();
        let times = (1..=k_cols).map(|i| i as f64 * h).collect();
        let seq = RankSequence::new(times, cols.clone(), h).unwrap();

        let c = cumulative_rank(&seq);
        let d = difference_rank(&seq);
        for i in 0..n {
            let naive: f64 = cols.iter().map(|col| col[i] * h).sum();
            let hi = cols.iter().map(|col| col[i]).fold(f64::MIN, f64::max);
            let lo = cols.iter().map(|col| col[i]).fold(f64::MAX, f64::min);
            worst = worst
                .max((c.values[i] - naive).abs())
                .max((d.values[i] - (hi - lo)).abs());
        }

        let a: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
        let k = rng.random_range(1..=n);
        let sa = ScoreVector::new(a.clone(), ScoreKind::External).unwrap();
        let sb = ScoreVector::new(b.clone(), ScoreKind::External).unwrap();
        if top_k(&sa, k).unwrap() != sorted_order(&a)[..k] {
            return outcome(
                false,
                format!("instance {case}: top-k differs from full sort"),
            );
        }
        let got = intersection_similarity(&sa, &sb, k).unwrap();
        let want = isim_oracle(&a, &b, k);
        worst = worst.max(max_abs(got.values(), &want));
    }
    outcome(
        worst <= 1e-12,
        format!("200 instances: top-k sets identical, worst numeric deviation {worst:e} (≤ 1e-12)"),
    )
}

/// 6. isim(x, x) = 0 on every fixture; disjoint top-k sets give isim_j = 1.
fn isim_anchors(big: &(Graph, TeleportSeries)) -> Outcome {
    let mut vectors: Vec<ScoreVector> = Vec::new();
    for (_, n, edges) in small_fixtures() {
        let v = vec![1.0 / n as f64; n];
        let x = static_pagerank(&graph(n, &edges), 0.85, &v, 1e-12, 10_000)
            .unwrap()
            .x;
        vectors.push(ScoreVector::new(x, ScoreKind::Static).unwrap());
    }
    let seq = evolve(&big.0, &big.1, &EvolveParams::default(), None).unwrap();
    vectors.push(difference_rank(&seq));
    vectors.push(cumulative_rank(&seq));
    for s in &vectors {
        let k = s.len().min(1000);
        let p = intersection_similarity(s, s, k).unwrap();
        if p.values().iter().any(|&v| v != 0.0) {
            return outcome(false, "nonzero self-similarity");
        }
    }
    let n = 200;
    let a: Vec<f64> = (0..n)
        .map(|i| if i < n / 2 { (n - i) as f64 } else { 0.0 })
        .collect();
    let b: Vec<f64> = (0..n)
        .map(|i| if i >= n / 2 { i as f64 } else { 0.0 })
        .collect();
    let sa = ScoreVector::new(a, ScoreKind::External).unwrap();
    let sb = ScoreVector::new(b, ScoreKind::External).unwrap();
    let p = intersection_similarity(&sa, &sb, n / 2).unwrap();
    let disjoint_ok = p.values().iter().all(|&v| v == 1.0);
    outcome(
        disjoint_ok,
        format!(
            "self-similarity 0 on {} score vectors; disjoint top-100 gives isim_j = 1 for all j",
            vectors.len()
        ),
    )
}

/// Per-node rank at the end of each period and targets built from its EWMA.
fn forecast_panel(
    seed: u64,
    noise: f64,
    theta: f64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, ScoreVector) {
    let periods = 24;
    let steps = 5;
    let (g, s) = generate(&SynthConfig {
        nodes: 400,
        avg_degree: 6,
        periods,
        seed,
    })
    .unwrap();
    let n = g.node_count();
    let seq = evolve(&g, &s, &EvolveParams::new(0.85, 1.0, steps), None).unwrap();
    let d = difference_rank(&seq);
    let ranks: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..periods)
                .map(|p| seq.column((p + 1) * steps - 1)[i])
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let scale = 1000.0 * n as f64;
    let targets = ranks
        .iter()
        .map(|r| {
            let mut avg = r[0];
            let mut smoothed = Vec::with_capacity(periods);
            for &x in r {
                avg = theta * x + (1.0 - theta) * avg;
                smoothed.push(avg);
            }
            (0..periods)
                .map(|t| {
                    let signal = scale * smoothed[t.saturating_sub(1)];
                    signal * (1.0 + noise * rng.random_range(-1.0..1.0))
                })
                .collect()
        })
        .collect();
    (targets, ranks, d)
}

/// 7. Augmented model beats the base model on the volatile partition for 10
///    seeds with 5% noise; noiseless data is recovered with sMAPE ≤ 1e−6.
fn forecast_property() -> Outcome {
    let config = CompareConfig {
        partition_size: 100,
        ..CompareConfig::default()
    };
    let mut margins = Vec::new();
    for seed in 0..10 {
        let (targets, ranks, d) = forecast_panel(seed, 0.05, config.theta);
        let report = compare_models(&targets, &ranks, &d, &config).unwrap();
        let dynamic = report
            .smape(Partition::NonStationary, ModelKind::DynamicPageRank)
            .unwrap();
        let base = report
            .smape(Partition::NonStationary, ModelKind::Base)
            .unwrap();
        if !(dynamic < base) {
            return outcome(
                false,
                format!("seed {seed}: dynamic {dynamic} ≥ base {base}"),
            );
        }
        margins.push((dynamic, base));
    }
    let (targets, ranks, d) = forecast_panel(99, 0.0, config.theta);
    let report = compare_models(&targets, &ranks, &d, &config).unwrap();
    let exact = report
        .smape(Partition::NonStationary, ModelKind::DynamicPageRank)
        .unwrap();
    let avg_dyn = margins.iter().map(|m| m.0).sum::<f64>() / 10.0;
    let avg_base = margins.iter().map(|m| m.1).sum::<f64>() / 10.0;
    outcome(
        exact <= 1e-6,
        format!(
            "volatile sMAPE dynamic < base on 10/10 seeds (mean {avg_dyn:.4} vs {avg_base:.4}); noiseless sMAPE {exact:.2e} (≤ 1e-6)"
        ),
    )
}

fn run_pipeline(dir: &std::path::Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_dynpr");
    let p = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let data = p("data");
    let (g, s) = (format!("{data}/graph.txt"), format!("{data}/series.txt"));
    let steps: Vec<Vec<String>> = vec![
        vec![
            "synth",
            "--seed",
            "17",
            "--nodes",
            "2000",
            "--periods",
            "10",
            "--output",
            &data,
        ],
        vec![
            "static",
            "--graph",
            &g,
            "--series",
            &s,
            "--output",
            &p("static.tsv"),
        ],
        vec![
            "evolve",
            "--graph",
            &g,
            "--series",
            &s,
            "--output",
            &p("seq.tsv"),
        ],
        vec![
            "evolve",
            "--graph",
            &g,
            "--series",
            &s,
            "--layout",
            "dense",
            "--every",
            "5",
            "--teleport-theta",
            "0.5",
            "--output",
            &p("seq_dense.tsv"),
        ],
        vec![
            "scores",
            "--sequence",
            &p("seq.tsv"),
            "--kind",
            "difference",
            "--output",
            &p("diff.tsv"),
        ],
        vec![
            "scores",
            "--sequence",
            &p("seq.tsv"),
            "--kind",
            "cumulative",
            "--output",
            &p("cum.tsv"),
        ],
        vec![
            "scores",
            "--sequence",
            &p("seq.tsv"),
            "--kind",
            "transient",
            "--output",
            &p("last.tsv"),
        ],
        vec![
            "isim",
            "--a",
            &p("diff.tsv"),
            "--b",
            &p("static.tsv"),
            "--output",
            &p("isim.tsv"),
        ],
        vec![
            "forecast",
            "--graph",
            &g,
            "--series",
            &s,
            "--partition-size",
            "200",
            "--output",
            &p("report.tsv"),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for args in steps {
        let out = Command::new(bin)
            .args(&args)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    Ok(())
}

fn files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("data")] {
        let mut entries: Vec<_> = fs::read_dir(&sub)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries.into_iter().filter(|p| p.is_file()) {
            out.push((
                path.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&path).unwrap(),
            ));
        }
    }
    out
}

/// 8. Two runs of the full pipeline with the same seed are byte-identical.
fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        if let Err(e) = run_pipeline(dir.path()) {
            return outcome(false, format!("pipeline failed: {e}"));
        }
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    let identical = fa == fb;
    let bytes: usize = fa.iter().map(|f| f.1.len()).sum();
    outcome(
        identical && fa.len() == 10,
        format!(
            "{} output files ({bytes} bytes) byte-identical across runs: {identical}",
            fa.len()
        ),
    )
}

fn main() -> ExitCode {
    let big = synthetic_10k();
    let criteria: Vec<Criterion> = vec![
        (
            "AC1 steady-state generalization",
            Box::new(|| steady_state(&big)),
        ),
        (
            "AC2 Richardson equivalence",
            Box::new(|| richardson_equivalence(&big)),
        ),
        ("AC3 ODE oracle convergence", Box::new(ode_convergence)),
        ("AC4 conservation", Box::new(conservation)),
        ("AC5 score-formula oracles", Box::new(score_oracles)),
        ("AC6 isim anchor values", Box::new(|| isim_anchors(&big))),
        (
            "AC7 forecast pipeline property",
            Box::new(forecast_property),
        ),
        ("AC8 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let result = check();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", result.detail);
        failed += usize::from(!result.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
