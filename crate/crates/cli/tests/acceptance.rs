//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gospa_core::estimators::{optimal_by_enumeration, optimal_gospa2};
use gospa_core::mse::MseEvaluator;
use gospa_core::oracle::{exact_mse, monte_carlo_mse, subset_optimality_probe};
use gospa_core::set_metrics::gospa_alpha2_decomposed;
use gospa_core::sweeps::{cardinality_table, default_locations, region_grid, RegionGrid};
use gospa_core::validation::random_separated_model;
use gospa_core::{
    BernoulliComponent, DetectionVector, EstimatorKind, LabeledPoint, MetricConfig, MetricKind, MultiBernoulli,
    TargetSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed forms match exhaustive enumeration", closed_forms_vs_oracle),
        (
            "assignment-form GOSPA equals permutation form",
            assignment_vs_permutation,
        ),
        ("two-component OSPA example", two_component_example),
        ("GOSPA decision raster is the product rule", gospa_product_rule),
        ("identical components, r = 0.2", cardinality_low),
        ("identical components, r = 0.8", cardinality_high),
        ("OSPA optimum with identical components", ospa_all_or_nothing),
        ("on-location estimates beat perturbed ones", subset_optimality),
        (
            "no spooky effect for GOSPA, witnesses for OSPA and UOSPA",
            spooky_effect,
        ),
        ("Monte-Carlo consistency", monte_carlo_consistency),
        ("deterministic CLI output", deterministic_cli),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let status = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failures += 1;
        }
        println!(
            "{status} criterion {}: {name} ({}) [{:.1}s]",
            k + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn closed_forms_vs_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_err = 0.0f64;
    let mut cases = 0;
    for instance in 0..200 {
        let n = instance % 11;
        let c = rng.gen_range(0.5..3.0);
        let alpha = rng.gen_range(0.05..=2.0);
        let mb = random_separated_model(&mut rng, n, c).unwrap();
        let eval = MseEvaluator::new(&mb, c).unwrap();
        let cfg = MetricConfig::euclidean(2.0, c, alpha).unwrap();
        let vectors: Vec<DetectionVector> = if n <= 6 {
            common::all_vectors(n).collect()
        } else {
            (0..6)
                .map(|_| DetectionVector::new((0..n).map(|_| rng.gen()).collect()))
                .collect()
        };
        for e_hat in &vectors {
            let estimate = mb.report(e_hat).unwrap();
            for kind in MetricKind::ALL {
                let closed = eval.evaluate(kind, e_hat, alpha).unwrap().value;
                let exact = exact_mse(&mb, &estimate, kind, &cfg).unwrap().mean;
                max_err = max_err.max((closed - exact).abs());
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        max_err <= 1e-9 && elapsed <= Duration::from_secs(60),
        format!("200 instances, {cases} comparisons, max error {max_err:.2e}, tolerance 1e-9"),
    )
}

fn assignment_vs_permutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut max_err = 0.0f64;
    let mut identity_exact = true;
    for _ in 0..1000 {
        let dim = rng.gen_range(1..=3);
        let set = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(0..=5);
            TargetSet::new(
                (0..len)
                    .map(|_| LabeledPoint::new((0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect()).unwrap())
                    .collect(),
            )
            .unwrap()
        };
        let x = set(&mut rng);
        let y = set(&mut rng);
        let c = rng.gen_range(0.2..4.0);
        let cfg = MetricConfig::euclidean(2.0, c, 2.0).unwrap();
        let dec = gospa_alpha2_decomposed(&x, &y, &cfg).unwrap();
        let reference = common::gospa_by_permutation(&x, &y, 2.0, c, 2.0);
        max_err = max_err.max((dec.total - reference).abs());
        identity_exact &= dec.total == (dec.localisation_cost + dec.missed_cost + dec.false_cost).sqrt();
    }
    outcome(
        max_err <= 1e-9 && identity_exact,
        format!("1000 pairs, max error {max_err:.2e}, decomposition identity exact: {identity_exact}"),
    )
}

fn two_component_example() -> Outcome {
    let cases = [([0.4, 0.4], [1, 1]), ([0.4, 0.9], [0, 1]), ([0.4, 0.3], [0, 0])];
    let mut got = Vec::new();
    let mut ok = true;
    for (rs, bits) in cases {
        let mb = MultiBernoulli::evenly_spaced(&rs, 10.0).unwrap();
        let e_hat = optimal_by_enumeration(&mb, MetricKind::Ospa, 1.0, 2.0).unwrap().e_hat;
        ok &= e_hat == DetectionVector::from_bits(&bits).unwrap();
        got.push(format!("{rs:?} -> ({e_hat})"));
    }
    outcome(ok, got.join(", "))
}

fn raster(kind: EstimatorKind) -> RegionGrid {
    region_grid(kind, 0.01, 1.0, 2.0, &default_locations()).unwrap()
}

fn gospa_product_rule() -> Outcome {
    let grid = raster(EstimatorKind::OptGospa2);
    let mut mismatches = 0;
    for (i1, &r1) in grid.axis.iter().enumerate() {
        for (i2, &r2) in grid.axis.iter().enumerate() {
            let expected = u8::from(r1 > 0.5) + 2 * u8::from(r2 > 0.5);
            mismatches += usize::from(grid.code(i1, i2) != expected);
        }
    }
    outcome(
        mismatches == 0 && grid.cells.len() == 101 * 101,
        format!("{} cells, {mismatches} mismatching", grid.cells.len()),
    )
}

fn cardinality_low() -> Outcome {
    let table = cardinality_table(0.2, 30, 1.0).unwrap();
    let gospa_ok = table.rows.iter().all(|row| row.gospa == 0);
    let ospa_ok = table
        .rows
        .iter()
        .all(|row| row.ospa == if row.n <= 7 { 0 } else { row.n });
    let uospa: Vec<usize> = table.rows.iter().map(|row| row.uospa).collect();
    let uospa_ok = uospa[..7].iter().all(|&k| k == 0) && uospa.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
    outcome(
        gospa_ok && ospa_ok && uospa_ok,
        format!("gospa zeros: {gospa_ok}, ospa threshold at 8: {ospa_ok}, uospa {uospa:?}"),
    )
}

fn cardinality_high() -> Outcome {
    let table = cardinality_table(0.8, 30, 1.0).unwrap();
    let full_ok = table.rows.iter().all(|row| row.gospa == row.n && row.ospa == row.n);
    let uospa = |n: usize| table.rows[n - 1].uospa;
    let uospa_ok = (1..=7).all(|n| uospa(n) == n) && uospa(8) == 7 && uospa(14) == 12;
    outcome(
        full_ok && uospa_ok,
        format!(
            "gospa and ospa equal N: {full_ok}, uospa at N = 7, 8, 14: {}, {}, {}",
            uospa(7),
            uospa(8),
            uospa(14)
        ),
    )
}

fn ospa_all_or_nothing() -> Outcome {
    let c = 1.0;
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut scenarios = 0;
    for k in 1..20 {
        let r = k as f64 / 20.0;
        for n in 1..=12 {
            let mb = MultiBernoulli::evenly_spaced(&vec![r; n], 10.0).unwrap();
            let eval = MseEvaluator::new(&mb, c).unwrap();
            let mut best = f64::INFINITY;
            let mut best_inner = f64::INFINITY;
            for e_hat in common::all_vectors(n) {
                let v = eval.msospa(&e_hat).unwrap();
                best = best.min(v);
                if e_hat.count() != 0 && e_hat.count() != n {
                    best_inner = best_inner.min(v);
                }
            }
            let all = eval.msospa(&DetectionVector::ones(n)).unwrap();
            let none = eval.msospa(&DetectionVector::zeros(n)).unwrap();
            let err_all = (all - c * c * (1.0 - r)).abs();
            let err_none = (none - c * c * (1.0 - (1.0 - r).powi(n as i32))).abs();
            worst = worst.max(err_all).max(err_none);
            ok &= err_all <= 1e-12 && err_none <= 1e-12;
            ok &= all.min(none) <= best + 1e-12 && best_inner > all.min(none);
            scenarios += 1;
        }
    }
    outcome(
        ok,
        format!("{scenarios} (r, N) pairs, N <= 12, optimum at 0 or N, worst closed-form error {worst:.2e}"),
    )
}

fn subset_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut instances = 0;
    let mut cases = 0;
    let mut min_margin = f64::INFINITY;
    let mut ok = true;
    let mut attempts = 0;
    while instances < 60 && attempts < 1000 {
        attempts += 1;
        let n = rng.gen_range(1..=6);
        let c = rng.gen_range(0.5..2.0);
        let alpha = rng.gen_range(0.05..=2.0);
        let kind = MetricKind::ALL[attempts % 4];
        // gaps of 5c to 8c keep every perturbed point clear of other components
        let mut x = 0.0;
        let components = (0..n)
            .map(|_| {
                let comp = BernoulliComponent::new(rng.gen(), LabeledPoint::scalar(x).unwrap()).unwrap();
                x += c * rng.gen_range(5.0..8.0);
                comp
            })
            .collect();
        let mb = MultiBernoulli::new(components).unwrap();
        let cfg = MetricConfig::euclidean(2.0, c, alpha).unwrap();
        let report = subset_optimality_probe(&mb, &cfg, kind, &[0.1 * c, 0.5 * c, 2.0 * c]).unwrap();
        if report.cases.is_empty() {
            continue;
        }
        instances += 1;
        cases += report.cases.len();
        ok &= report.all_strictly_worse();
        min_margin = min_margin.min(report.min_margin().unwrap());
    }
    outcome(
        ok && instances >= 50,
        format!("{instances} instances, {cases} perturbations, smallest margin {min_margin:.3e}"),
    )
}

fn first_component_flip(grid: &RegionGrid) -> Option<(f64, f64, f64)> {
    for (i1, &r1) in grid.axis.iter().enumerate() {
        for i2 in 1..grid.axis.len() {
            if grid.code(i1, i2) & 1 != grid.code(i1, i2 - 1) & 1 {
                return Some((r1, grid.axis[i2 - 1], grid.axis[i2]));
            }
        }
    }
    None
}

fn spooky_effect() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut changed = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=10);
        let rs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let mb = MultiBernoulli::evenly_spaced(&rs, 10.0).unwrap();
        let j = rng.gen_range(0..n);
        let moved = mb.with_probability(j, rng.gen()).unwrap();
        let before = optimal_gospa2(&mb, 1.0).unwrap().e_hat;
        let after = optimal_gospa2(&moved, 1.0).unwrap().e_hat;
        changed += (0..n).filter(|&i| i != j && before.get(i) != after.get(i)).count();
    }
    let ospa = first_component_flip(&raster(EstimatorKind::OptOspa));
    let uospa = first_component_flip(&raster(EstimatorKind::OptUospa));
    let fmt = |w: Option<(f64, f64, f64)>| match w {
        Some((r1, a, b)) => format!("r1 = {r1}, r2 {a} -> {b}"),
        None => "none".to_owned(),
    };
    outcome(
        changed == 0 && ospa.is_some() && uospa.is_some(),
        format!(
            "500 perturbations, {changed} GOSPA decisions changed; OSPA witness {}; UOSPA witness {}",
            fmt(ospa),
            fmt(uospa)
        ),
    )
}

fn monte_carlo_consistency() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut within = 0;
    for k in 0..20 {
        let kind = MetricKind::ALL[k % 4];
        let n = rng.gen_range(1..=8);
        let c = rng.gen_range(0.5..3.0);
        let alpha = rng.gen_range(0.05..=2.0);
        let mb = random_separated_model(&mut rng, n, c).unwrap();
        let cfg = MetricConfig::euclidean(2.0, c, alpha).unwrap();
        let estimate = mb
            .report(&DetectionVector::new((0..n).map(|_| rng.gen()).collect()))
            .unwrap();
        let exact = exact_mse(&mb, &estimate, kind, &cfg).unwrap().mean;
        let mc = monte_carlo_mse(&mb, &estimate, kind, &cfg, 100_000, k as u64).unwrap();
        within += usize::from((mc.mean - exact).abs() <= 4.0 * mc.std_err);
    }
    outcome(
        within >= 19 && start.elapsed() <= Duration::from_secs(120),
        format!("{within} of 20 configurations within 4 standard errors"),
    )
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_gospa")).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

fn deterministic_cli() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["sweep-regions", "--grid-step", "0.01"],
        &[
            "sweep-regions",
            "--estimator",
            "ospa,jom",
            "--grid-step",
            "0.02",
            "--gnuplot",
        ],
        &["validate", "--seed", "7", "--instances", "60", "--samples", "2000"],
    ];
    let mut identical = 0;
    for args in runs {
        let first = run_cli(args);
        let second = run_cli(args);
        identical += usize::from(first.0 == Some(0) && first == second && !first.1.is_empty());
    }
    outcome(
        identical == runs.len(),
        format!("{identical} of {} commands byte-identical across two runs", runs.len()),
    )
}
