//! Acceptance criteria 1 to 11. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use randmeas_core::circuits::{ghz_circuit, simulate, CircuitRegistry, NoiseModel};
use randmeas_core::concurrence::{
    analytic_ref_squared_exact, analytic_refs, concurrence_pure_direct, mixed_bound_direct, AnalyticRef,
};
use randmeas_core::haar::haar_state;
use randmeas_core::pipeline::{estimate_mixed_bound, estimate_pure_concurrence};
use randmeas_core::qcore::{PureState, State};
use randmeas_core::rng::{derive_seed, seeded};
use randmeas_core::stats::{analytic_moment_bundle, plan_budget, variance_p2};
use randmeas_core::validate::{
    bound_suite, pathway_suite, unbiasedness_suite, variance_comparisons, EstimatorSet, VarianceSuiteConfig,
};
use std::time::{Duration, Instant};

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Criterion 1: GHZ concurrence against `2^{1-N/2} sqrt(2^{N-1} - 1)`, tolerance 1e-10.
fn c1() -> Outcome {
    let mut worst = 0f64;
    for n in 2..=10 {
        let c = concurrence_pure_direct(&State::Pure(PureState::ghz(n))).unwrap().value;
        let nf = n as f64;
        worst = worst.max((c - 2f64.powf(1.0 - nf / 2.0) * (2f64.powf(nf - 1.0) - 1.0).sqrt()).abs());
    }
    let n2 = concurrence_pure_direct(&State::Pure(PureState::ghz(2))).unwrap().value;
    let n3 = concurrence_pure_direct(&State::Pure(PureState::ghz(3))).unwrap().value;
    worst = worst.max((n2 - 1.0).abs()).max((n3 - 1.5f64.sqrt()).abs());
    outcome(
        worst <= 1e-10,
        format!("N = 2..10, max deviation {worst:.2e} (tol 1e-10)"),
    )
}

/// Criterion 2: mean concurrence of 100 Haar states within 3 standard errors of
/// `sqrt(4 - 8 3^N / (2^N (1 + 2^N)))`.
fn c2() -> Outcome {
    let mut rng = seeded(0xACC2);
    let mut ok = true;
    let mut parts = Vec::new();
    let sq_n2 = analytic_ref_squared_exact(AnalyticRef::HaarMeanSq, 2);
    ok &= sq_n2.0 * 10 == 4 * sq_n2.1;
    for n in 2..=6 {
        let values: Vec<f64> = (0..100)
            .map(|_| {
                concurrence_pure_direct(&State::Pure(haar_state(n, &mut rng)))
                    .unwrap()
                    .value
            })
            .collect();
        let mean = values.iter().sum::<f64>() / 100.0;
        let se = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 99.0 / 100.0).sqrt();
        let target = analytic_refs(AnalyticRef::HaarMeanSq, n).sqrt();
        let z = (mean - target) / se;
        ok &= z.abs() <= 3.0;
        parts.push(format!("N={n}: z={z:+.2}"));
    }
    outcome(ok, format!("{} (|z| <= 3; N=2 squared target 2/5)", parts.join(", ")))
}

/// Criterion 3: upper bound dominates the GHZ value and the Haar root mean square, compared
/// as exact rationals.
fn c3() -> Outcome {
    let ge = |a: (i128, i128), b: (i128, i128)| a.0 * b.1 >= b.0 * a.1;
    let ok = (2..=20u32).all(|n| {
        let ub = analytic_ref_squared_exact(AnalyticRef::UpperBound, n);
        ge(ub, analytic_ref_squared_exact(AnalyticRef::Ghz, n))
            && ge(ub, analytic_ref_squared_exact(AnalyticRef::HaarMeanSq, n))
    });
    outcome(ok, "N = 2..20, exact rational comparison of squared values".into())
}

/// Criterion 4: exhaustive multinomial enumeration for `d^N <= 4`, `K <= 5`.
fn c4() -> Outcome {
    let r = unbiasedness_suite(&EstimatorSet::default());
    outcome(
        r.passed,
        format!(
            "{} checks, max deviation {:.2e} ({})",
            r.checks, r.max_deviation, r.tolerance
        ),
    )
}

/// Criterion 5: analytic variances against 10^4 protocol repetitions, 5% relative.
fn c5() -> Outcome {
    let cfg = VarianceSuiteConfig {
        seed: 0xACC5,
        repetitions: 10_000,
        rel_tolerance: 0.05,
        budgets: vec![(10, 10), (10, 100), (100, 10), (100, 100)],
        max_n: 4,
    };
    let rows = variance_comparisons(&cfg).unwrap();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.rel_error() > cfg.rel_tolerance)
        .map(|r| {
            format!(
                "{} N={} M={} K={} {} off by {:.1}%",
                r.family,
                r.n,
                r.m,
                r.k,
                r.estimator,
                100.0 * r.rel_error()
            )
        })
        .collect();
    let worst = rows.iter().map(|r| r.rel_error()).fold(0.0, f64::max);
    let mut detail = format!(
        "{} comparisons, worst relative error {:.2}% (tol 5%)",
        rows.len(),
        100.0 * worst
    );
    if !bad.is_empty() {
        detail += &format!("; {}", bad.join("; "));
    }
    outcome(bad.is_empty(), detail)
}

/// Criterion 6: `variance_p2` at `K = 10^8` against `(E[P^4] - E[P^2]^2) / M`, 1e-6 relative.
fn c6() -> Outcome {
    let mut worst = 0f64;
    for family in ["product", "ghz"] {
        for n in 1..=6 {
            if family == "ghz" && n < 2 {
                continue;
            }
            let b = analytic_moment_bundle(family, n).unwrap();
            let (e2, e4) = (b.power_moment(2).unwrap(), b.power_moment(4).unwrap());
            for m in [1u64, 10, 100] {
                let plateau = (e4 - e2 * e2) / m as f64;
                let v = variance_p2(&b, m, 100_000_000).unwrap().variance;
                worst = worst.max((v / plateau - 1.0).abs());
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!("product N=1..6, GHZ N=2..6, M in {{1,10,100}}: max relative gap {worst:.2e} (tol 1e-6)"),
    )
}

/// Criterion 7: concurrence pathways and Clifford/Pauli moment pathways.
fn c7() -> Outcome {
    let r = pathway_suite(0xACC7, 20);
    outcome(
        r.passed,
        format!(
            "{} checks, max deviation {:.2e} ({})",
            r.checks, r.max_deviation, r.tolerance
        ),
    )
}

/// Criterion 8: tightness, the two-copy operator, depolarized-GHZ monotonicity.
fn c8() -> Outcome {
    let r = bound_suite(0xACC8);
    outcome(
        r.passed,
        format!(
            "{} checks, max deviation {:.2e} ({})",
            r.checks, r.max_deviation, r.tolerance
        ),
    )
}

/// Criterion 9: GHZ_3 at the planner budget, 18 of 20 runs within 10% of sqrt(1.5).
fn c9() -> Outcome {
    let plan = plan_budget("ghz", 3, 0.1, 0.9).unwrap();
    let truth = 1.5f64.sqrt();
    let state = State::Pure(PureState::ghz(3));
    let hits = (0..20)
        .filter(|&r| {
            let est = estimate_pure_concurrence(&state, plan.m as usize, plan.k, 0.9, derive_seed(0xACC9, r)).unwrap();
            (est.value - truth).abs() <= 0.1 * truth
        })
        .count();
    outcome(
        hits >= 18,
        format!(
            "planner (M, K) = ({}, {}); {hits}/20 runs within 10% (need 18)",
            plan.m, plan.k
        ),
    )
}

/// Criterion 10: noisy GHZ, mg and iqp2 ensembles at N = 3..5; the mixed-bound estimate
/// covers the direct value within its error bar in at least 90% of runs.
fn c10() -> Outcome {
    let noise = NoiseModel::new(1e-4, 1e-3).unwrap();
    let registry = CircuitRegistry::default();
    let (m, k, per_cell) = (1000usize, 100u64, 10u64);
    let mut runs = 0;
    let mut covered = 0;
    let mut parts = Vec::new();
    for family in ["ghz", "mg", "iqp2"] {
        let mut cell_hits = 0;
        for n in 3..=5usize {
            for i in 0..per_cell {
                let seed = derive_seed(0xAC10, (n as u64) << 32 | i);
                let circuit = match family {
                    "ghz" => ghz_circuit(n).unwrap(),
                    _ => registry.sample_seeded(family, n, 500, derive_seed(seed, 0)).unwrap(),
                };
                let rho = simulate(&circuit, Some(&noise)).unwrap();
                let exact = mixed_bound_direct(&rho).unwrap().value;
                let est = estimate_mixed_bound(&rho, m, k, 0.9, derive_seed(seed, 1)).unwrap();
                runs += 1;
                if (est.value - exact).abs() <= est.error_bar {
                    covered += 1;
                    cell_hits += 1;
                }
            }
        }
        parts.push(format!("{family} {cell_hits}/{}", 3 * per_cell));
    }
    let frac = covered as f64 / runs as f64;
    outcome(
        frac >= 0.9,
        format!(
            "M={m}, K={k}, gamma=0.9: {covered}/{runs} covered ({}) (need 90%)",
            parts.join(", ")
        ),
    )
}

/// Criterion 11: planner cost non-decreasing in N for 10% and dominated by 5%.
fn c11() -> Outcome {
    let mut ok = true;
    let mut last = 0.0;
    let mut costs = Vec::new();
    for n in 2..=20 {
        let ten = plan_budget("ghz", n, 0.1, 0.9).unwrap();
        let five = plan_budget("ghz", n, 0.05, 0.9).unwrap();
        ok &= ten.cost >= last && five.cost >= ten.cost;
        last = ten.cost;
        costs.push(ten.cost.log10().round() as i64);
    }
    outcome(ok, format!("log10 M*K at 10% for N = 2..20: {costs:?}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "GHZ analytics", Duration::from_secs(1), c1),
        (2, "Haar mean", Duration::from_secs(60), c2),
        (3, "upper-bound ordering", Duration::from_secs(1), c3),
        (4, "estimator unbiasedness", Duration::from_secs(10), c4),
        (5, "variance formulas", Duration::from_secs(1800), c5),
        (6, "plateau law", Duration::from_secs(1), c6),
        (7, "pathway equality", Duration::from_secs(300), c7),
        (8, "mixed-bound tightness and oracle", Duration::from_secs(300), c8),
        (9, "end-to-end Cantelli guarantee", Duration::from_secs(1800), c9),
        (10, "noisy-circuit reproduction", Duration::from_secs(1800), c10),
        (11, "planner scaling", Duration::from_secs(60), c11),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = out.passed && in_time;
        failed += usize::from(!passed);
        let verdict = if passed { "PASS" } else { "FAIL" };
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        println!(
            "criterion {id:>2} {verdict} {name}: {} [{timing}{}]",
            out.detail,
            if in_time { "" } else { ", over time" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
