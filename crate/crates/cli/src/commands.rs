//! Subcommand implementations. Each returns its rows in config order; parallel work is
//! collected in order so the output does not depend on the worker count.

use crate::config::{ConfigError, ExperimentConfig, PathwayChoice};
use crate::rows::{ResultRow, SuiteRow, SUITE_SCHEMA};
use anyhow::{Context, Result};
use randmeas_core::circuits::{accumulated_error, ghz_circuit, simulate, CircuitRegistry, CircuitSpec, NoiseModel};
use randmeas_core::concurrence::{
    analytic_refs, concurrence_pure_direct, mixed_bound_direct, AnalyticRef, ConcurrenceEstimate,
};
use randmeas_core::haar::haar_state;
use randmeas_core::pipeline::{concurrence_from_dataset, mixed_bound_from_dataset};
use randmeas_core::protocol::{read_dataset, run_protocol, write_dataset, RandomizedDataset};
use randmeas_core::qcore::{BasisString, PureState, State};
use randmeas_core::rng::{derive_seed, seeded};
use randmeas_core::stats::{
    plan_budget_for, variance_cross, variance_p2, variance_p2_avg, FamilyRegistry, HaarFamily, MomentFamily, Provenance,
};
use randmeas_core::validate::{empirical_variances, run_all, EstimatorSet, ValidateConfig, VarianceSuiteConfig};
use rayon::prelude::*;
use std::path::Path;
use std::time::Instant;

/// Settings after merging flags, environment and config.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub timing: bool,
}

/// Stream indices reserved for deriving per-purpose seeds from the master seed.
const STATE_STREAM: u64 = u64::MAX;

const ESTIMATE_MAX_EXACT_PURE: usize = 14;
const ESTIMATE_MAX_EXACT_MIXED: usize = 10;

fn cfg_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

impl RunContext {
    fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed.ok_or_else(|| {
            cfg_err(format!(
                "{what} is stochastic and needs a seed (--seed, RANDMEAS_SEED or `seed`)"
            ))
        })
    }

    fn sizes(&self, default: &[usize]) -> Vec<usize> {
        self.config
            .state
            .n
            .as_ref()
            .map(|s| s.to_vec())
            .unwrap_or_else(|| default.to_vec())
    }

    fn family(&self, default: &str) -> String {
        self.config.state.family.clone().unwrap_or_else(|| default.into())
    }

    fn gamma(&self) -> f64 {
        self.config.budget.gamma.unwrap_or(0.9)
    }

    fn noise(&self) -> Result<Option<NoiseModel>> {
        match self.config.noise {
            None => Ok(None),
            Some(n) => {
                let model = NoiseModel::new(n.eps1, n.eps2).map_err(|e| cfg_err(e.to_string()))?;
                Ok((!model.is_noiseless()).then_some(model))
            }
        }
    }

    fn repetitions(&self, default: usize) -> usize {
        self.config.repetitions.unwrap_or(default)
    }

    fn time<T>(&self, f: impl FnOnce() -> T) -> (T, Option<f64>) {
        let start = Instant::now();
        let out = f();
        (out, self.timing.then(|| start.elapsed().as_secs_f64() * 1e3))
    }
}

fn moment_family(name: &str, seed: Option<u64>, haar_states: Option<usize>) -> Result<Box<dyn MomentFamily>> {
    if name == "haar" {
        let seed = seed.ok_or_else(|| cfg_err("the haar family averages sampled states and needs a seed"))?;
        return Ok(Box::new(HaarFamily {
            states: haar_states.unwrap_or(100),
            seed,
        }));
    }
    let registry = FamilyRegistry::default();
    registry.get(name).map_err(|e| cfg_err(e.to_string()))?;
    Ok(match name {
        "ghz" => Box::new(randmeas_core::stats::GhzFamily),
        _ => Box::new(randmeas_core::stats::ProductFamily),
    })
}

fn provenance_tag(p: &Provenance) -> &'static str {
    match p {
        Provenance::Analytic => "analytic",
        Provenance::SampledExact { .. } => "sampled-exact",
        Provenance::MonteCarlo { .. } => "monte-carlo",
    }
}

pub fn plan(ctx: &RunContext) -> Result<Vec<ResultRow>> {
    let family_name = ctx.family("ghz");
    let family = moment_family(&family_name, ctx.seed, ctx.config.plan.haar_states)?;
    let targets = ctx
        .config
        .plan
        .targets
        .clone()
        .or_else(|| ctx.config.budget.target.map(|t| vec![t]))
        .unwrap_or_else(|| vec![0.1]);
    if targets.iter().any(|t| t.is_nan() || *t <= 0.0) {
        return Err(cfg_err("planner targets must be positive"));
    }
    let gamma = ctx.gamma();
    let sizes = ctx.sizes(&(2..=12).collect::<Vec<_>>());
    let jobs: Vec<(f64, usize)> = targets
        .iter()
        .flat_map(|&t| sizes.iter().map(move |&n| (t, n)))
        .collect();
    let oracle = if family_name == "haar" {
        "sampled-exact"
    } else {
        "analytic"
    };
    Ok(jobs
        .par_iter()
        .map(|&(target, n)| {
            let (report, wall) = ctx.time(|| plan_budget_for(family.as_ref(), n, target, gamma));
            let mut row = ResultRow::new("plan", n, &family_name, "budget");
            row.gamma = Some(gamma);
            row.target = Some(target);
            row.oracle = Some(oracle.into());
            row.wall_ms = wall;
            if family_name == "haar" {
                row.seed = ctx.seed;
            }
            match report {
                Ok(r) => {
                    row.m = Some(r.m);
                    row.k = Some(r.k);
                    row.estimate = Some(r.predicted_delta_c);
                    row.exact = Some(r.c_ref);
                    row.cost = Some(r.cost);
                    row.ratio = Some(r.m as f64 / r.k as f64);
                }
                Err(e) => row.note = Some(e.to_string()),
            }
            row
        })
        .collect())
}

/// A state to measure plus its provenance label.
struct Subject {
    state: State,
    circuit: Option<CircuitSpec>,
}

fn build_subject(
    ctx: &RunContext,
    family: &str,
    n: usize,
    seed: Option<u64>,
    noise: Option<&NoiseModel>,
) -> Result<Subject> {
    let need_seed = || seed.ok_or_else(|| cfg_err(format!("family {family} is sampled and needs a seed")));
    let depth = ctx.config.state.depth.unwrap_or(500);
    let circuit = match family {
        "ghz" if noise.is_none() => {
            return Ok(Subject {
                state: State::Pure(PureState::ghz(n)),
                circuit: None,
            })
        }
        "ghz" => ghz_circuit(n)?,
        "product" => {
            let state = PureState::random_product(n, 2, &mut seeded(need_seed()?));
            return Ok(Subject {
                state: State::Pure(state),
                circuit: None,
            });
        }
        "haar" => {
            return Ok(Subject {
                state: State::Pure(haar_state(n, &mut seeded(need_seed()?))),
                circuit: None,
            })
        }
        other => {
            let registry = CircuitRegistry::default();
            registry.get(other).map_err(|e| cfg_err(e.to_string()))?;
            registry.sample_seeded(other, n, depth, need_seed()?)?
        }
    };
    Ok(Subject {
        state: simulate(&circuit, noise)?,
        circuit: Some(circuit),
    })
}

fn load_circuit(path: &Path) -> Result<CircuitSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
    CircuitSpec::from_json(&text).map_err(|e| cfg_err(format!("{}: {e}", path.display())))
}

fn use_mixed_pathway(choice: PathwayChoice, state: Option<&State>) -> bool {
    match choice {
        PathwayChoice::Auto => state.is_some_and(|s| !s.is_pure()),
        PathwayChoice::Pure => false,
        PathwayChoice::MixedBound => true,
    }
}

fn exact_reference(state: &State, mixed: bool) -> Option<(f64, &'static str)> {
    if mixed {
        (state.n_sites() <= ESTIMATE_MAX_EXACT_MIXED)
            .then(|| mixed_bound_direct(state).ok())
            .flatten()
            .map(|c| (c.value, "mixed-bound-direct"))
    } else if state.is_pure() && state.n_sites() <= ESTIMATE_MAX_EXACT_PURE {
        concurrence_pure_direct(state).ok().map(|c| (c.value, "direct"))
    } else {
        None
    }
}

fn fill_estimate(row: &mut ResultRow, est: &ConcurrenceEstimate) {
    row.estimate = Some(est.value);
    row.error_bar = Some(est.error_bar);
    row.clamped = Some(est.clamped);
    row.pathway = Some(
        serde_json::to_value(est.pathway)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
    );
}

fn assemble(data: &RandomizedDataset, mixed: bool, gamma: f64) -> Result<ConcurrenceEstimate> {
    Ok(if mixed {
        mixed_bound_from_dataset(data, gamma)?
    } else {
        concurrence_from_dataset(data, gamma)?
    })
}

/// `(M, K)` from the config, or from the planner when only a target is given.
fn resolve_budget(ctx: &RunContext, family: &str, n: usize) -> Result<Option<(u64, u64)>> {
    let b = &ctx.config.budget;
    match (b.m, b.k, b.target) {
        (Some(m), Some(k), _) => {
            if m == 0 || k < 2 {
                return Err(cfg_err("budget needs m >= 1 and k >= 2"));
            }
            Ok(Some((m, k)))
        }
        (None, None, Some(target)) => {
            let planner = if family == "ghz" { "ghz" } else { "haar" };
            let fam: Box<dyn MomentFamily> = if planner == "ghz" {
                Box::new(randmeas_core::stats::GhzFamily)
            } else {
                Box::new(HaarFamily::default())
            };
            let r =
                plan_budget_for(fam.as_ref(), n, target, ctx.gamma()).with_context(|| format!("planning N = {n}"))?;
            Ok(Some((r.m, r.k)))
        }
        (None, None, None) => Ok(None),
        _ => Err(cfg_err("budget needs both m and k, or a planner target")),
    }
}

pub fn estimate(ctx: &RunContext) -> Result<Vec<ResultRow>> {
    let gamma = ctx.gamma();
    let choice = ctx.config.estimate.pathway.unwrap_or_default();
    if let Some(path) = &ctx.config.state.dataset {
        let file = std::fs::File::open(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let data =
            read_dataset(std::io::BufReader::new(file)).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let mixed = use_mixed_pathway(choice, None);
        let (est, wall) = ctx.time(|| assemble(&data, mixed, gamma));
        let mut row = ResultRow::new(
            "estimate",
            data.n_sites(),
            "dataset",
            if mixed { "mixed-bound" } else { "concurrence" },
        );
        row.m = Some(data.settings_count() as u64);
        row.k = Some(data.shots());
        row.seed = data.seed();
        row.gamma = Some(gamma);
        row.wall_ms = wall;
        row.note = Some(path.display().to_string());
        fill_estimate(&mut row, &est?);
        return Ok(vec![row]);
    }

    let seed = ctx.require_seed("estimate")?;
    let noise = ctx.noise()?;
    let reps = ctx.repetitions(1);
    let (family, subjects): (String, Vec<(usize, Subject)>) = if let Some(path) = &ctx.config.state.circuit {
        let circuit = load_circuit(path)?;
        let n = circuit.n;
        let state = simulate(&circuit, noise.as_ref())?;
        (
            circuit.family.clone(),
            vec![(
                n,
                Subject {
                    state,
                    circuit: Some(circuit),
                },
            )],
        )
    } else {
        let family = ctx.family("ghz");
        let subjects = ctx
            .sizes(&[3])
            .into_iter()
            .map(|n| {
                Ok((
                    n,
                    build_subject(
                        ctx,
                        &family,
                        n,
                        Some(derive_seed(seed, STATE_STREAM - n as u64)),
                        noise.as_ref(),
                    )?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        (family, subjects)
    };

    let mut rows = Vec::new();
    for (idx, (n, subject)) in subjects.iter().enumerate() {
        let (m, k) =
            resolve_budget(ctx, &family, *n)?.ok_or_else(|| cfg_err("estimate needs a budget (m and k, or target)"))?;
        let mixed = use_mixed_pathway(choice, Some(&subject.state));
        let exact = exact_reference(&subject.state, mixed);
        let master = derive_seed(seed, *n as u64);
        let results = (0..reps)
            .into_par_iter()
            .map(|r| {
                let (outcome, wall) = ctx.time(|| -> Result<_> {
                    let data = run_protocol(&subject.state, m as usize, k, derive_seed(master, r as u64))?;
                    Ok((assemble(&data, mixed, gamma)?, data))
                });
                let (est, data) = outcome?;
                let mut row = ResultRow::new(
                    "estimate",
                    *n,
                    &family,
                    if mixed { "mixed-bound" } else { "concurrence" },
                );
                row.m = Some(m);
                row.k = Some(k);
                row.seed = Some(seed);
                row.rep = Some(r);
                row.gamma = Some(gamma);
                row.wall_ms = wall;
                if let Some((value, oracle)) = exact {
                    row.exact = Some(value);
                    row.oracle = Some(oracle.into());
                }
                if let (Some(c), Some(nm)) = (&subject.circuit, &noise) {
                    let (n1, n2) = c.gate_counts();
                    row.note = Some(format!(
                        "accumulated_error={:.6e}",
                        accumulated_error(n1 as u64, n2 as u64, nm.eps1, nm.eps2)
                    ));
                }
                fill_estimate(&mut row, &est);
                Ok((row, (idx == 0 && r == 0).then_some(data)))
            })
            .collect::<Result<Vec<_>>>()?;
        for (row, data) in results {
            if let (Some(data), Some(path)) = (data, &ctx.config.estimate.dataset_out) {
                let file = std::fs::File::create(path).with_context(|| path.display().to_string())?;
                write_dataset(&data, std::io::BufWriter::new(file))?;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn exact(ctx: &RunContext) -> Result<Vec<ResultRow>> {
    let family_name = ctx.family("ghz");
    let sizes = ctx.sizes(&[2, 3, 4]);
    let registry = FamilyRegistry::default();
    if registry.get(&family_name).is_err() {
        return exact_states(ctx, &family_name, &sizes);
    }
    let family = moment_family(&family_name, ctx.seed, ctx.config.plan.haar_states)?;
    let per_n = sizes
        .par_iter()
        .map(|&n| {
            let mut rows = Vec::new();
            let (bundle, wall) = ctx.time(|| family.bundle(n));
            match bundle {
                Ok(b) => {
                    let tag = provenance_tag(&b.provenance);
                    for t in 1..=4 {
                        let mut row = ResultRow::new("exact", n, &family_name, &format!("E[P^{t}]"));
                        row.exact = b.power_moment(t).ok();
                        row.oracle = Some(tag.into());
                        row.wall_ms = wall;
                        if let Provenance::SampledExact { seed, .. } = b.provenance {
                            row.seed = Some(seed);
                        }
                        rows.push(row);
                    }
                }
                Err(e) => {
                    let mut row = ResultRow::new("exact", n, &family_name, "E[P^t]");
                    row.note = Some(e.to_string());
                    rows.push(row);
                }
            }
            if let Some(c) = family.reference_concurrence(n) {
                let mut row = ResultRow::new("exact", n, &family_name, "concurrence-ref");
                row.exact = Some(c);
                row.oracle = Some(if family_name == "haar" { "haar-mean" } else { "analytic" }.into());
                rows.push(row);
            }
            let mut row = ResultRow::new("exact", n, &family_name, "concurrence-upper-bound");
            row.exact = Some(analytic_refs(AnalyticRef::UpperBound, n));
            row.oracle = Some("analytic".into());
            rows.push(row);
            rows
        })
        .collect::<Vec<_>>();
    Ok(per_n.into_iter().flatten().collect())
}

/// Direct quantities of simulated states (circuit families or a circuit file).
fn exact_states(ctx: &RunContext, family: &str, sizes: &[usize]) -> Result<Vec<ResultRow>> {
    let noise = ctx.noise()?;
    let subjects: Vec<(usize, String, Subject)> = if let Some(path) = &ctx.config.state.circuit {
        let circuit = load_circuit(path)?;
        let state = simulate(&circuit, noise.as_ref())?;
        vec![(
            circuit.n,
            circuit.family.clone(),
            Subject {
                state,
                circuit: Some(circuit),
            },
        )]
    } else {
        let seed = ctx.require_seed(&format!("exact for family {family}"))?;
        sizes
            .iter()
            .map(|&n| {
                Ok((
                    n,
                    family.to_string(),
                    build_subject(
                        ctx,
                        family,
                        n,
                        Some(derive_seed(seed, STATE_STREAM - n as u64)),
                        noise.as_ref(),
                    )?,
                ))
            })
            .collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    for (n, fam, subject) in subjects {
        let mut push = |quantity: &str, value: Option<f64>, oracle: &str| {
            let mut row = ResultRow::new("exact", n, &fam, quantity);
            row.exact = value;
            row.oracle = Some(oracle.into());
            row.seed = subject.circuit.as_ref().and_then(|c| c.seed);
            rows.push(row);
        };
        push("purity", Some(subject.state.purity()), "direct");
        if subject.state.is_pure() {
            push(
                "concurrence",
                Some(concurrence_pure_direct(&subject.state)?.value),
                "direct",
            );
        }
        if n <= ESTIMATE_MAX_EXACT_MIXED {
            push(
                "mixed-bound",
                Some(mixed_bound_direct(&subject.state)?.value),
                "mixed-bound-direct",
            );
        }
    }
    Ok(rows)
}

pub fn variance(ctx: &RunContext) -> Result<Vec<ResultRow>> {
    let family_name = ctx.family("ghz");
    let family = moment_family(&family_name, ctx.seed, ctx.config.plan.haar_states)?;
    let v = &ctx.config.variance;
    let ms = v.m.clone().unwrap_or_else(|| vec![10, 100]);
    let ks = v.k.clone().unwrap_or_else(|| vec![10, 100]);
    let estimators = v
        .estimators
        .clone()
        .unwrap_or_else(|| vec!["p2".into(), "cross".into()]);
    for e in &estimators {
        if !["p2", "cross", "p2-avg"].contains(&e.as_str()) {
            return Err(cfg_err(format!(
                "unknown estimator {e:?} (expected p2, cross or p2-avg)"
            )));
        }
    }
    let mc_reps = v.mc_repetitions.unwrap_or(0);
    let mc_seed = if mc_reps > 0 {
        Some(ctx.require_seed("the Monte Carlo variance comparison")?)
    } else {
        None
    };
    if mc_reps == 1 {
        return Err(cfg_err("mc_repetitions must be 0 or at least 2"));
    }
    let mut rows = Vec::new();
    for n in ctx.sizes(&[2, 3, 4]) {
        let bundle = match family.bundle(n) {
            Ok(b) => b,
            Err(e) => {
                let mut row = ResultRow::new("variance", n, &family_name, "variance");
                row.note = Some(e.to_string());
                rows.push(row);
                continue;
            }
        };
        let s = BasisString::zeros(n, 2);
        let s_prime = BasisString::new(vec![1; n], 2)?;
        for &m in &ms {
            for &k in &ks {
                let empirical = match (mc_seed, family_name.as_str()) {
                    (Some(seed), "ghz" | "product") => {
                        let state = State::Pure(if family_name == "ghz" {
                            PureState::ghz(n)
                        } else {
                            PureState::zero(n, 2)
                        });
                        let seed = derive_seed(seed, ((n as u64) << 40) ^ (m << 20) ^ k);
                        Some((empirical_variances(&state, m as usize, k, mc_reps, seed)?, seed))
                    }
                    _ => None,
                };
                for e in &estimators {
                    let report = match e.as_str() {
                        "p2" => variance_p2(&bundle, m, k),
                        "cross" => variance_cross(&bundle, &s, &s_prime, m, k),
                        _ => variance_p2_avg(&bundle, m, k),
                    };
                    let mut row = ResultRow::new("variance", n, &family_name, &format!("var-{e}"));
                    row.m = Some(m);
                    row.k = Some(k);
                    row.oracle = Some(provenance_tag(&bundle.provenance).into());
                    match report {
                        Ok(r) => {
                            row.exact = Some(r.variance);
                            if r.approximate {
                                row.note = Some("approximate".into());
                            }
                        }
                        Err(err) => row.note = Some(err.to_string()),
                    }
                    if let Some((emp, seed)) = &empirical {
                        let value = match e.as_str() {
                            "p2" => Some(emp.p2),
                            "cross" => Some(emp.cross),
                            _ => None,
                        };
                        if value.is_some() {
                            row.estimate = value;
                            row.seed = Some(*seed);
                            row.repetitions = Some(mc_reps);
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

pub fn circuit_ensemble(ctx: &RunContext) -> Result<Vec<ResultRow>> {
    let seed = ctx.require_seed("circuit-ensemble")?;
    let family = ctx.family("iqp2");
    if family != "ghz" && CircuitRegistry::default().get(&family).is_err() {
        return Err(cfg_err(format!("unknown circuit family {family:?}")));
    }
    let noise = ctx.noise()?;
    let members = ctx.repetitions(30);
    let gamma = ctx.gamma();
    let choice = ctx.config.estimate.pathway.unwrap_or_default();
    if let Some(dir) = &ctx.config.ensemble.circuits_out {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    let mut rows = Vec::new();
    for n in ctx.sizes(&[4]) {
        let budget = resolve_budget(ctx, &family, n)?;
        let master = derive_seed(seed, n as u64);
        let batch = (0..members)
            .into_par_iter()
            .map(|i| {
                let (outcome, wall) = ctx.time(|| -> Result<_> {
                    let subject =
                        build_subject(ctx, &family, n, Some(derive_seed(master, 2 * i as u64)), noise.as_ref())?;
                    let mixed = use_mixed_pathway(choice, Some(&subject.state));
                    let est = match budget {
                        Some((m, k)) => {
                            let data =
                                run_protocol(&subject.state, m as usize, k, derive_seed(master, 2 * i as u64 + 1))?;
                            Some(assemble(&data, mixed, gamma)?)
                        }
                        None => None,
                    };
                    Ok((subject, est))
                });
                let (subject, est) = outcome?;
                let mixed = use_mixed_pathway(choice, Some(&subject.state));
                let mut row = ResultRow::new(
                    "circuit-ensemble",
                    n,
                    &family,
                    if mixed { "mixed-bound" } else { "concurrence" },
                );
                row.seed = Some(seed);
                row.rep = Some(i);
                row.gamma = Some(gamma);
                row.wall_ms = wall;
                if let Some((value, oracle)) = exact_reference(&subject.state, mixed) {
                    row.exact = Some(value);
                    row.oracle = Some(oracle.into());
                }
                if let Some((m, k)) = budget {
                    row.m = Some(m);
                    row.k = Some(k);
                }
                if let Some(est) = &est {
                    fill_estimate(&mut row, est);
                }
                if let Some(c) = &subject.circuit {
                    let (n1, n2) = c.gate_counts();
                    let mut note = format!("gates={}", c.len());
                    if let Some(nm) = &noise {
                        note += &format!(
                            ";accumulated_error={:.6e}",
                            accumulated_error(n1 as u64, n2 as u64, nm.eps1, nm.eps2)
                        );
                    }
                    row.note = Some(note);
                    if let Some(dir) = &ctx.config.ensemble.circuits_out {
                        std::fs::write(dir.join(format!("{family}-n{n}-{i:04}.json")), c.to_json()?)?;
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(batch);
    }
    Ok(rows)
}

fn biased_power(y: u64, k: u64, order: usize) -> randmeas_core::Result<f64> {
    Ok((y as f64 / k as f64).powi(order as i32))
}

/// Runs the suites; the boolean is `true` when all passed.
pub fn validate(ctx: &RunContext) -> Result<(Vec<SuiteRow>, bool)> {
    let v = &ctx.config.validate;
    let defaults = ValidateConfig::default();
    let seed = ctx.seed.unwrap_or(defaults.seed);
    let variance = (!v.skip_variance.unwrap_or(false)).then(|| {
        let d = VarianceSuiteConfig::default();
        VarianceSuiteConfig {
            seed: derive_seed(seed, 1),
            repetitions: v.variance_repetitions.unwrap_or(d.repetitions),
            rel_tolerance: v.variance_tolerance.unwrap_or(d.rel_tolerance),
            ..d
        }
    });
    let cfg = ValidateConfig {
        seed,
        pathway_states: v.pathway_states.unwrap_or(defaults.pathway_states),
        variance,
    };
    let estimators = if v.negative_control.unwrap_or(false) {
        EstimatorSet {
            power: biased_power,
            ..Default::default()
        }
    } else {
        EstimatorSet::default()
    };
    let reports = run_all(&cfg, &estimators);
    let all = reports.iter().all(|r| r.passed);
    for r in reports.iter().filter(|r| !r.passed) {
        for f in &r.failures {
            log::error!("{}: {f}", r.name);
        }
    }
    let rows = reports
        .into_iter()
        .map(|r| SuiteRow {
            schema: SUITE_SCHEMA.into(),
            suite: r.name,
            passed: r.passed,
            checks: r.checks,
            tolerance: r.tolerance,
            max_deviation: r.max_deviation,
            failures: r.failures.len(),
            first_failure: r.failures.first().cloned(),
        })
        .collect();
    Ok((rows, all))
}
