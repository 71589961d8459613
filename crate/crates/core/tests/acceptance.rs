//! Acceptance suite. Every criterion prints one `[PASS]` or `[FAIL]` line;
//! the process fails if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rayon::prelude::*;

use dynde::engine::{
    crowding_target, de_generation, detect_change, optimize_static, react, run_dynamic, ClockConfig, DeParams,
    DiversityMechanism, GenerationSettings, HyperState, MethodDefaults, MethodSpec, RunConfig,
};
use dynde::metrics::{self, MetricOptions};
use dynde::predictor::{build_samples, predict_neighbors, train, Network, PredictorConfig, TimeBestStore, TrainingPair};
use dynde::problems::{best_known_table, eval_base, DynamicProblem, ExperimentKind, ExperimentSpec, Landscape};
use dynde::rng::RngStream;
use dynde::types::{clamp_to_bounds, compare_feasibility, Bounds, Evaluation, Individual, Population, Position};
use dynde::engine::TraceRow;

type Outcome = Result<String, String>;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// ---------------------------------------------------------------- 1

/// Straight transcription of the four measures over `(t, f_best, f_star)`
/// triples, with generation numbers recovered by counting.
struct Oracle {
    mof: f64,
    bebc: f64,
    arr: f64,
    sr: f64,
}

fn oracle(rows: &[(usize, f64, f64)], eps: f64, eps_abs: f64) -> Oracle {
    let t_max = rows.iter().map(|r| r.0).max().unwrap() + 1;
    let mut f_best: Vec<Vec<f64>> = vec![Vec::new(); t_max];
    let mut f_star = vec![f64::NAN; t_max];
    for &(t, fb, fs) in rows {
        f_best[t].push(fb);
        f_star[t] = fs;
    }
    let times: Vec<usize> = (0..t_max).filter(|&t| !f_best[t].is_empty()).collect();
    let g_total: usize = times.iter().map(|&t| f_best[t].len()).sum();

    let mut mof = 0.0;
    for &t in &times {
        for g in 1..=f_best[t].len() {
            mof += (f_star[t] - f_best[t][g - 1]).abs();
        }
    }
    mof /= g_total as f64;

    let mut bebc = 0.0;
    let mut arr = 0.0;
    let mut hits = 0usize;
    for &t in &times {
        let g_max = f_best[t].len();
        let last = f_best[t][g_max - 1];
        bebc += (f_star[t] - last).abs();
        let first = f_best[t][0];
        if first == f_star[t] {
            arr += 1.0;
        } else {
            let mut num = 0.0;
            for g in 1..=g_max {
                num += (f_best[t][g - 1] - first).abs();
            }
            arr += num / (g_max as f64 * (f_star[t] - first).abs());
        }
        let threshold = if eps * f_star[t].abs() > eps_abs { eps * f_star[t].abs() } else { eps_abs };
        if (f_star[t] - last).abs() <= threshold {
            hits += 1;
        }
    }
    let n = times.len() as f64;
    Oracle {
        mof,
        bebc: bebc / n,
        arr: arr / n,
        sr: hits as f64 / n,
    }
}

fn random_monotone_trace(rng: &mut RngStream) -> Vec<(usize, f64, f64)> {
    let periods = 1 + (rng.uniform(0.0, 20.0) as usize);
    let mut rows = Vec::new();
    for t in 0..periods {
        let f_star = rng.uniform(-10.0, 10.0);
        let gens = 1 + (rng.uniform(0.0, 30.0) as usize);
        let mut level = if rng.uniform(0.0, 1.0) < 0.1 { f_star } else { f_star + rng.uniform(0.0, 50.0) };
        for _ in 0..gens {
            rows.push((t, level, f_star));
            if rng.uniform(0.0, 1.0) < 0.6 {
                level = (level - rng.uniform(0.0, 5.0)).max(f_star);
            }
        }
    }
    rows
}

fn criterion_1() -> Outcome {
    let options = MetricOptions::default();
    let mut rng = RngStream::new(2024, 99);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let raw = random_monotone_trace(&mut rng);
        let rows: Vec<TraceRow> = raw
            .iter()
            .scan((usize::MAX, 0), |state, &(t, fb, fs)| {
                state.1 = if state.0 == t { state.1 + 1 } else { 1 };
                state.0 = t;
                Some(TraceRow {
                    t,
                    generation: state.1,
                    elapsed_s: 0.0,
                    evals_cum: 0,
                    best_f: fb,
                    best_violation: 0.0,
                    f_star: Some(fs),
                    error: Some((fs - fb).abs()),
                })
            })
            .collect();
        let got = metrics::evaluate(&rows, &options).map_err(|e| e.to_string())?;
        let want = oracle(&raw, options.epsilon, options.epsilon_abs);
        for (name, a, b) in [
            ("MOF", got.mof, want.mof),
            ("BEBC", got.bebc, want.bebc),
            ("ARR", got.arr, want.arr),
            ("SR", got.sr, want.sr),
        ] {
            let diff = (a - b).abs();
            worst = worst.max(diff);
            if diff > 1e-12 {
                return Err(format!("trace {k}: {name} {a} vs oracle {b}"));
            }
        }
    }
    Ok(format!("100 traces, max |difference| {worst:.1e}"))
}

// ---------------------------------------------------------------- 2

/// ReLU on/off state of every hidden unit for every pair, recomputed from
/// the flat parameter list (W1 row-major, then b1).
fn activation_pattern(net: &Network, pairs: &[TrainingPair]) -> Vec<bool> {
    let params: Vec<f64> = net.params().copied().collect();
    let d = net.dim();
    let (w1, b1) = params.split_at(4 * d);
    let mut on = Vec::new();
    for p in pairs {
        for x in &p.inputs {
            for u in 0..4 {
                let z = b1[u] + (0..d).map(|j| w1[u * d + j] * x[j]).sum::<f64>();
                on.push(z > 0.0);
            }
        }
    }
    on
}

fn criterion_2() -> Outcome {
    let eps = 1e-5;
    let floor = 1e-6;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut at_kink = 0;
    for k in 0..50u64 {
        let mut rng = RngStream::new(k, 7);
        let d = 1 + (k as usize % 5);
        let mut net = Network::new(d, 5, &mut rng);
        // random biases so that some units sit in each ReLU regime
        for b in net.b1_mut() {
            *b = rng.uniform(-0.5, 0.5);
        }
        for b in net.b2_mut() {
            *b = rng.uniform(-0.5, 0.5);
        }
        let pairs: Vec<TrainingPair> = (0..4)
            .map(|_| TrainingPair {
                inputs: (0..5).map(|_| rng.random_position(d, Bounds::new(-1.0, 1.0).unwrap())).collect(),
                target: rng.random_position(d, Bounds::new(-1.0, 1.0).unwrap()),
            })
            .collect();
        let analytic: Vec<f64> = net.gradient(&pairs).params().copied().collect();
        let base = activation_pattern(&net, &pairs);
        for (i, &a) in analytic.iter().enumerate() {
            let mut plus = net.clone();
            *plus.params_mut().nth(i).unwrap() += eps;
            let mut minus = net.clone();
            *minus.params_mut().nth(i).unwrap() -= eps;
            // the loss is not differentiable where a perturbation switches a unit
            if activation_pattern(&plus, &pairs) != base || activation_pattern(&minus, &pairs) != base {
                at_kink += 1;
                continue;
            }
            let numeric = (plus.loss(&pairs) - minus.loss(&pairs)) / (2.0 * eps);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
            worst = worst.max(rel);
            checked += 1;
        }
    }
    let detail = format!(
        "50 nets, d = 1..5, {checked} parameters, max relative error {worst:.2e} (denominator floor {floor:.0e}; \
         {at_kink} perturbations crossing a ReLU kink skipped)"
    );
    if worst < 1e-4 && at_kink * 100 < checked {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 3

fn run_config(method: &str, tau: f64, seed: u64) -> RunConfig {
    RunConfig {
        method: MethodSpec::from_name(method, &MethodDefaults::default(), tau).unwrap(),
        de: DeParams::default(),
        predictor: PredictorConfig::default(),
        clock: ClockConfig::default(),
        tau,
        seed,
    }
}

fn sphere(kind: ExperimentKind, d: usize, changes: usize, env_seed: u64) -> DynamicProblem {
    DynamicProblem::new(Landscape::Sphere, ExperimentSpec::new(kind), d, Bounds::default(), changes, env_seed).unwrap()
}

fn criterion_3() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (tau, target) in [(1.0, 2000.0), (20.0, 45000.0)] {
        let p = sphere(ExperimentKind::Exp3, 30, 10, 1);
        let trace = run_dynamic(&run_config("noNN_RI", tau, 1), &p, None).map_err(|e| e.to_string())?;
        let per = &trace.period_evaluations;
        let lo = *per.iter().min().unwrap() as f64;
        let hi = *per.iter().max().unwrap() as f64;
        let in_band = |x: f64| (x - target).abs() <= 0.1 * target;
        ok &= in_band(lo) && in_band(hi);
        parts.push(format!("tau={tau}: {lo}..{hi} evaluations per period (target {target} +/- 10%)"));
    }
    if ok {
        Ok(parts.join("; "))
    } else {
        Err(parts.join("; "))
    }
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let taus = [1.0, 5.0, 10.0, 20.0];
    let p = sphere(ExperimentKind::Exp3, 10, 30, 4);
    let fractions: Vec<f64> = taus
        .par_iter()
        .map(|&tau| run_dynamic(&run_config("NN_RI", tau, 4), &p, None).map(|t| t.nn_time_fraction()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let shown: Vec<String> = taus
        .iter()
        .zip(&fractions)
        .map(|(t, f)| format!("tau={t}: {:.2}%", 100.0 * f))
        .collect();
    let detail = shown.join(", ");
    let decreasing = fractions.windows(2).all(|w| w[1] < w[0]);
    if decreasing && (0.08..=0.13).contains(&fractions[0]) && fractions[3] <= 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 5, 6, 7

/// Median MOF over `seeds` runs per method. Method and seed share one
/// environment per seed.
fn median_mof(kind: ExperimentKind, tau: f64, methods: &[&str], seeds: u64) -> Result<BTreeMap<String, f64>, String> {
    let problems: Vec<(DynamicProblem, _)> = (0..seeds)
        .map(|s| {
            let p = sphere(kind, 10, 30, 1000 + s);
            let table = best_known_table(&p, &DeParams::default(), &Default::default(), 0).unwrap();
            (p, table)
        })
        .collect();
    let jobs: Vec<(&str, u64)> = methods.iter().flat_map(|m| (0..seeds).map(move |s| (*m, s))).collect();
    let mofs: Vec<(String, f64)> = jobs
        .par_iter()
        .map(|&(m, s)| {
            let (p, table) = &problems[s as usize];
            let trace = run_dynamic(&run_config(m, tau, 77 + s), p, Some(table)).map_err(|e| e.to_string())?;
            let mof = metrics::mof(&trace.rows).map_err(|e| e.to_string())?;
            Ok((m.to_string(), mof))
        })
        .collect::<Result<_, String>>()?;
    Ok(methods
        .iter()
        .map(|m| {
            let v: Vec<f64> = mofs.iter().filter(|(n, _)| n == m).map(|(_, x)| *x).collect();
            (m.to_string(), median(v))
        })
        .collect())
}

fn criterion_5() -> Outcome {
    let med = median_mof(ExperimentKind::Exp2, 20.0, &["NN_No", "noNN_No", "NN_RI", "noNN_RI"], 10)?;
    let detail = format!(
        "median MOF NN_No {:.4} vs noNN_No {:.4}; NN_RI {:.4} vs noNN_RI {:.4}",
        med["NN_No"], med["noNN_No"], med["NN_RI"], med["noNN_RI"]
    );
    if med["NN_No"] < med["noNN_No"] && med["NN_RI"] < med["noNN_RI"] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let med = median_mof(ExperimentKind::Exp2, 20.0, &["noNN_CwN", "noNN_RI"], 10)?;
    let detail = format!("median MOF noNN_CwN {:.4} vs noNN_RI {:.4}", med["noNN_CwN"], med["noNN_RI"]);
    if med["noNN_CwN"] > med["noNN_RI"] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let med = median_mof(ExperimentKind::Exp1, 1.0, &["NN_RI", "noNN_RI"], 10)?;
    let detail = format!("median MOF NN_RI {:.4} vs noNN_RI {:.4}", med["NN_RI"], med["noNN_RI"]);
    if med["NN_RI"] >= med["noNN_RI"] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let bests: Vec<f64> = (0..10u64)
        .into_par_iter()
        .map(|s| {
            let mut f = |x: &[f64]| Evaluation {
                objective: eval_base(Landscape::Sphere, x),
                violation: 0.0,
                time_index: 0,
            };
            let mut rng = RngStream::new(s, 1);
            optimize_static(30, Bounds::default(), &DeParams::default(), 2000, &mut f, &mut rng)
                .map(|r| r.best.eval.objective)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let m = median(bests);
    if m < 1e-2 {
        Ok(format!("median best objective {m:.3e} after 2000 generations"))
    } else {
        Err(format!("median best objective {m:.3e}"))
    }
}

// ---------------------------------------------------------------- 9

/// Stores the best positions of 20 periods of a linear optimum trajectory,
/// trains a fresh network on every window of that history with the default
/// learning rate and batch size for 200 epochs, and predicts period 20.
/// Returns the prediction error and the error of persistence.
fn learnability_trial(seed: u64) -> (f64, f64) {
    let d = 5;
    let bounds = Bounds::default();
    let mut rng = RngStream::new(seed, 21);
    let start: Vec<f64> = (0..d).map(|_| rng.uniform(-4.0, -2.0)).collect();
    let velocity: Vec<f64> = (0..d).map(|_| rng.uniform(0.1, 0.3)).collect();
    let optimum = |t: usize| -> Position { start.iter().zip(&velocity).map(|(s, v)| s + v * t as f64).collect::<Vec<_>>().into() };
    let config = PredictorConfig {
        epochs: 200,
        ..PredictorConfig::default()
    };
    let mut store = TimeBestStore::new(config.k);
    for t in 0..20 {
        // three near-optimal finds per period, best first
        let found: Vec<Individual> = (0..3)
            .map(|r| {
                let x: Position = if r == 0 {
                    optimum(t)
                } else {
                    optimum(t).iter().map(|v| v + rng.uniform(-0.02, 0.02)).collect::<Vec<_>>().into()
                };
                let f = x.distance_sq(&optimum(t));
                Individual::new(x, Evaluation { objective: f, violation: 0.0, time_index: t })
            })
            .collect();
        store.record_time_best(t, &found);
    }
    let mut nn_rng = RngStream::new(seed, 4);
    let pairs = build_samples(&store, config.n_t, config.max_new_per_time, &mut nn_rng);
    let mut net = Network::new(d, config.n_t, &mut nn_rng);
    train(&mut net, &pairs, &config, bounds, &mut nn_rng).unwrap();
    let guess = &predict_neighbors(&net, &store, 1, 0.0, bounds, &mut nn_rng).unwrap()[0];
    (guess.distance(&optimum(20)), optimum(19).distance(&optimum(20)))
}

fn criterion_9() -> Outcome {
    let trials: Vec<(f64, f64)> = (0..10u64).into_par_iter().map(learnability_trial).collect();
    let wins = trials.iter().filter(|(nn, p)| nn < p).count();
    let shown: Vec<String> = trials.iter().map(|(nn, p)| format!("{nn:.3}/{p:.3}")).collect();
    let detail = format!("{wins}/10 seeds beat persistence (nn/persistence: {})", shown.join(" "));
    if wins >= 8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 10

fn prop(cases: u32, name: &str, test: impl Fn(&mut TestRunner) -> Result<(), String>) -> Result<String, String> {
    let mut runner = TestRunner::new(PropConfig {
        cases,
        failure_persistence: None,
        ..PropConfig::default()
    });
    test(&mut runner).map(|_| format!("{name} ({cases} cases)")).map_err(|e| format!("{name}: {e}"))
}

fn eval_strategy() -> impl Strategy<Value = Evaluation> {
    (prop_oneof![Just(0.0), 0.0f64..5.0], -10.0f64..10.0).prop_map(|(violation, objective)| Evaluation {
        objective,
        violation,
        time_index: 0,
    })
}

fn population_from(points: &[Vec<f64>], evals: &[Evaluation]) -> Population {
    Population::new(
        points
            .iter()
            .zip(evals)
            .map(|(x, e)| Individual::new(x.clone().into(), *e))
            .collect(),
    )
}

fn diversity_strategy() -> impl Strategy<Value = DiversityMechanism> {
    prop_oneof![
        Just(DiversityMechanism::None),
        (1usize..6).prop_map(|n| DiversityMechanism::Crowding { n }),
        (0usize..8).prop_map(|rate| DiversityMechanism::RandomImmigrants { rate }),
        Just(DiversityMechanism::Restart),
        (0usize..8, 0usize..4).prop_map(|(rate, g)| DiversityMechanism::HyperMutation {
            rate,
            f_range: (0.6, 0.8),
            cr: 0.7,
            duration_generations: g,
        }),
    ]
}

fn criterion_10() -> Outcome {
    let bounds = Bounds::default();
    let mut passed = Vec::new();

    passed.push(prop(64, "population size conservation", |runner| {
        runner
            .run(
                &(8usize..24, 1usize..5, diversity_strategy(), 0usize..6, any::<u64>()),
                |(np, d, diversity, n_pred, seed)| {
                    let mut rng = RngStream::new(seed, 1);
                    let shift = std::cell::Cell::new(0.0);
                    let mut ev = |x: &[f64]| Evaluation {
                        objective: x.iter().map(|v| (v - shift.get()) * (v - shift.get())).sum(),
                        violation: 0.0,
                        time_index: 0,
                    };
                    let members = (0..np)
                        .map(|_| {
                            let x = rng.random_position(d, bounds);
                            let e = ev(&x);
                            Individual::new(x, e)
                        })
                        .collect();
                    let mut pop = Population::new(members);
                    let mut hyper = HyperState::default();
                    let predicted: Vec<Position> = (0..n_pred).map(|_| Position::filled(d, 9.0)).collect();
                    let crowding = match diversity {
                        DiversityMechanism::Crowding { n } => Some(n),
                        _ => None,
                    };
                    for gen in 0..4 {
                        shift.set(gen as f64 * 0.5);
                        react(&mut pop, &diversity, Some(&predicted), &mut hyper, bounds, &mut ev, &mut rng);
                        prop_assert_eq!(pop.len(), np);
                        prop_assert!(pop.members.iter().all(|m| bounds.contains(&m.position)));
                        let settings = GenerationSettings { f_range: (0.2, 0.8), cr: 0.3, crowding };
                        de_generation(&mut pop, &settings, bounds, &mut ev, &mut rng).unwrap();
                        hyper.tick();
                        prop_assert_eq!(pop.len(), np);
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string())
    })?);

    passed.push(prop(512, "feasibility rules form a total preorder", |runner| {
        runner
            .run(&(eval_strategy(), eval_strategy(), eval_strategy()), |(a, b, c)| {
                use std::cmp::Ordering::*;
                prop_assert_eq!(compare_feasibility(&a, &b), compare_feasibility(&b, &a).reverse());
                prop_assert_eq!(compare_feasibility(&a, &a), Equal);
                if compare_feasibility(&a, &b) != Greater && compare_feasibility(&b, &c) != Greater {
                    prop_assert!(compare_feasibility(&a, &c) != Greater);
                }
                if a.is_feasible() && !b.is_feasible() {
                    prop_assert_eq!(compare_feasibility(&a, &b), Less);
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?);

    passed.push(prop(256, "crowding replaces the nearest beaten member among the N closest", |runner| {
        runner
            .run(
                &(
                    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 4..10),
                    prop::collection::vec(eval_strategy(), 10),
                    prop::collection::vec(-5.0f64..5.0, 2),
                    eval_strategy(),
                    1usize..6,
                ),
                |(points, evals, trial, trial_eval, n)| {
                    let pop = population_from(&points, &evals);
                    let target = crowding_target(&pop.members, &trial, &trial_eval, n);
                    // brute force: distances, the N closest, the nearest that is beaten
                    let mut dist: Vec<(f64, usize)> = points
                        .iter()
                        .enumerate()
                        .map(|(j, p)| ((p[0] - trial[0]).powi(2) + (p[1] - trial[1]).powi(2), j))
                        .collect();
                    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    let closest: Vec<usize> = dist.iter().take(n).map(|x| x.1).collect();
                    let expected = closest
                        .iter()
                        .copied()
                        .find(|&j| compare_feasibility(&trial_eval, &pop.members[j].eval) == std::cmp::Ordering::Less);
                    prop_assert_eq!(target, expected);
                    if let Some(j) = target {
                        prop_assert!(closest.contains(&j));
                    }
                    Ok(())
                },
            )
            .map_err(|e| e.to_string())
    })?);

    passed.push(prop(512, "clamp idempotence", |runner| {
        runner
            .run(&prop::collection::vec(-100.0f64..100.0, 1..12), |x| {
                let once = clamp_to_bounds(&x.clone().into(), bounds);
                let twice = clamp_to_bounds(&once, bounds);
                prop_assert_eq!(&once, &twice);
                prop_assert!(bounds.contains(&once));
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?);

    passed.push(prop(128, "detection true and false cases", |runner| {
        runner
            .run(&(2usize..6, 4usize..20, any::<u64>(), 0.5f64..3.0), |(d, np, seed, drop)| {
                let spec = ExperimentSpec::new(ExperimentKind::Exp1);
                let p = DynamicProblem::new(Landscape::Sphere, spec, d, bounds, 1, seed).unwrap();
                let mut rng = RngStream::new(seed, 1);
                // all members on the boundary a.x = b of period 0
                let b = p.state(0).b;
                let members = (0..np)
                    .map(|_| {
                        let mut x = rng.random_position(d, Bounds::new(-0.5, 0.5).unwrap());
                        let s: f64 = x.iter().sum();
                        let shift = (b - s) / d as f64;
                        x.iter_mut().for_each(|v| *v += shift);
                        let e = p.evaluate(0, &x);
                        Individual::new(x, e)
                    })
                    .collect();
                let mut pop = Population::new(members);
                let mut frozen = |x: &[f64]| p.evaluate(0, x);
                prop_assert!(!detect_change(&mut pop, &mut frozen));
                // lowering b makes every boundary member infeasible
                let mut lowered = p.state(0).clone();
                lowered.b -= drop;
                let mut shifted = |x: &[f64]| dynde::problems::evaluate(&lowered, Landscape::Sphere, x);
                prop_assert!(detect_change(&mut pop, &mut shifted));
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?);

    passed.push(prop(12, "bitwise run determinism in virtual mode", |runner| {
        runner
            .run(&(0usize..10, any::<u64>(), 0usize..4), |(m, seed, e)| {
                let name = MethodSpec::NAMES[m];
                let kind = ExperimentKind::ALL[e];
                let p = sphere(kind, 3, 8, seed);
                let a = run_dynamic(&run_config(name, 0.1, seed), &p, None).unwrap();
                let b = run_dynamic(&run_config(name, 0.1, seed), &p, None).unwrap();
                prop_assert_eq!(&a, &b);
                let bits = |t: &dynde::engine::RunTrace| -> Vec<u64> {
                    t.rows.iter().flat_map(|r| [r.best_f.to_bits(), r.elapsed_s.to_bits()]).collect()
                };
                prop_assert_eq!(bits(&a), bits(&b));
                Ok(())
            })
            .map_err(|e| e.to_string())
    })?);

    Ok(passed.join("; "))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("metric oracle equivalence", Duration::from_secs(5), criterion_1),
        ("network gradient check", Duration::from_secs(10), criterion_2),
        ("evaluation-count calibration", Duration::from_secs(30), criterion_3),
        ("network time-share trend", Duration::from_secs(120), criterion_4),
        ("large-tau exp2 direction (NN beats noNN)", Duration::from_secs(600), criterion_5),
        ("exp2 crowding weakness", Duration::from_secs(600), criterion_6),
        ("small-tau exp1 network penalty", Duration::from_secs(300), criterion_7),
        ("static DE sanity", Duration::from_secs(60), criterion_8),
        ("predictor learnability", Duration::from_secs(30), criterion_9),
        ("invariant property suites", Duration::from_secs(60), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let took = started.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:.1?}, limit {limit:?}")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {:>2}: {name} ({took:.2?}): {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
