//! One dynamic run: clock-driven environment, detection, reaction and DE
//! generations, logged as one trace row per generation.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::clock::{Clock, ClockConfig, NnCharge};
use super::de::{de_generation, DeParams, Evaluate, GenerationSettings};
use super::method::{hyper_params_current, DiversityMechanism, HyperState, MethodSpec, ReactionStrategy};
use super::reaction::{detect_change, react};
use crate::error::{Error, Result};
use crate::predictor::{Predictor, PredictorConfig};
use crate::problems::{BestKnownTable, DynamicProblem};
use crate::rng::{RngStream, StreamKind};
use crate::types::{beats, Evaluation, Individual, Population};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: MethodSpec,
    pub de: DeParams,
    pub predictor: PredictorConfig,
    pub clock: ClockConfig,
    /// Change period in seconds of budget.
    pub tau: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.de.validate()?;
        self.method.validate(self.de.np)?;
        self.clock.validate()?;
        if let ReactionStrategy::NN { .. } = self.method.strategy {
            self.predictor.validate()?;
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }
}

/// One generation. `generation` restarts at 1 in every period and `best_f`
/// is the feasibility-best evaluation made so far in period `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub generation: usize,
    pub elapsed_s: f64,
    pub evals_cum: u64,
    pub best_f: f64,
    pub best_violation: f64,
    pub f_star: Option<f64>,
    pub error: Option<f64>,
}

pub const TRACE_HEADER: [&str; 8] = [
    "t",
    "generation",
    "elapsed_s",
    "evals_cum",
    "best_f",
    "best_violation",
    "f_star",
    "error",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub warnings: Vec<String>,
    pub evaluations: u64,
    /// Evaluations made in each period `0..num_changes`.
    pub period_evaluations: Vec<u64>,
    pub elapsed_seconds: f64,
    pub nn_seconds: f64,
    pub detections: usize,
    pub trainings: usize,
    pub predictions: usize,
}

impl RunTrace {
    /// Share of the budget spent in network training and prediction.
    pub fn nn_time_fraction(&self) -> f64 {
        if self.elapsed_seconds > 0.0 {
            self.nn_seconds / self.elapsed_seconds
        } else {
            0.0
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(TRACE_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the rows of a trace file. Counters not stored in the file are
    /// restored from the last row where possible.
    pub fn read_csv<R: Read>(input: R, origin: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().ne(TRACE_HEADER) {
            return Err(Error::Format {
                path: origin.to_path_buf(),
                message: format!("expected header `{}`", TRACE_HEADER.join(",")),
            });
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<TraceRow>, _>>()
            .map_err(|e| Error::Format {
                path: origin.to_path_buf(),
                message: e.to_string(),
            })?;
        let (evaluations, elapsed_seconds) = rows.last().map_or((0, 0.0), |r| (r.evals_cum, r.elapsed_s));
        Ok(Self {
            rows,
            evaluations,
            elapsed_seconds,
            ..Self::default()
        })
    }
}

/// Evaluator seen by the optimizer. Every call reads the clock, scores the
/// position in the environment of the current period and charges the clock.
struct Tracker<'a> {
    problem: &'a DynamicProblem,
    clock: Clock,
    t: usize,
    evaluations: u64,
    period_evaluations: Vec<u64>,
    period_best: Option<Evaluation>,
}

impl Evaluate for Tracker<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation {
        let now = self.clock.time_index();
        if now != self.t {
            self.t = now;
            self.period_best = None;
        }
        let eval = self.problem.evaluate(now, x);
        self.clock.charge_evaluations(1);
        self.evaluations += 1;
        if let Some(n) = self.period_evaluations.get_mut(now) {
            *n += 1;
        }
        if self.period_best.as_ref().is_none_or(|b| beats(&eval, b)) {
            self.period_best = Some(eval);
        }
        eval
    }
}

/// Runs one method on `problem` until the clock reaches the last period.
///
/// With `best_known`, every row carries `f_star` and `error`; a missing
/// period in the table is an error.
pub fn run_dynamic(
    config: &RunConfig,
    problem: &DynamicProblem,
    best_known: Option<&BestKnownTable>,
) -> Result<RunTrace> {
    config.validate()?;
    let d = problem.dim();
    let bounds = problem.bounds;
    let num_changes = problem.num_changes();
    let mut tracker = Tracker {
        problem,
        clock: Clock::new(&config.clock, config.tau)?,
        t: 0,
        evaluations: 0,
        period_evaluations: vec![0; num_changes],
        period_best: None,
    };
    let mut evo_rng = RngStream::for_kind(config.seed, StreamKind::Evolution);
    let mut div_rng = RngStream::for_kind(config.seed, StreamKind::Diversity);
    let mut predictor = match config.method.strategy {
        ReactionStrategy::NN { .. } => Some(Predictor::new(config.predictor.clone(), d, bounds, config.seed)?),
        ReactionStrategy::NoNN => None,
    };
    let n_p = match config.method.strategy {
        ReactionStrategy::NN { n_p } => n_p,
        ReactionStrategy::NoNN => 0,
    };
    let crowding = match config.method.diversity {
        DiversityMechanism::Crowding { n } => Some(n),
        _ => None,
    };

    let members = (0..config.de.np)
        .map(|_| {
            let x = evo_rng.random_position(d, bounds);
            let e = tracker.evaluate(&x);
            Individual::new(x, e)
        })
        .collect();
    let mut pop = Population::new(members);
    let mut hyper = HyperState::default();
    let mut trace = RunTrace::default();
    let mut known_period = 0usize;
    let mut last_row: Option<(usize, usize)> = None;

    while tracker.clock.time_index() < num_changes {
        if detect_change(&mut pop, &mut tracker) {
            trace.detections += 1;
            let mut predicted = None;
            if let Some(pred) = predictor.as_mut() {
                // members still carrying the oldest evaluations belong to the
                // period that just ended
                let oldest = pop.members.iter().map(|m| m.eval.time_index).min().unwrap_or(0);
                let candidates: Vec<Individual> = pop
                    .members
                    .iter()
                    .filter(|m| m.eval.time_index == oldest)
                    .cloned()
                    .collect();
                pred.record_time_best(known_period, &candidates);
                pred.collect_samples();
                if pred.ready_to_train() {
                    tracker.clock.time_nn(NnCharge::Train, || pred.train())?;
                    trace.trainings += 1;
                }
                if pred.is_trained() {
                    if let Ok(p) = tracker.clock.time_nn(NnCharge::Predict, || pred.predict_neighbors(n_p)) {
                        trace.predictions += 1;
                        predicted = Some(p);
                    }
                }
            }
            known_period += 1;
            react(
                &mut pop,
                &config.method.diversity,
                predicted.as_deref(),
                &mut hyper,
                bounds,
                &mut tracker,
                &mut div_rng,
            );
        }

        let (f_range, cr) = hyper_params_current(&config.de, &config.method.diversity, &hyper);
        let settings = GenerationSettings { f_range, cr, crowding };
        de_generation(&mut pop, &settings, bounds, &mut tracker, &mut evo_rng)?;
        hyper.tick();

        let t = tracker.t;
        if t >= num_changes {
            break;
        }
        let generation = match last_row {
            Some((prev_t, g)) if prev_t == t => g + 1,
            Some((prev_t, _)) => {
                if t > prev_t + 1 {
                    trace.warnings.push(format!(
                        "periods {}..{} ended without a completed generation",
                        prev_t + 1,
                        t
                    ));
                }
                1
            }
            None => {
                if t > 0 {
                    trace.warnings.push(format!("periods 0..{t} ended without a completed generation"));
                }
                1
            }
        };
        last_row = Some((t, generation));
        let best = tracker.period_best.expect("a generation evaluates at least one position");
        let f_star = best_known.map(|table| table.f_star(t)).transpose()?;
        trace.rows.push(TraceRow {
            t,
            generation,
            elapsed_s: tracker.clock.elapsed_seconds(),
            evals_cum: tracker.evaluations,
            best_f: best.objective,
            best_violation: best.violation,
            f_star,
            error: f_star.map(|f| (f - best.objective).abs()),
        });
    }

    trace.evaluations = tracker.evaluations;
    trace.period_evaluations = tracker.period_evaluations;
    trace.elapsed_seconds = tracker.clock.elapsed_seconds();
    trace.nn_seconds = tracker.clock.nn_seconds();
    Ok(trace)
}
