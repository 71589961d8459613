//! Base landscapes, the dynamic linear constraint and the environment-change
//! rules.
//!
//! A dynamic problem is a base landscape evaluated at `x - offset` subject to
//! one linear constraint `sum(a_i * x_i) <= b`. Experiments 1 and 2 move `b`;
//! experiments 3 and 4 move the offset.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamKind};
use crate::types::{aggregate_violation, Bounds, Evaluation, Position};

mod best_known;

pub use best_known::{
    best_known_table, generate_best_known, read_best_known, sphere_constrained_optimum, write_best_known,
    BestKnownEntry, BestKnownTable, ReferenceBudget,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Landscape {
    Sphere,
    Rosenbrock,
    Rastrigin,
}

impl Landscape {
    pub const ALL: [Landscape; 3] = [Landscape::Sphere, Landscape::Rosenbrock, Landscape::Rastrigin];

    pub fn name(&self) -> &'static str {
        match self {
            Landscape::Sphere => "sphere",
            Landscape::Rosenbrock => "rosenbrock",
            Landscape::Rastrigin => "rastrigin",
        }
    }

    /// Minimizer of the untranslated, unconstrained landscape.
    pub fn unconstrained_minimizer(&self, d: usize) -> Position {
        match self {
            Landscape::Rosenbrock => Position::filled(d, 1.0),
            Landscape::Sphere | Landscape::Rastrigin => Position::zeros(d),
        }
    }
}

impl fmt::Display for Landscape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Landscape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Landscape::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown function `{s}`")))
    }
}

/// Canonical sphere, Rosenbrock and Rastrigin values.
pub fn eval_base(id: Landscape, z: &[f64]) -> f64 {
    match id {
        Landscape::Sphere => z.iter().map(|v| v * v).sum(),
        Landscape::Rosenbrock => z
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        Landscape::Rastrigin => {
            10.0 * z.len() as f64
                + z.iter()
                    .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                    .sum::<f64>()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// `b[t+1] = b[t] + U(lk, uk)`
    Exp1,
    /// `b[t+1] = p * sin(b[t]) + N(0, noise_sigma)`
    Exp2,
    /// `X[t+1] = X[t] + 0.1 t`
    Exp3,
    /// `X[t+1] = X[t] + p[t] sin(pi t / 2)`
    Exp4,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::Exp1,
        ExperimentKind::Exp2,
        ExperimentKind::Exp3,
        ExperimentKind::Exp4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Exp1 => "exp1",
            ExperimentKind::Exp2 => "exp2",
            ExperimentKind::Exp3 => "exp3",
            ExperimentKind::Exp4 => "exp4",
        }
    }

    pub fn moves_boundary(&self) -> bool {
        matches!(self, ExperimentKind::Exp1 | ExperimentKind::Exp2)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Parameters of one environment-change rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    /// Exp1 uniform step range.
    pub lk: f64,
    pub uk: f64,
    /// Exp2 amplitude.
    pub p: f64,
    /// Exp2 noise standard deviation.
    pub noise_sigma: f64,
    /// Exp4 per-change amplitude range.
    pub p_range: (f64, f64),
    /// Initial constraint boundary; derived from the landscape when absent.
    pub b0: Option<f64>,
    /// Constraint coefficients; all ones when absent.
    pub a: Option<Vec<f64>>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self::new(ExperimentKind::Exp1)
    }
}

impl ExperimentSpec {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            lk: -1.0,
            uk: 1.0,
            p: 1.0,
            noise_sigma: 0.5,
            p_range: (0.5, 3.0),
            b0: None,
            a: None,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.lk < self.uk) {
            return Err(Error::Config(format!(
                "{}: lk must be below uk, got lk={} uk={}",
                self.experiment, self.lk, self.uk
            )));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Config(format!(
                "{}: noise_sigma must be non-negative, got {}",
                self.experiment, self.noise_sigma
            )));
        }
        if !(self.p_range.0 < self.p_range.1) {
            return Err(Error::Config(format!(
                "{}: p_range must satisfy low < high, got {:?}",
                self.experiment, self.p_range
            )));
        }
        if let Some(a) = &self.a {
            if a.len() != d {
                return Err(Error::Config(format!(
                    "{}: constraint coefficients `a` must have length {d}, got {}",
                    self.experiment,
                    a.len()
                )));
            }
        }
        Ok(())
    }

    pub fn coefficients(&self, d: usize) -> Vec<f64> {
        self.a.clone().unwrap_or_else(|| vec![1.0; d])
    }

    /// Initial boundary. Boundary experiments start two units above the
    /// initial unconstrained optimum; offset experiments start with a
    /// boundary no point of the box can violate.
    pub fn initial_boundary(&self, landscape: Landscape, d: usize, bounds: Bounds) -> f64 {
        if let Some(b0) = self.b0 {
            return b0;
        }
        let a = self.coefficients(d);
        if self.experiment.moves_boundary() {
            let x0 = landscape.unconstrained_minimizer(d);
            a.iter().zip(x0.iter()).map(|(ai, xi)| ai * xi).sum::<f64>() + 2.0
        } else {
            let reach = bounds.lower().abs().max(bounds.upper().abs());
            a.iter().map(|ai| ai.abs() * reach).sum::<f64>() + 1.0
        }
    }
}

/// The environment during one period.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentState {
    pub time_index: usize,
    pub offset: Position,
    pub b: f64,
    pub a: Vec<f64>,
    /// Amplitude drawn for the latest exp4 change.
    pub p_t: f64,
}

impl EnvironmentState {
    pub fn initial(spec: &ExperimentSpec, landscape: Landscape, d: usize, bounds: Bounds) -> Self {
        Self {
            time_index: 0,
            offset: Position::zeros(d),
            b: spec.initial_boundary(landscape, d, bounds),
            a: spec.coefficients(d),
            p_t: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn constraint_value(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() - self.b
    }
}

/// Objective and violation of `x` in the given environment.
pub fn evaluate(env: &EnvironmentState, id: Landscape, x: &[f64]) -> Evaluation {
    let z: Vec<f64> = x.iter().zip(env.offset.iter()).map(|(xi, oi)| xi - oi).collect();
    Evaluation {
        objective: eval_base(id, &z),
        violation: aggregate_violation(&[env.constraint_value(x)]),
        time_index: env.time_index,
    }
}

// sin(pi t / 2) evaluated exactly for integer t.
fn quarter_wave(t: usize) -> f64 {
    match t % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Applies one change to the environment and increments its time index.
pub fn advance_environment(
    env: &EnvironmentState,
    spec: &ExperimentSpec,
    rng: &mut RngStream,
) -> EnvironmentState {
    let mut next = env.clone();
    let t = env.time_index;
    match spec.experiment {
        ExperimentKind::Exp1 => {
            next.b += rng.uniform(spec.lk, spec.uk);
        }
        ExperimentKind::Exp2 => {
            let noise: f64 = StandardNormal.sample(rng);
            next.b = spec.p * env.b.sin() + spec.noise_sigma * noise;
        }
        ExperimentKind::Exp3 => {
            let step = 0.1 * t as f64;
            next.offset.iter_mut().for_each(|o| *o += step);
        }
        ExperimentKind::Exp4 => {
            next.p_t = rng.uniform(spec.p_range.0, spec.p_range.1);
            let step = next.p_t * quarter_wave(t);
            next.offset.iter_mut().for_each(|o| *o += step);
        }
    }
    next.time_index = t + 1;
    next
}

/// A landscape together with the pre-computed environment of every period.
///
/// The environment sequence depends only on the experiment and its seed, so
/// every method and run facing the same schedule sees the same changes and
/// can share one best-known table.
#[derive(Debug, Clone)]
pub struct DynamicProblem {
    pub landscape: Landscape,
    pub spec: ExperimentSpec,
    pub bounds: Bounds,
    states: Vec<EnvironmentState>,
}

impl DynamicProblem {
    /// Builds states for periods `0..=num_changes`. The final state only
    /// absorbs evaluations that straddle the end of the run.
    pub fn new(
        landscape: Landscape,
        spec: ExperimentSpec,
        d: usize,
        bounds: Bounds,
        num_changes: usize,
        env_seed: u64,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        spec.validate(d)?;
        let mut rng = RngStream::for_kind(env_seed, StreamKind::Environment);
        let mut states = Vec::with_capacity(num_changes + 1);
        states.push(EnvironmentState::initial(&spec, landscape, d, bounds));
        for _ in 0..num_changes {
            let next = advance_environment(states.last().unwrap(), &spec, &mut rng);
            states.push(next);
        }
        Ok(Self {
            landscape,
            spec,
            bounds,
            states,
        })
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn num_changes(&self) -> usize {
        self.states.len() - 1
    }

    /// State for period `t`, saturating at the last pre-computed period.
    pub fn state(&self, t: usize) -> &EnvironmentState {
        &self.states[t.min(self.states.len() - 1)]
    }

    pub fn states(&self) -> &[EnvironmentState] {
        &self.states
    }

    pub fn evaluate(&self, t: usize, x: &[f64]) -> Evaluation {
        evaluate(self.state(t), self.landscape, x)
    }
}
