//! DE/rand/1/bin operators and one generation of selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{beats, clamp_in_place, Bounds, Evaluation, Individual, Population, Position};

use rand::Rng;

/// Population size, crossover rate and scale-factor range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeParams {
    pub np: usize,
    pub cr: f64,
    pub f_range: (f64, f64),
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            np: 20,
            cr: 0.3,
            f_range: (0.2, 0.8),
        }
    }
}

impl DeParams {
    pub fn validate(&self) -> Result<()> {
        if self.np < 4 {
            return Err(Error::Config(format!(
                "de.np must be at least 4 for rand/1 mutation, got {}",
                self.np
            )));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::Config(format!("de.cr must be in [0, 1], got {}", self.cr)));
        }
        validate_f_range("de.f_range", self.f_range)
    }
}

pub(crate) fn validate_f_range(key: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo > 0.0 && lo <= hi && hi <= 2.0) {
        return Err(Error::Config(format!(
            "{key} must satisfy 0 < low <= high <= 2, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Anything that can score a position. Dynamic runs implement this on top of
/// the budget clock; static searches use a plain closure.
pub trait Evaluate {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation;
}

impl<F: FnMut(&[f64]) -> Evaluation> Evaluate for F {
    fn evaluate(&mut self, x: &[f64]) -> Evaluation {
        self(x)
    }
}

/// `x_r0 + f (x_r1 - x_r2)` with `r0, r1, r2, i` pairwise distinct, clamped
/// to the bounds.
pub fn mutant_rand_1(
    members: &[Individual],
    i: usize,
    f: f64,
    bounds: Bounds,
    rng: &mut RngStream,
) -> Result<Position> {
    let np = members.len();
    if np < 4 {
        return Err(Error::Config(format!(
            "rand/1 mutation needs at least 4 members, got {np}"
        )));
    }
    let mut pick = |taken: &[usize]| loop {
        let r = rng.random_range(0..np);
        if !taken.contains(&r) {
            return r;
        }
    };
    let r0 = pick(&[i]);
    let r1 = pick(&[i, r0]);
    let r2 = pick(&[i, r0, r1]);
    Ok(rand_1_from(&members[r0].position, &members[r1].position, &members[r2].position, f, bounds))
}

pub(crate) fn rand_1_from(
    base: &[f64],
    x1: &[f64],
    x2: &[f64],
    f: f64,
    bounds: Bounds,
) -> Position {
    let mut v: Vec<f64> = base
        .iter()
        .zip(x1.iter().zip(x2))
        .map(|(b, (a, c))| b + f * (a - c))
        .collect();
    clamp_in_place(&mut v, bounds);
    v.into()
}

/// Binomial crossover with one forced mutant coordinate.
pub fn crossover_binomial(target: &[f64], mutant: &[f64], cr: f64, rng: &mut RngStream) -> Position {
    assert_eq!(target.len(), mutant.len(), "crossover of unequal dimensions");
    let d = target.len();
    let forced = rng.random_range(0..d);
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&t, &m))| {
            let draw: f64 = rng.random();
            if draw < cr || j == forced {
                m
            } else {
                t
            }
        })
        .collect::<Vec<_>>()
        .into()
}

/// Effective parameters for one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationSettings {
    pub f_range: (f64, f64),
    pub cr: f64,
    /// Crowding over the `n` nearest members instead of parent selection.
    pub crowding: Option<usize>,
}

/// Indices of the `n` members closest to `pos`, nearest first. Ties keep
/// index order.
pub fn nearest_indices(members: &[Individual], pos: &[f64], n: usize) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = members
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let d2: f64 = m.position.iter().zip(pos).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, j)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dist.into_iter().take(n).map(|(_, j)| j).collect()
}

/// Crowding replacement: the nearest of the `n` closest members that the
/// offspring strictly beats, if any.
pub fn crowding_target(members: &[Individual], pos: &[f64], eval: &Evaluation, n: usize) -> Option<usize> {
    nearest_indices(members, pos, n)
        .into_iter()
        .find(|&j| beats(eval, &members[j].eval))
}

/// One generation of DE/rand/1/bin. Mutants are built from the population
/// as it stood at the start of the generation. Returns the number of
/// replacements.
pub fn de_generation<E: Evaluate + ?Sized>(
    pop: &mut Population,
    settings: &GenerationSettings,
    bounds: Bounds,
    evaluator: &mut E,
    rng: &mut RngStream,
) -> Result<usize> {
    let parents = pop.members.clone();
    let mut replaced = 0;
    for i in 0..parents.len() {
        let f = rng.uniform(settings.f_range.0, settings.f_range.1);
        let mutant = mutant_rand_1(&parents, i, f, bounds, rng)?;
        let trial = crossover_binomial(&parents[i].position, &mutant, settings.cr, rng);
        let eval = evaluator.evaluate(&trial);
        let slot = match settings.crowding {
            Some(n) => crowding_target(&pop.members, &trial, &eval, n),
            None => beats(&eval, &pop.members[i].eval).then_some(i),
        };
        if let Some(j) = slot {
            pop.members[j] = Individual::new(trial, eval);
            replaced += 1;
        }
    }
    Ok(replaced)
}

/// Result of a static (frozen environment) DE search.
#[derive(Debug, Clone)]
pub struct StaticRun {
    pub best: Individual,
    /// Feasibility-best evaluation after initialization and after every
    /// generation.
    pub history: Vec<Evaluation>,
    pub population: Population,
}

/// Plain DE on a frozen objective: random initialization, then
/// `generations` generations of DE/rand/1/bin with parent selection.
pub fn optimize_static<E: Evaluate + ?Sized>(
    d: usize,
    bounds: Bounds,
    params: &DeParams,
    generations: usize,
    evaluator: &mut E,
    rng: &mut RngStream,
) -> Result<StaticRun> {
    params.validate()?;
    let members = (0..params.np)
        .map(|_| {
            let x = rng.random_position(d, bounds);
            let e = evaluator.evaluate(&x);
            Individual::new(x, e)
        })
        .collect();
    let mut pop = Population::new(members);
    let settings = GenerationSettings {
        f_range: params.f_range,
        cr: params.cr,
        crowding: None,
    };
    let mut history = Vec::with_capacity(generations + 1);
    history.push(pop.best().expect("non-empty population").eval);
    for _ in 0..generations {
        de_generation(&mut pop, &settings, bounds, evaluator, rng)?;
        history.push(pop.best().expect("non-empty population").eval);
    }
    let best = pop.best().cloned().expect("non-empty population");
    Ok(StaticRun {
        best,
        history,
        population: pop,
    })
}
