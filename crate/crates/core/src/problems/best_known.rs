//! Per-period reference optima used by the error metrics.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DynamicProblem, EnvironmentState, Landscape};
use crate::engine::{optimize_static, DeParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, RngStream, StreamKind};
use crate::types::{beats, Bounds, Evaluation, Position};

#[derive(Debug, Clone, PartialEq)]
pub struct BestKnownEntry {
    pub position: Position,
    pub objective: f64,
}

/// Best-known optimum of every period of a dynamic problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BestKnownTable {
    entries: BTreeMap<usize, BestKnownEntry>,
}

impl BestKnownTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: usize, entry: BestKnownEntry) {
        self.entries.insert(t, entry);
    }

    pub fn get(&self, t: usize) -> Result<&BestKnownEntry> {
        self.entries.get(&t).ok_or(Error::MissingTime(t))
    }

    /// The stored optimum for period `t`.
    pub fn best_known(&self, t: usize) -> Result<(&Position, f64)> {
        self.get(t).map(|e| (&e.position, e.objective))
    }

    pub fn f_star(&self, t: usize) -> Result<f64> {
        self.get(t).map(|e| e.objective)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BestKnownEntry)> {
        self.entries.iter().map(|(t, e)| (*t, e))
    }

    /// True when every period `0..num_changes` has an entry of dimension `d`.
    pub fn covers(&self, num_changes: usize, d: usize) -> bool {
        (0..num_changes).all(|t| self.entries.get(&t).is_some_and(|e| e.position.dim() == d))
    }
}

/// Effort spent per period when searching for reference optima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceBudget {
    /// Independent DE restarts per period.
    pub restarts: usize,
    /// Objective evaluations per restart.
    pub evaluations: usize,
}

impl Default for ReferenceBudget {
    fn default() -> Self {
        Self {
            restarts: 4,
            evaluations: 100_000,
        }
    }
}

/// Exact minimizer of the translated sphere over the box intersected with
/// the half-space `a . x <= b`.
///
/// The KKT point is `x(l) = clamp(o - l a)` for the smallest multiplier
/// `l >= 0` that makes the constraint hold; `a . x(l)` is nonincreasing in
/// `l`, so the multiplier is found by bisection.
pub fn sphere_constrained_optimum(env: &EnvironmentState, bounds: Bounds) -> (Position, f64) {
    let project = |lambda: f64| -> Position {
        env.offset
            .iter()
            .zip(&env.a)
            .map(|(o, a)| (o - lambda * a).clamp(bounds.lower(), bounds.upper()))
            .collect::<Vec<_>>()
            .into()
    };
    let value = |x: &Position| -> f64 {
        x.iter().zip(env.offset.iter()).map(|(xi, oi)| (xi - oi) * (xi - oi)).sum()
    };
    let x0 = project(0.0);
    if env.constraint_value(&x0) <= 0.0 {
        let f = value(&x0);
        return (x0, f);
    }
    let mut hi = 1.0;
    while env.constraint_value(&project(hi)) > 0.0 && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if env.constraint_value(&project(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = project(hi);
    let f = value(&x);
    (x, f)
}

fn consider(best: &mut Option<(Position, Evaluation)>, position: Position, eval: Evaluation) {
    if best.as_ref().is_none_or(|(_, b)| beats(&eval, b)) {
        *best = Some((position, eval));
    }
}

/// Searches every period of `problem` with restarted baseline DE on the
/// frozen environment and keeps the feasibility-best point found.
///
/// The translated unconstrained minimizer is also offered as a candidate
/// whenever it lies inside the box. Restart seeds depend only on
/// `(seed, t, restart)`, so a larger budget continues the same searches and
/// can only improve the stored values.
pub fn generate_best_known(
    problem: &DynamicProblem,
    de: &DeParams,
    budget: &ReferenceBudget,
    seed: u64,
) -> Result<BestKnownTable> {
    de.validate()?;
    let d = problem.dim();
    let generations = budget.evaluations.saturating_sub(de.np) / de.np;
    let results: Vec<(usize, BestKnownEntry)> = (0..problem.num_changes())
        .into_par_iter()
        .map(|t| {
            let mut best: Option<(Position, Evaluation)> = None;
            let env = problem.state(t);
            let mut minimizer = problem.landscape.unconstrained_minimizer(d);
            minimizer.iter_mut().zip(env.offset.iter()).for_each(|(x, o)| *x += o);
            if problem.bounds.contains(&minimizer) {
                let eval = problem.evaluate(t, &minimizer);
                consider(&mut best, minimizer, eval);
            }
            for restart in 0..budget.restarts {
                let mut rng = RngStream::for_kind(
                    derive_seed(seed, &[t as u64, restart as u64]),
                    StreamKind::Reference,
                );
                let mut eval_fn = |x: &[f64]| problem.evaluate(t, x);
                let run = optimize_static(d, problem.bounds, de, generations, &mut eval_fn, &mut rng)?;
                consider(&mut best, run.best.position, run.best.eval);
            }
            let (position, eval) = best.ok_or_else(|| {
                Error::Config("best-known generation needs at least one restart".into())
            })?;
            Ok((
                t,
                BestKnownEntry {
                    position,
                    objective: eval.objective,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let mut table = BestKnownTable::new();
    for (t, entry) in results {
        table.insert(t, entry);
    }
    Ok(table)
}

/// Reference table for any landscape: exact for the sphere, searched with
/// [`generate_best_known`] otherwise.
pub fn best_known_table(
    problem: &DynamicProblem,
    de: &DeParams,
    budget: &ReferenceBudget,
    seed: u64,
) -> Result<BestKnownTable> {
    match problem.landscape {
        Landscape::Sphere => Ok(sphere_table(problem)),
        _ => generate_best_known(problem, de, budget, seed),
    }
}

/// Analytic table for the sphere landscape.
pub(crate) fn sphere_table(problem: &DynamicProblem) -> BestKnownTable {
    debug_assert_eq!(problem.landscape, Landscape::Sphere);
    let mut table = BestKnownTable::new();
    for t in 0..problem.num_changes() {
        let (position, objective) = sphere_constrained_optimum(problem.state(t), problem.bounds);
        table.insert(t, BestKnownEntry { position, objective });
    }
    table
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `t,f_star,x_1..x_d` rows with 17 significant digits.
pub fn write_best_known<W: Write>(table: &BestKnownTable, out: W) -> Result<()> {
    let d = table.iter().next().map_or(0, |(_, e)| e.position.dim());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "f_star".to_string()];
    header.extend((1..=d).map(|i| format!("x_{i}")));
    w.write_record(&header)?;
    for (t, e) in table.iter() {
        let mut row = vec![t.to_string(), fmt17(e.objective)];
        row.extend(e.position.iter().map(|&x| fmt17(x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_best_known<R: Read>(input: R, origin: &Path) -> Result<BestKnownTable> {
    let bad = |message: String| Error::Format {
        path: origin.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.len() < 2 || &header[0] != "t" || &header[1] != "f_star" {
        return Err(bad("expected header `t,f_star,x_1..x_d`".into()));
    }
    for (i, name) in header.iter().skip(2).enumerate() {
        if name != format!("x_{}", i + 1) {
            return Err(bad(format!("unexpected column `{name}`")));
        }
    }
    let mut table = BestKnownTable::new();
    for record in r.records() {
        let record = record?;
        let num = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| bad(format!("not a number: `{s}`")))
        };
        let t: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad time index `{}`", &record[0])))?;
        let objective = num(&record[1])?;
        let position = record.iter().skip(2).map(num).collect::<Result<Vec<_>>>()?;
        table.insert(
            t,
            BestKnownEntry {
                position: position.into(),
                objective,
            },
        );
    }
    Ok(table)
}
