//! Positions, evaluations and Deb's feasibility rules.

use std::cmp::Ordering;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the box-bounded search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(Vec<f64>);

impl Position {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn filled(d: usize, value: f64) -> Self {
        Self(vec![value; d])
    }

    pub fn zeros(d: usize) -> Self {
        Self::filled(d, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance_sq(&self, other: &Position) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &Position) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

impl From<Vec<f64>> for Position {
    fn from(coords: Vec<f64>) -> Self {
        Self(coords)
    }
}

impl Deref for Position {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Position {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl AsRef<[f64]> for Position {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Box bounds shared by every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Bounds {
    lower: f64,
    upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::Config(format!(
                "bounds must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().all(|&x| x >= self.lower && x <= self.upper)
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            lower: -5.0,
            upper: 5.0,
        }
    }
}

impl TryFrom<(f64, f64)> for Bounds {
    type Error = Error;

    fn try_from((lower, upper): (f64, f64)) -> Result<Self> {
        Self::new(lower, upper)
    }
}

impl From<Bounds> for (f64, f64) {
    fn from(b: Bounds) -> Self {
        (b.lower, b.upper)
    }
}

/// Projects every coordinate into `[lower, upper]`.
pub fn clamp_to_bounds(p: &Position, bounds: Bounds) -> Position {
    let mut out = p.clone();
    clamp_in_place(&mut out, bounds);
    out
}

pub fn clamp_in_place(p: &mut [f64], bounds: Bounds) {
    for x in p.iter_mut() {
        *x = x.clamp(bounds.lower, bounds.upper);
    }
}

/// Objective value, aggregate violation and the environment period the
/// values were computed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub objective: f64,
    pub violation: f64,
    pub time_index: usize,
}

impl Evaluation {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Sum of the positive parts of the constraint values `g_i(x) <= 0`.
pub fn aggregate_violation(g_values: &[f64]) -> f64 {
    g_values.iter().map(|g| g.max(0.0)).sum()
}

// NaN sorts after every number so the comparison stays a total preorder.
fn cmp_minimize(a: f64, b: f64) -> Ordering {
    match a.partial_cmp(&b) {
        Some(ord) => ord,
        None => match (a.is_nan(), b.is_nan()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            _ => Ordering::Less,
        },
    }
}

/// Deb's feasibility rules. `Less` means `a` is better than `b`.
///
/// A feasible evaluation beats an infeasible one; two feasible evaluations
/// are ordered by objective and two infeasible ones by violation. Exactly
/// equal values compare `Equal`.
pub fn compare_feasibility(a: &Evaluation, b: &Evaluation) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => cmp_minimize(a.objective, b.objective),
        (false, false) => cmp_minimize(a.violation, b.violation),
    }
}

/// True when `a` strictly beats `b` under the feasibility rules.
pub fn beats(a: &Evaluation, b: &Evaluation) -> bool {
    compare_feasibility(a, b) == Ordering::Less
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub position: Position,
    pub eval: Evaluation,
}

impl Individual {
    pub fn new(position: Position, eval: Evaluation) -> Self {
        Self { position, eval }
    }
}

/// Fixed-size, index-stable population.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Indices of the two change-detection sentinels: the first and the
    /// middle member.
    pub fn sentinel_indices(&self) -> [usize; 2] {
        [0, self.members.len() / 2]
    }

    pub fn best_index(&self) -> Option<usize> {
        (0..self.members.len()).min_by(|&i, &j| {
            compare_feasibility(&self.members[i].eval, &self.members[j].eval)
        })
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.members[i])
    }

    /// Member indices ordered from feasibility-worst to best. Ties keep index
    /// order.
    pub fn worst_first(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.members.len()).collect();
        idx.sort_by(|&i, &j| {
            compare_feasibility(&self.members[j].eval, &self.members[i].eval)
        });
        idx
    }
}
