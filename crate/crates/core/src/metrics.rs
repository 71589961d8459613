//! Error-based performance measures over run traces and mean-rank
//! aggregation across methods.
//!
//! All measures read `f_best(t, G)` from the `best_f` column and `f*(t)`
//! from `f_star`. Generation numbers restart at every period; rows of one
//! period are taken in file order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::engine::TraceRow;
use crate::error::{Error, Result};

/// Success thresholds: a period succeeds when its final error is at most
/// `max(epsilon * |f*|, epsilon_abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricOptions {
    pub epsilon: f64,
    pub epsilon_abs: f64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            epsilon_abs: 1e-4,
        }
    }
}

impl MetricOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "metrics.epsilon must be in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.epsilon_abs >= 0.0) {
            return Err(Error::Config(format!(
                "metrics.epsilon_abs must be non-negative, got {}",
                self.epsilon_abs
            )));
        }
        Ok(())
    }
}

/// Per-period breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMetrics {
    pub t: usize,
    pub generations: usize,
    pub f_star: f64,
    pub final_error: f64,
    pub arr_term: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mof: f64,
    pub bebc: f64,
    pub arr: f64,
    pub sr: f64,
    pub periods: Vec<PeriodMetrics>,
}

/// Rows grouped by period, with the period optimum.
struct Period {
    t: usize,
    f_star: f64,
    best: Vec<f64>,
}

fn periods(rows: &[TraceRow]) -> Result<Vec<Period>> {
    if rows.is_empty() {
        return Err(Error::Trace("trace has no rows".into()));
    }
    let mut grouped: BTreeMap<usize, Period> = BTreeMap::new();
    for row in rows {
        let f_star = row.f_star.ok_or_else(|| {
            Error::Config(format!("no best-known optimum for time index {} in the trace", row.t))
        })?;
        let p = grouped.entry(row.t).or_insert_with(|| Period {
            t: row.t,
            f_star,
            best: Vec::new(),
        });
        if p.f_star != f_star {
            return Err(Error::Trace(format!("time index {} has more than one f_star", row.t)));
        }
        p.best.push(row.best_f);
    }
    Ok(grouped.into_values().collect())
}

/// Mean absolute error over every generation of every period.
pub fn mof(rows: &[TraceRow]) -> Result<f64> {
    let ps = periods(rows)?;
    let total: usize = ps.iter().map(|p| p.best.len()).sum();
    let sum: f64 = ps
        .iter()
        .flat_map(|p| p.best.iter().map(move |f| (p.f_star - f).abs()))
        .sum();
    Ok(sum / total as f64)
}

fn final_error(p: &Period) -> f64 {
    (p.f_star - p.best[p.best.len() - 1]).abs()
}

/// Mean over periods of the error at the last generation.
pub fn bebc(rows: &[TraceRow]) -> Result<f64> {
    let ps = periods(rows)?;
    Ok(ps.iter().map(final_error).sum::<f64>() / ps.len() as f64)
}

fn arr_term(p: &Period) -> f64 {
    let first = p.best[0];
    if first == p.f_star {
        return 1.0;
    }
    let progress: f64 = p.best.iter().map(|f| (f - first).abs()).sum();
    progress / (p.best.len() as f64 * (p.f_star - first).abs())
}

/// Mean over periods of how far, on average over its generations, the
/// period best moved from its first value toward the optimum.
pub fn arr(rows: &[TraceRow]) -> Result<f64> {
    let ps = periods(rows)?;
    Ok(ps.iter().map(arr_term).sum::<f64>() / ps.len() as f64)
}

fn succeeded(p: &Period, options: &MetricOptions) -> bool {
    final_error(p) <= (options.epsilon * p.f_star.abs()).max(options.epsilon_abs)
}

/// Fraction of periods whose final error is within the success threshold.
pub fn success_rate(rows: &[TraceRow], options: &MetricOptions) -> Result<f64> {
    let ps = periods(rows)?;
    let hits = ps.iter().filter(|p| succeeded(p, options)).count();
    Ok(hits as f64 / ps.len() as f64)
}

/// All four measures with the per-period breakdown.
pub fn evaluate(rows: &[TraceRow], options: &MetricOptions) -> Result<MetricReport> {
    let ps = periods(rows)?;
    let periods: Vec<PeriodMetrics> = ps
        .iter()
        .map(|p| PeriodMetrics {
            t: p.t,
            generations: p.best.len(),
            f_star: p.f_star,
            final_error: final_error(p),
            arr_term: arr_term(p),
            success: succeeded(p, options),
        })
        .collect();
    let n = periods.len() as f64;
    let report = MetricReport {
        mof: mof(rows)?,
        bebc: periods.iter().map(|p| p.final_error).sum::<f64>() / n,
        arr: periods.iter().map(|p| p.arr_term).sum::<f64>() / n,
        sr: periods.iter().filter(|p| p.success).count() as f64 / n,
        periods,
    };
    for (name, v) in [("MOF", report.mof), ("BEBC", report.bebc), ("ARR", report.arr)] {
        if !v.is_finite() {
            return Err(Error::Trace(format!("{name} is not finite")));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDirection {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOutcome {
    pub mean_ranks: BTreeMap<String, f64>,
    pub cells_used: usize,
    /// Cells left out because a method had no value there.
    pub warnings: Vec<String>,
}

/// Ranks `1..=M` within one cell, ties sharing their average rank.
pub fn cell_ranks(values: &[f64], direction: RankDirection) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    let cmp = |a: &f64, b: &f64| match direction {
        RankDirection::LowerIsBetter => a.total_cmp(b),
        RankDirection::HigherIsBetter => b.total_cmp(a),
    };
    order.sort_by(|&i, &j| cmp(&values[i], &values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && cmp(&values[order[start]], &values[order[end]]) == Ordering::Equal {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

/// Mean rank of every method across cells. Methods are the union over all
/// cells; a cell lacking any of them is excluded with a warning.
pub fn mean_ranks<K: Ord + Debug>(
    cells: &BTreeMap<K, BTreeMap<String, f64>>,
    direction: RankDirection,
) -> RankOutcome {
    let methods: BTreeSet<&String> = cells.values().flat_map(|c| c.keys()).collect();
    let mut sums: BTreeMap<String, f64> = methods.iter().map(|m| ((*m).clone(), 0.0)).collect();
    let mut used = 0;
    let mut warnings = Vec::new();
    for (key, cell) in cells {
        let missing: Vec<&str> = methods
            .iter()
            .filter(|m| !cell.contains_key(**m))
            .map(|m| m.as_str())
            .collect();
        if !missing.is_empty() {
            warnings.push(format!("cell {key:?} is incomplete (missing {}); excluded", missing.join(", ")));
            continue;
        }
        let values: Vec<f64> = methods.iter().map(|m| cell[*m]).collect();
        for (m, r) in methods.iter().zip(cell_ranks(&values, direction)) {
            *sums.get_mut(*m).unwrap() += r;
        }
        used += 1;
    }
    let mean_ranks = if used == 0 {
        BTreeMap::new()
    } else {
        sums.into_iter().map(|(m, s)| (m, s / used as f64)).collect()
    };
    RankOutcome {
        mean_ranks,
        cells_used: used,
        warnings,
    }
}
