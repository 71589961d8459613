//! CSV records of the suite and their readers.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::suite::{method_order, parse_cell_name};
use crate::engine::RunTrace;
use crate::error::{Error, Result};
use crate::metrics::{self, mean_ranks, MetricOptions, RankDirection};
use crate::problems::{ExperimentKind, Landscape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: String,
    pub function: Landscape,
    pub experiment: ExperimentKind,
    pub tau: f64,
    pub run_seed: u64,
    pub mof: f64,
    pub bebc: f64,
    pub arr: f64,
    pub sr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnShareRow {
    pub method: String,
    pub function: Landscape,
    pub experiment: ExperimentKind,
    pub tau: f64,
    pub run_seed: u64,
    pub nn_time_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub method: String,
    pub mean_rank_mof: f64,
    pub mean_rank_arr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankTable {
    pub rows: Vec<RankRow>,
    pub cells_used: usize,
    pub warnings: Vec<String>,
}

/// Orders rows by function, experiment, tau, method and seed.
pub fn sort_metric_rows(rows: &mut [MetricRow]) {
    rows.sort_by(|a, b| {
        (a.function, a.experiment)
            .cmp(&(b.function, b.experiment))
            .then(a.tau.total_cmp(&b.tau))
            .then(method_order(&a.method).cmp(&method_order(&b.method)))
            .then(a.run_seed.cmp(&b.run_seed))
    });
}

pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let found = r.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("expected header `{}`", header.join(",")),
        });
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

pub const METRIC_HEADER: [&str; 9] = [
    "method",
    "function",
    "experiment",
    "tau",
    "run_seed",
    "mof",
    "bebc",
    "arr",
    "sr",
];

pub fn read_metric_rows(path: &Path) -> Result<Vec<MetricRow>> {
    read_rows(path, &METRIC_HEADER)
}

/// Mean ranks per method over (function, experiment, tau) cells. A cell's
/// value for a method is its mean over runs. MOF ranks lower-is-better and
/// ARR higher-is-better.
pub fn rank_table(rows: &[MetricRow]) -> RankTable {
    type Cell = (Landscape, ExperimentKind, u64);
    let mut sums: BTreeMap<Cell, BTreeMap<String, (f64, f64, usize)>> = BTreeMap::new();
    for r in rows {
        let e = sums
            .entry((r.function, r.experiment, r.tau.to_bits()))
            .or_default()
            .entry(r.method.clone())
            .or_insert((0.0, 0.0, 0));
        e.0 += r.mof;
        e.1 += r.arr;
        e.2 += 1;
    }
    let project = |pick: fn(&(f64, f64, usize)) -> f64| -> BTreeMap<Cell, BTreeMap<String, f64>> {
        sums.iter()
            .map(|(k, methods)| (*k, methods.iter().map(|(m, v)| (m.clone(), pick(v))).collect()))
            .collect()
    };
    let mof = mean_ranks(&project(|v| v.0 / v.2 as f64), RankDirection::LowerIsBetter);
    let arr = mean_ranks(&project(|v| v.1 / v.2 as f64), RankDirection::HigherIsBetter);
    let mut rows: Vec<RankRow> = mof
        .mean_ranks
        .iter()
        .map(|(m, &r)| RankRow {
            method: m.clone(),
            mean_rank_mof: r,
            mean_rank_arr: arr.mean_ranks[m],
        })
        .collect();
    rows.sort_by(|a, b| method_order(&a.method).cmp(&method_order(&b.method)));
    RankTable {
        rows,
        cells_used: mof.cells_used,
        warnings: mof.warnings,
    }
}

/// Recomputes metric rows from every trace stored under `out/traces`.
pub fn recompute_metrics(out: &Path, options: &MetricOptions) -> Result<Vec<MetricRow>> {
    let traces = out.join("traces");
    let mut rows = Vec::new();
    for cell in fs::read_dir(&traces)? {
        let cell = cell?.path();
        let Some(name) = cell.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let (method, function, experiment, tau) = parse_cell_name(name).ok_or_else(|| Error::Format {
            path: cell.clone(),
            message: "directory name is not `<method>__<function>__<experiment>__tau<tau>`".into(),
        })?;
        for file in fs::read_dir(&cell)? {
            let file = file?.path();
            if file.extension().and_then(|e| e.to_str()) != Some("csv") {
                continue;
            }
            let run_seed: u64 = file
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format {
                    path: file.clone(),
                    message: "trace file name is not `<run_seed>.csv`".into(),
                })?;
            let trace = RunTrace::read_csv(BufReader::new(File::open(&file)?), &file)?;
            let report = metrics::evaluate(&trace.rows, options)?;
            rows.push(MetricRow {
                method: method.clone(),
                function,
                experiment,
                tau,
                run_seed,
                mof: report.mof,
                bebc: report.bebc,
                arr: report.arr,
                sr: report.sr,
            });
        }
    }
    sort_metric_rows(&mut rows);
    Ok(rows)
}
