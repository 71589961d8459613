//! Grid runner: every function, experiment, tau, method and run.
//!
//! Output layout under the output directory:
//!
//! ```text
//! best_known/<function>_<experiment>.csv
//! traces/<method>__<function>__<experiment>__tau<tau>/<run_seed>.csv
//! metrics.csv
//! nn_share.csv
//! ranks.csv
//! ```

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::config::SuiteConfig;
use super::io::{rank_table, sort_metric_rows, write_csv_rows, MetricRow, NnShareRow, RankTable};
use crate::engine::{run_dynamic, MethodSpec, RunConfig};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricReport};
use crate::problems::{
    best_known_table, read_best_known, write_best_known, BestKnownTable, DynamicProblem, ExperimentKind,
    ExperimentSpec, Landscape,
};
use crate::rng::derive_seed;

/// Directory name of one (method, function, experiment, tau) cell.
pub fn cell_name(method: &str, function: Landscape, experiment: ExperimentKind, tau: f64) -> String {
    format!("{method}__{function}__{experiment}__tau{tau}")
}

/// Inverse of [`cell_name`].
pub fn parse_cell_name(name: &str) -> Option<(String, Landscape, ExperimentKind, f64)> {
    let parts: Vec<&str> = name.split("__").collect();
    let [method, function, experiment, tau] = parts.as_slice() else {
        return None;
    };
    Some((
        method.to_string(),
        function.parse().ok()?,
        experiment.parse().ok()?,
        tau.strip_prefix("tau")?.parse().ok()?,
    ))
}

fn landscape_index(f: Landscape) -> u64 {
    Landscape::ALL.iter().position(|&x| x == f).unwrap() as u64
}

fn experiment_index(e: ExperimentKind) -> u64 {
    ExperimentKind::ALL.iter().position(|&x| x == e).unwrap() as u64
}

/// Index of a method name in [`MethodSpec::NAMES`].
pub fn method_index(name: &str) -> Option<usize> {
    MethodSpec::NAMES.iter().position(|&n| n == name)
}

/// Seed of the environment schedule shared by all methods, taus and runs of
/// one (function, experiment) pair.
pub fn environment_seed(master: u64, function: Landscape, experiment: ExperimentKind) -> u64 {
    derive_seed(master, &[landscape_index(function), experiment_index(experiment)])
}

/// Seed of one run. Cells are identified by canonical indices and the bit
/// pattern of tau, so filtering the grid never changes a run's seed.
pub fn run_seed(
    master: u64,
    function: Landscape,
    experiment: ExperimentKind,
    tau: f64,
    method: &str,
    run: usize,
) -> u64 {
    let m = method_index(method).unwrap_or(usize::MAX) as u64;
    derive_seed(
        master,
        &[landscape_index(function), experiment_index(experiment), tau.to_bits(), m, run as u64],
    )
}

pub fn build_problem(config: &SuiteConfig, function: Landscape, spec: &ExperimentSpec) -> Result<DynamicProblem> {
    DynamicProblem::new(
        function,
        spec.clone(),
        config.d,
        config.bounds,
        config.num_changes,
        environment_seed(config.master_seed, function, spec.experiment),
    )
}

pub fn best_known_path(out: &Path, function: Landscape, experiment: ExperimentKind) -> PathBuf {
    out.join("best_known").join(format!("{function}_{experiment}.csv"))
}

/// A stored table is reused only if it covers every period and each stored
/// position reproduces its stored value in this problem.
fn table_matches(table: &BestKnownTable, problem: &DynamicProblem) -> bool {
    let n = problem.num_changes();
    table.covers(n, problem.dim())
        && table.len() == n
        && table.iter().all(|(t, e)| {
            let eval = problem.evaluate(t, &e.position);
            eval.is_feasible() && (eval.objective - e.objective).abs() <= 1e-9 * (1.0 + e.objective.abs())
        })
}

fn generate_table(config: &SuiteConfig, problem: &DynamicProblem) -> Result<BestKnownTable> {
    let seed = derive_seed(
        environment_seed(config.master_seed, problem.landscape, problem.spec.experiment),
        &[u64::MAX],
    );
    best_known_table(problem, &config.de, &config.reference, seed)
}

fn write_table(path: &Path, table: &BestKnownTable) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    write_best_known(table, BufWriter::new(File::create(path)?))
}

/// Loads the stored table for `problem` or generates and stores a fresh one.
/// Returns the table and whether it was generated.
pub fn load_or_generate_best_known(
    config: &SuiteConfig,
    problem: &DynamicProblem,
    out: &Path,
) -> Result<(BestKnownTable, bool)> {
    let path = best_known_path(out, problem.landscape, problem.spec.experiment);
    if path.exists() {
        let table = read_best_known(BufReader::new(File::open(&path)?), &path)?;
        if table_matches(&table, problem) {
            return Ok((table, false));
        }
    }
    let table = generate_table(config, problem)?;
    write_table(&path, &table)?;
    Ok((table, true))
}

/// Regenerates every reference table of the configuration.
pub fn generate_best_known_tables(config: &SuiteConfig, out: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let mut written = Vec::new();
    for &function in &config.functions {
        for spec in &config.experiments {
            let problem = build_problem(config, function, spec)?;
            let table = generate_table(config, &problem)?;
            let path = best_known_path(out, function, spec.experiment);
            write_table(&path, &table)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: String,
    pub function: Landscape,
    pub experiment: ExperimentKind,
    pub tau: f64,
    pub run: usize,
    pub run_seed: u64,
    pub report: MetricReport,
    pub nn_time_fraction: f64,
    pub trace_path: PathBuf,
}

impl RunRecord {
    pub fn metric_row(&self) -> MetricRow {
        MetricRow {
            method: self.method.clone(),
            function: self.function,
            experiment: self.experiment,
            tau: self.tau,
            run_seed: self.run_seed,
            mof: self.report.mof,
            bebc: self.report.bebc,
            arr: self.report.arr,
            sr: self.report.sr,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub method: String,
    pub function: Landscape,
    pub experiment: ExperimentKind,
    pub tau: f64,
    pub run: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub ranks: RankTable,
    /// Reference tables generated during this suite, as opposed to loaded.
    pub generated_tables: usize,
}

struct Job<'a> {
    problem: &'a DynamicProblem,
    table: &'a BestKnownTable,
    method: &'a str,
    tau: f64,
    run: usize,
}

fn run_job(config: &SuiteConfig, job: &Job<'_>, out: &Path) -> Result<RunRecord> {
    let function = job.problem.landscape;
    let experiment = job.problem.spec.experiment;
    let seed = run_seed(config.master_seed, function, experiment, job.tau, job.method, job.run);
    let run_config = RunConfig {
        method: MethodSpec::from_name(job.method, &config.method_params, job.tau)?,
        de: config.de.clone(),
        predictor: config.predictor.clone(),
        clock: config.clock,
        tau: job.tau,
        seed,
    };
    let trace = run_dynamic(&run_config, job.problem, Some(job.table))?;
    let report = metrics::evaluate(&trace.rows, &config.metrics)?;
    let dir = out.join("traces").join(cell_name(job.method, function, experiment, job.tau));
    fs::create_dir_all(&dir)?;
    let trace_path = dir.join(format!("{seed}.csv"));
    trace.write_csv(BufWriter::new(File::create(&trace_path)?))?;
    Ok(RunRecord {
        method: job.method.to_string(),
        function,
        experiment,
        tau: job.tau,
        run: job.run,
        run_seed: seed,
        report,
        nn_time_fraction: trace.nn_time_fraction(),
        trace_path,
    })
}

/// Runs the whole grid and writes every output file.
pub fn run_suite(config: &SuiteConfig, out: &Path, progress: bool) -> Result<SuiteResult> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let mut problems = Vec::new();
    let mut generated_tables = 0;
    for &function in &config.functions {
        for spec in &config.experiments {
            let problem = build_problem(config, function, spec)?;
            let (table, generated) = load_or_generate_best_known(config, &problem, out)?;
            generated_tables += usize::from(generated);
            problems.push((problem, table));
        }
    }

    let mut jobs = Vec::new();
    for (problem, table) in &problems {
        for &tau in &config.taus {
            for method in &config.methods {
                for run in 0..config.runs {
                    jobs.push(Job {
                        problem,
                        table,
                        method,
                        tau,
                        run,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let total = jobs.len();
    let outcomes: Vec<Result<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let r = run_job(config, job, out);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if progress {
                    eprintln!(
                        "[{n}/{total}] {}",
                        cell_name(job.method, job.problem.landscape, job.problem.spec.experiment, job.tau)
                    );
                }
                r
            })
            .collect()
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => failures.push(RunFailure {
                method: job.method.to_string(),
                function: job.problem.landscape,
                experiment: job.problem.spec.experiment,
                tau: job.tau,
                run: job.run,
                message: e.to_string(),
            }),
        }
    }
    records.sort_by(|a, b| {
        (a.function, a.experiment)
            .cmp(&(b.function, b.experiment))
            .then(a.tau.total_cmp(&b.tau))
            .then(method_order(&a.method).cmp(&method_order(&b.method)))
            .then(a.run_seed.cmp(&b.run_seed))
    });

    let mut metric_rows: Vec<MetricRow> = records.iter().map(RunRecord::metric_row).collect();
    sort_metric_rows(&mut metric_rows);
    write_csv_rows(&out.join("metrics.csv"), &metric_rows)?;
    let nn_rows: Vec<NnShareRow> = records
        .iter()
        .map(|r| NnShareRow {
            method: r.method.clone(),
            function: r.function,
            experiment: r.experiment,
            tau: r.tau,
            run_seed: r.run_seed,
            nn_time_fraction: r.nn_time_fraction,
        })
        .collect();
    write_csv_rows(&out.join("nn_share.csv"), &nn_rows)?;
    let ranks = rank_table(&metric_rows);
    write_csv_rows(&out.join("ranks.csv"), &ranks.rows)?;

    Ok(SuiteResult {
        records,
        failures,
        ranks,
        generated_tables,
    })
}

/// Sort key placing the named methods in their usual order, others after.
pub(crate) fn method_order(name: &str) -> (usize, &str) {
    (method_index(name).unwrap_or(usize::MAX), name)
}
