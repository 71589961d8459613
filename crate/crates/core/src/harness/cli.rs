//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on usage or configuration errors, 2 on
//! runtime failures, including failed runs inside a suite.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{parse_config, SuiteConfig};
use super::io::{rank_table, read_metric_rows, recompute_metrics, write_csv_rows, RankTable};
use super::suite::{generate_best_known_tables, run_suite};
use crate::engine::ClockMode;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dynde", version, about = "Dynamic constrained optimization with DE and an optimum predictor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress progress and summaries.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the method grid of a configuration.
    Run(SuiteArgs),
    /// Generate best-known reference tables.
    BestKnown(SuiteArgs),
    /// Recompute metrics.csv and ranks.csv from stored traces.
    Metrics(MetricsArgs),
    /// Mean-rank table from metric CSV files.
    Rank(RankArgs),
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// JSON configuration; defaults apply to every omitted key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_clock)]
    clock: Option<ClockMode>,
    /// Comma-separated change periods in seconds.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Comma-separated method names such as NN_RI,noNN_RI.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Configuration holding the success thresholds.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Metric CSV files; `<out>/metrics.csv` when none are given.
    inputs: Vec<PathBuf>,
}

fn parse_clock(s: &str) -> std::result::Result<ClockMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<SuiteConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)
        }
        None => parse_config(""),
    }
}

fn suite_config(args: &SuiteArgs) -> Result<SuiteConfig> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(mode) = args.clock {
        config.clock.mode = mode;
    }
    if let Some(taus) = &args.tau {
        config.taus = taus.clone();
    }
    if let Some(methods) = &args.methods {
        config.methods = methods.clone();
    }
    config.validate()?;
    Ok(config)
}

fn print_ranks(table: &RankTable) {
    println!("{:<10} {:>14} {:>14}", "method", "mean_rank_mof", "mean_rank_arr");
    for r in &table.rows {
        println!("{:<10} {:>14.3} {:>14.3}", r.method, r.mean_rank_mof, r.mean_rank_arr);
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let quiet = cli.quiet;
    match &cli.command {
        Command::Run(args) => {
            let config = suite_config(args)?;
            let result = run_suite(&config, &args.out, !quiet)?;
            for f in &result.failures {
                eprintln!(
                    "run failed: {} {} {} tau={} run={}: {}",
                    f.method, f.function, f.experiment, f.tau, f.run, f.message
                );
            }
            for w in &result.ranks.warnings {
                eprintln!("warning: {w}");
            }
            if !quiet {
                eprintln!(
                    "{} runs written to {} ({} reference tables generated)",
                    result.records.len(),
                    args.out.display(),
                    result.generated_tables
                );
                print_ranks(&result.ranks);
            }
            Ok(result.failures.is_empty())
        }
        Command::BestKnown(args) => {
            let config = suite_config(args)?;
            let paths = generate_best_known_tables(&config, &args.out)?;
            if !quiet {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Ok(true)
        }
        Command::Metrics(args) => {
            let config = load_config(args.config.as_deref())?;
            let rows = recompute_metrics(&args.out, &config.metrics)?;
            write_csv_rows(&args.out.join("metrics.csv"), &rows)?;
            let ranks = rank_table(&rows);
            write_csv_rows(&args.out.join("ranks.csv"), &ranks.rows)?;
            if !quiet {
                eprintln!("recomputed {} metric rows", rows.len());
            }
            Ok(true)
        }
        Command::Rank(args) => {
            let inputs = if args.inputs.is_empty() {
                vec![args.out.join("metrics.csv")]
            } else {
                args.inputs.clone()
            };
            let mut rows = Vec::new();
            for p in &inputs {
                rows.extend(read_metric_rows(p)?);
            }
            let ranks = rank_table(&rows);
            fs::create_dir_all(&args.out)?;
            write_csv_rows(&args.out.join("ranks.csv"), &ranks.rows)?;
            for w in &ranks.warnings {
                eprintln!("warning: {w}");
            }
            if !quiet {
                print_ranks(&ranks);
            }
            Ok(true)
        }
    }
}

/// Parses `args` (program name first) and executes the command. Returns the
/// process exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
