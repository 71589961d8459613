//! Suite configuration, the grid runner, CSV persistence and the CLI.

pub mod cli;
pub mod config;
pub mod io;
pub mod suite;

pub use cli::run_cli;
pub use config::{parse_config, SuiteConfig};
pub use io::{rank_table, read_metric_rows, recompute_metrics, MetricRow, NnShareRow, RankRow, RankTable};
pub use suite::{
    build_problem, cell_name, environment_seed, generate_best_known_tables, load_or_generate_best_known,
    parse_cell_name, run_seed, run_suite, RunFailure, RunRecord, SuiteResult,
};
