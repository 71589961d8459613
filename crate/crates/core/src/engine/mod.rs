//! The evolution loop: DE operators, change detection and reaction,
//! diversity mechanisms and the budget clock.

pub mod clock;
pub mod de;
pub mod method;
pub mod reaction;
pub mod run;

pub use clock::{Clock, ClockConfig, ClockMode, NnCharge, DEFAULT_EVALS_PER_SECOND};
pub use de::{
    crossover_binomial, crowding_target, de_generation, mutant_rand_1, nearest_indices, optimize_static,
    DeParams, Evaluate, GenerationSettings, StaticRun,
};
pub use method::{
    hyper_params_current, DiversityMechanism, HyperState, MethodDefaults, MethodSpec, ReactionStrategy,
};
pub use reaction::{detect_change, react, ReactionOutcome};
pub use run::{run_dynamic, RunConfig, RunTrace, TraceRow};
