//! Reaction strategies, diversity mechanisms and the named method variants.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::de::{validate_f_range, DeParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiversityMechanism {
    None,
    /// Offspring competes with its `n` nearest members.
    Crowding { n: usize },
    /// `rate` worst members replaced by random positions on each detected
    /// change.
    RandomImmigrants { rate: usize },
    /// Whole population replaced on each detected change.
    Restart,
    /// Random insertions plus enlarged F and CR for a number of generations.
    HyperMutation {
        rate: usize,
        f_range: (f64, f64),
        cr: f64,
        duration_generations: usize,
    },
}

impl DiversityMechanism {
    pub fn short_name(&self) -> &'static str {
        match self {
            DiversityMechanism::None => "No",
            DiversityMechanism::Crowding { .. } => "CwN",
            DiversityMechanism::RandomImmigrants { .. } => "RI",
            DiversityMechanism::Restart => "Rst",
            DiversityMechanism::HyperMutation { .. } => "HMu",
        }
    }

    /// Number of random insertions on a detected change for a population of
    /// `np`.
    pub fn random_insertions(&self, np: usize) -> usize {
        match *self {
            DiversityMechanism::RandomImmigrants { rate } => rate.min(np),
            DiversityMechanism::HyperMutation { rate, .. } => rate.min(np),
            DiversityMechanism::Restart => np,
            DiversityMechanism::None | DiversityMechanism::Crowding { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactionStrategy {
    /// Re-evaluate the whole population.
    NoNN,
    /// Replace the `n_p` worst members with predicted neighbors, then
    /// re-evaluate.
    NN { n_p: usize },
}

impl ReactionStrategy {
    pub fn short_name(&self) -> &'static str {
        match self {
            ReactionStrategy::NoNN => "noNN",
            ReactionStrategy::NN { .. } => "NN",
        }
    }
}

/// Remaining generations of enlarged DE parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HyperState {
    pub generations_remaining: usize,
}

impl HyperState {
    pub fn is_active(&self) -> bool {
        self.generations_remaining > 0
    }

    pub fn activate(&mut self, generations: usize) {
        self.generations_remaining = generations;
    }

    /// Called once per completed generation.
    pub fn tick(&mut self) {
        self.generations_remaining = self.generations_remaining.saturating_sub(1);
    }
}

/// Effective `(f_range, cr)`: the hyper-mutation values while active, the
/// base values otherwise.
pub fn hyper_params_current(
    params: &DeParams,
    diversity: &DiversityMechanism,
    hyper: &HyperState,
) -> ((f64, f64), f64) {
    match diversity {
        DiversityMechanism::HyperMutation { f_range, cr, .. } if hyper.is_active() => (*f_range, *cr),
        _ => (params.f_range, params.cr),
    }
}

/// Shared knobs used to instantiate the named methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodDefaults {
    /// Neighbors considered by crowding.
    pub cwn_n: usize,
    /// Random insertions for RI and HMu without the predictor.
    pub rate_no_nn: usize,
    /// Random insertions for RI and HMu with the predictor.
    pub rate_nn: usize,
    pub hyper_f_range: (f64, f64),
    pub hyper_cr: f64,
    /// Hyper-mutation lasts `round(hyper_generations_per_tau * tau)`
    /// generations.
    pub hyper_generations_per_tau: f64,
    /// Predicted neighbors inserted per change.
    pub n_p: usize,
}

impl Default for MethodDefaults {
    fn default() -> Self {
        Self {
            cwn_n: 5,
            rate_no_nn: 7,
            rate_nn: 2,
            hyper_f_range: (0.6, 0.8),
            hyper_cr: 0.7,
            hyper_generations_per_tau: 6.0,
            n_p: 5,
        }
    }
}

impl MethodDefaults {
    pub fn validate(&self, np: usize) -> Result<()> {
        if self.cwn_n == 0 {
            return Err(Error::Config("methods.cwn_n must be at least 1".into()));
        }
        if self.rate_no_nn > np || self.rate_nn > np {
            return Err(Error::Config(format!(
                "methods.rate_no_nn and methods.rate_nn must not exceed de.np = {np}"
            )));
        }
        if self.n_p >= np {
            return Err(Error::Config(format!(
                "methods.n_p must be below de.np = {np}, got {}",
                self.n_p
            )));
        }
        if !(0.0..=1.0).contains(&self.hyper_cr) {
            return Err(Error::Config(format!(
                "methods.hyper_cr must be in [0, 1], got {}",
                self.hyper_cr
            )));
        }
        if !(self.hyper_generations_per_tau >= 0.0) {
            return Err(Error::Config(
                "methods.hyper_generations_per_tau must be non-negative".into(),
            ));
        }
        validate_f_range("methods.hyper_f_range", self.hyper_f_range)
    }
}

/// A reaction strategy paired with a diversity mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub strategy: ReactionStrategy,
    pub diversity: DiversityMechanism,
}

impl MethodSpec {
    /// The ten method names, in the order they are usually tabulated.
    pub const NAMES: [&'static str; 10] = [
        "noNN_RI", "NN_RI", "noNN_HMu", "NN_HMu", "noNN_No", "NN_No", "noNN_CwN", "NN_CwN",
        "noNN_Rst", "NN_Rst",
    ];

    /// Builds a named method such as `NN_RI` for change period `tau`.
    pub fn from_name(name: &str, defaults: &MethodDefaults, tau: f64) -> Result<Self> {
        let (reaction, mechanism) = name
            .split_once('_')
            .ok_or_else(|| Error::Config(format!("unknown method `{name}`")))?;
        let strategy = match reaction {
            "noNN" => ReactionStrategy::NoNN,
            "NN" => ReactionStrategy::NN { n_p: defaults.n_p },
            _ => return Err(Error::Config(format!("unknown method `{name}`"))),
        };
        let rate = match strategy {
            ReactionStrategy::NoNN => defaults.rate_no_nn,
            ReactionStrategy::NN { .. } => defaults.rate_nn,
        };
        let diversity = match mechanism {
            "No" => DiversityMechanism::None,
            "CwN" => DiversityMechanism::Crowding { n: defaults.cwn_n },
            "RI" => DiversityMechanism::RandomImmigrants { rate },
            "Rst" => DiversityMechanism::Restart,
            "HMu" => DiversityMechanism::HyperMutation {
                rate,
                f_range: defaults.hyper_f_range,
                cr: defaults.hyper_cr,
                duration_generations: (defaults.hyper_generations_per_tau * tau).round() as usize,
            },
            _ => return Err(Error::Config(format!("unknown method `{name}`"))),
        };
        Ok(Self { strategy, diversity })
    }

    pub fn name(&self) -> String {
        format!("{}_{}", self.strategy.short_name(), self.diversity.short_name())
    }

    pub fn validate(&self, np: usize) -> Result<()> {
        if let ReactionStrategy::NN { n_p } = self.strategy {
            if n_p >= np {
                return Err(Error::Config(format!("n_p = {n_p} must be below NP = {np}")));
            }
        }
        match self.diversity {
            DiversityMechanism::Crowding { n } if n == 0 => {
                Err(Error::Config("crowding needs at least one neighbor".into()))
            }
            DiversityMechanism::RandomImmigrants { rate } | DiversityMechanism::HyperMutation { rate, .. }
                if rate > np =>
            {
                Err(Error::Config(format!("replacement rate {rate} exceeds NP = {np}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
