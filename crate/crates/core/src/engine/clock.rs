//! Budget clock deciding when the environment changes.
//!
//! In virtual mode every objective evaluation and every network call is
//! charged a configured cost, tracked in integer nanoseconds so charges add
//! up exactly. In wall mode the clock reads real elapsed time.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluations per second of budget under the default virtual costs.
pub const DEFAULT_EVALS_PER_SECOND: f64 = 2150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockMode {
    Wall,
    Virtual,
}

impl std::str::FromStr for ClockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wall" => Ok(ClockMode::Wall),
            "virtual" => Ok(ClockMode::Virtual),
            other => Err(Error::Config(format!(
                "clock mode must be `wall` or `virtual`, got `{other}`"
            ))),
        }
    }
}

/// Clock mode and virtual costs in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClockConfig {
    pub mode: ClockMode,
    pub cost_eval: f64,
    pub cost_nn_train: f64,
    pub cost_nn_predict: f64,
}

impl Default for ClockConfig {
    fn default() -> Self {
        Self {
            mode: ClockMode::Virtual,
            cost_eval: 1.0 / DEFAULT_EVALS_PER_SECOND,
            cost_nn_train: 0.1,
            cost_nn_predict: 0.01,
        }
    }
}

impl ClockConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cost_eval > 0.0 && self.cost_eval.is_finite()) {
            return Err(Error::Config(format!(
                "clock.cost_eval must be positive, got {}",
                self.cost_eval
            )));
        }
        for (key, v) in [
            ("clock.cost_nn_train", self.cost_nn_train),
            ("clock.cost_nn_predict", self.cost_nn_predict),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NnCharge {
    Train,
    Predict,
}

fn to_nanos(seconds: f64) -> u64 {
    (seconds * 1e9).round() as u64
}

#[derive(Debug, Clone)]
pub struct Clock {
    mode: ClockMode,
    tau: f64,
    tau_ns: u64,
    cost_eval_ns: u64,
    cost_train_ns: u64,
    cost_predict_ns: u64,
    virtual_ns: u64,
    nn_ns: u64,
    start: Instant,
}

impl Clock {
    pub fn new(config: &ClockConfig, tau: f64) -> Result<Self> {
        config.validate()?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        Ok(Self {
            mode: config.mode,
            tau,
            tau_ns: to_nanos(tau).max(1),
            cost_eval_ns: to_nanos(config.cost_eval),
            cost_train_ns: to_nanos(config.cost_nn_train),
            cost_predict_ns: to_nanos(config.cost_nn_predict),
            virtual_ns: 0,
            nn_ns: 0,
            start: Instant::now(),
        })
    }

    pub fn mode(&self) -> ClockMode {
        self.mode
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn elapsed_ns(&self) -> u64 {
        match self.mode {
            ClockMode::Virtual => self.virtual_ns,
            ClockMode::Wall => self.start.elapsed().as_nanos() as u64,
        }
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.elapsed_ns() as f64 * 1e-9
    }

    /// Current period: `floor(elapsed / tau)`.
    pub fn time_index(&self) -> usize {
        (self.elapsed_ns() / self.tau_ns) as usize
    }

    pub fn charge_evaluations(&mut self, n: u64) {
        if self.mode == ClockMode::Virtual {
            self.virtual_ns += n * self.cost_eval_ns;
        }
    }

    /// Runs a network step, charging its virtual cost or measuring its real
    /// duration.
    pub fn time_nn<T>(&mut self, charge: NnCharge, f: impl FnOnce() -> T) -> T {
        match self.mode {
            ClockMode::Virtual => {
                let cost = match charge {
                    NnCharge::Train => self.cost_train_ns,
                    NnCharge::Predict => self.cost_predict_ns,
                };
                self.virtual_ns += cost;
                self.nn_ns += cost;
                f()
            }
            ClockMode::Wall => {
                let started = Instant::now();
                let out = f();
                self.nn_ns += started.elapsed().as_nanos() as u64;
                out
            }
        }
    }

    pub fn nn_seconds(&self) -> f64 {
        Duration::from_nanos(self.nn_ns).as_secs_f64()
    }

    #[cfg(test)]
    fn nn_nanos(&self) -> u64 {
        self.nn_ns
    }

    #[cfg(test)]
    fn elapsed_nanos(&self) -> u64 {
        self.elapsed_ns()
    }
}
