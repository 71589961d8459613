//! Suite configuration: a JSON document whose every key is optional.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::engine::{ClockConfig, DeParams, MethodDefaults, MethodSpec};
use crate::error::{Error, Result};
use crate::metrics::MetricOptions;
use crate::predictor::PredictorConfig;
use crate::problems::{ExperimentKind, ExperimentSpec, Landscape, ReferenceBudget};
use crate::types::Bounds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub functions: Vec<Landscape>,
    /// Either experiment names (`"exp2"`) or full parameter objects.
    #[serde(deserialize_with = "experiments_from_json")]
    pub experiments: Vec<ExperimentSpec>,
    pub taus: Vec<f64>,
    pub methods: Vec<String>,
    pub runs: usize,
    pub num_changes: usize,
    pub d: usize,
    pub bounds: Bounds,
    pub de: DeParams,
    pub method_params: MethodDefaults,
    pub predictor: PredictorConfig,
    pub clock: ClockConfig,
    pub metrics: MetricOptions,
    pub reference: ReferenceBudget,
    pub master_seed: u64,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            functions: Landscape::ALL.to_vec(),
            experiments: ExperimentKind::ALL.into_iter().map(ExperimentSpec::new).collect(),
            taus: vec![1.0, 5.0, 10.0, 20.0],
            methods: MethodSpec::NAMES.iter().map(|s| s.to_string()).collect(),
            runs: 20,
            num_changes: 100,
            d: 30,
            bounds: Bounds::default(),
            de: DeParams::default(),
            method_params: MethodDefaults::default(),
            predictor: PredictorConfig::default(),
            clock: ClockConfig::default(),
            metrics: MetricOptions::default(),
            reference: ReferenceBudget::default(),
            master_seed: 0,
            workers: None,
        }
    }
}

fn experiments_from_json<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<ExperimentSpec>, D::Error> {
    let raw = Vec::<serde_json::Value>::deserialize(de)?;
    raw.into_iter()
        .map(|v| match v {
            serde_json::Value::String(name) => name
                .parse::<ExperimentKind>()
                .map(ExperimentSpec::new)
                .map_err(|e| D::Error::custom(format!("experiments: {e}"))),
            other => {
                let kind = other
                    .get("experiment")
                    .and_then(|k| k.as_str())
                    .ok_or_else(|| D::Error::custom("experiments: object entries need an `experiment` name"))?
                    .parse::<ExperimentKind>()
                    .map_err(|e| D::Error::custom(format!("experiments: {e}")))?;
                // fill omitted fields with this experiment's defaults
                let mut full = serde_json::to_value(ExperimentSpec::new(kind)).map_err(D::Error::custom)?;
                if let (Some(base), Some(given)) = (full.as_object_mut(), other.as_object()) {
                    for (k, v) in given {
                        base.insert(k.clone(), v.clone());
                    }
                }
                ExperimentSpec::deserialize(full).map_err(|e| D::Error::custom(format!("experiments: {e}")))
            }
        })
        .collect()
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SuiteConfig> {
    let config: SuiteConfig = if text.trim().is_empty() {
        SuiteConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
    };
    config.validate()?;
    Ok(config)
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let nonzero = [
            ("runs", self.runs),
            ("num_changes", self.num_changes),
            ("d", self.d),
        ];
        for (key, v) in nonzero {
            if v == 0 {
                return Err(Error::Config(format!("{key} must be at least 1")));
            }
        }
        for (key, empty) in [
            ("functions", self.functions.is_empty()),
            ("experiments", self.experiments.is_empty()),
            ("taus", self.taus.is_empty()),
            ("methods", self.methods.is_empty()),
        ] {
            if empty {
                return Err(Error::Config(format!("{key} must not be empty")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        unique("functions", self.functions.iter())?;
        unique("experiments", self.experiments.iter().map(|e| e.experiment))?;
        unique("methods", self.methods.iter())?;
        unique("taus", self.taus.iter().map(|t| t.to_bits()))?;
        for &tau in &self.taus {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Config(format!("taus must be positive, got {tau}")));
            }
        }
        self.de.validate()?;
        self.method_params.validate(self.de.np)?;
        self.predictor.validate()?;
        self.clock.validate()?;
        self.metrics.validate()?;
        for e in &self.experiments {
            e.validate(self.d)?;
        }
        for name in &self.methods {
            MethodSpec::from_name(name, &self.method_params, 1.0)?.validate(self.de.np)?;
        }
        if self.reference.restarts == 0 {
            return Err(Error::Config("reference.restarts must be at least 1".into()));
        }
        Ok(())
    }
}

fn unique<T: Ord + std::fmt::Debug>(key: &str, items: impl Iterator<Item = T>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for item in items {
        if let Some(dup) = seen.replace(item) {
            return Err(Error::Config(format!("{key}: duplicate entry {dup:?}")));
        }
    }
    Ok(())
}
