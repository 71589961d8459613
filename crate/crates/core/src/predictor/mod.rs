//! Optimum-position prediction from the best solutions of past periods.
//!
//! After every detected change the k best distinct positions of the period
//! that just ended are stored. Each window of `n_t` consecutive periods plus
//! the following one yields training pairs: one input position per past
//! period (any of its k best) and the rank-1 best of the following period as
//! target. A random subset of the `k^n_t` combinations is kept per window.
//! Once `min_batch` pairs exist the network is trained, and its prediction
//! for the next period, plus noisy neighbors, is injected into the
//! population.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamKind};
use crate::types::{clamp_in_place, compare_feasibility, Bounds, Individual, Position};

mod network;

pub use network::{Network, HIDDEN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictorConfig {
    /// Best positions kept per period.
    pub k: usize,
    /// Past periods fed to the network.
    pub n_t: usize,
    pub epochs: usize,
    pub batch_size: usize,
    /// Pairs required before the first training.
    pub min_batch: usize,
    /// Neighbor noise, as a fraction of the domain width.
    pub sigma: f64,
    pub learning_rate: f64,
    /// Pairs drawn per window out of the `k^n_t` combinations.
    pub max_new_per_time: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            k: 3,
            n_t: 5,
            epochs: 4,
            batch_size: 4,
            min_batch: 20,
            sigma: 0.01,
            learning_rate: 0.01,
            max_new_per_time: 32,
        }
    }
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("predictor.k", self.k),
            ("predictor.n_t", self.n_t),
            ("predictor.batch_size", self.batch_size),
            ("predictor.max_new_per_time", self.max_new_per_time),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{key} must be at least 1")));
            }
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Config(format!(
                "predictor.sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "predictor.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// The k feasibility-best distinct positions of every observed period.
#[derive(Debug, Clone)]
pub struct TimeBestStore {
    k: usize,
    entries: BTreeMap<usize, Vec<Individual>>,
}

impl TimeBestStore {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            entries: BTreeMap::new(),
        }
    }

    /// Merges `candidates` into period `t`, keeping the k feasibility-best
    /// pairwise distinct positions in rank order.
    pub fn record_time_best(&mut self, t: usize, candidates: &[Individual]) {
        let slot = self.entries.entry(t).or_default();
        let mut pool: Vec<Individual> = slot.drain(..).chain(candidates.iter().cloned()).collect();
        pool.sort_by(|a, b| compare_feasibility(&a.eval, &b.eval));
        for ind in pool {
            if slot.len() == self.k {
                break;
            }
            if slot.iter().all(|kept| kept.position != ind.position) {
                slot.push(ind);
            }
        }
    }

    pub fn get(&self, t: usize) -> Option<&[Individual]> {
        self.entries.get(&t).map(Vec::as_slice)
    }

    pub fn times(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn stored_positions(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Rank-1 bests of the `n` most recent periods, oldest first.
    pub fn latest_bests(&self, n: usize) -> Option<Vec<&Position>> {
        if self.entries.len() < n {
            return None;
        }
        let bests: Vec<&Position> = self
            .entries
            .values()
            .rev()
            .take(n)
            .filter_map(|v| v.first().map(|i| &i.position))
            .collect();
        (bests.len() == n).then(|| bests.into_iter().rev().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair {
    /// One position per past period, oldest first.
    pub inputs: Vec<Position>,
    pub target: Position,
}

/// Pairs for the window whose target period is `target_t`, or an empty
/// vector when any of the `n_t + 1` periods is missing.
pub fn build_window_samples(
    store: &TimeBestStore,
    target_t: usize,
    n_t: usize,
    max_new: usize,
    rng: &mut RngStream,
) -> Vec<TrainingPair> {
    if target_t < n_t {
        return Vec::new();
    }
    let Some(target) = store.get(target_t).and_then(|v| v.first()) else {
        return Vec::new();
    };
    let slots: Option<Vec<&[Individual]>> = (target_t - n_t..target_t)
        .map(|t| store.get(t).filter(|v| !v.is_empty()))
        .collect();
    let Some(slots) = slots else {
        return Vec::new();
    };
    let total: usize = slots.iter().map(|s| s.len()).product();
    let amount = max_new.min(total);
    index::sample(rng, total, amount)
        .into_iter()
        .map(|mut code| {
            // mixed-radix decode, first slot least significant
            let inputs = slots
                .iter()
                .map(|s| {
                    let pick = code % s.len();
                    code /= s.len();
                    s[pick].position.clone()
                })
                .collect();
            TrainingPair {
                inputs,
                target: target.position.clone(),
            }
        })
        .collect()
}

/// Pairs for every complete window in the store.
pub fn build_samples(
    store: &TimeBestStore,
    n_t: usize,
    max_new_per_time: usize,
    rng: &mut RngStream,
) -> Vec<TrainingPair> {
    let times: Vec<usize> = store.times().collect();
    times
        .into_iter()
        .flat_map(|t| build_window_samples(store, t, n_t, max_new_per_time, rng))
        .collect()
}

/// Affine map between the box and `[-1, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Normalizer {
    bounds: Bounds,
}

impl Normalizer {
    pub fn new(bounds: Bounds) -> Self {
        Self { bounds }
    }

    pub fn to_unit(&self, x: &[f64]) -> Position {
        let (l, w) = (self.bounds.lower(), self.bounds.width());
        x.iter().map(|v| 2.0 * (v - l) / w - 1.0).collect::<Vec<_>>().into()
    }

    pub fn from_unit(&self, z: &[f64]) -> Position {
        let (l, w) = (self.bounds.lower(), self.bounds.width());
        z.iter().map(|v| l + (v + 1.0) * 0.5 * w).collect::<Vec<_>>().into()
    }

    pub fn pair_to_unit(&self, pair: &TrainingPair) -> TrainingPair {
        TrainingPair {
            inputs: pair.inputs.iter().map(|x| self.to_unit(x)).collect(),
            target: self.to_unit(&pair.target),
        }
    }
}

/// Trains on raw-coordinate pairs after normalizing them. Refuses to train
/// below `min_batch` pairs.
pub fn train(
    net: &mut Network,
    pairs: &[TrainingPair],
    config: &PredictorConfig,
    bounds: Bounds,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if pairs.is_empty() || pairs.len() < config.min_batch {
        return Err(Error::NotReady("fewer training pairs than min_batch"));
    }
    let norm = Normalizer::new(bounds);
    let unit: Vec<TrainingPair> = pairs.iter().map(|p| norm.pair_to_unit(p)).collect();
    Ok(net.train(&unit, config.epochs, config.batch_size, config.learning_rate, rng))
}

/// Network prediction from the `n_t` latest rank-1 bests, followed by
/// `n_p - 1` Gaussian neighbors with standard deviation
/// `sigma * (U - L)` per coordinate. All outputs are clamped to the box.
pub fn predict_neighbors(
    net: &Network,
    store: &TimeBestStore,
    n_p: usize,
    sigma: f64,
    bounds: Bounds,
    rng: &mut RngStream,
) -> Result<Vec<Position>> {
    let history = store
        .latest_bests(net.window())
        .ok_or(Error::NotReady("not enough past periods for a prediction"))?;
    let norm = Normalizer::new(bounds);
    let unit: Vec<Position> = history.iter().map(|x| norm.to_unit(x)).collect();
    let mut base = norm.from_unit(&net.forward(&unit));
    clamp_in_place(&mut base, bounds);
    let scale = sigma * bounds.width();
    let mut out = Vec::with_capacity(n_p);
    if n_p > 0 {
        out.push(base.clone());
    }
    for _ in 1..n_p {
        let mut p = base.clone();
        for x in p.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *x += scale * z;
        }
        clamp_in_place(&mut p, bounds);
        out.push(p);
    }
    Ok(out)
}

/// Per-run predictor state: store, accumulated pairs and network.
#[derive(Debug, Clone)]
pub struct Predictor {
    config: PredictorConfig,
    bounds: Bounds,
    store: TimeBestStore,
    pairs: Vec<TrainingPair>,
    sampled_targets: BTreeSet<usize>,
    network: Network,
    trained: bool,
    rng: RngStream,
    last_losses: Vec<f64>,
}

impl Predictor {
    pub fn new(config: PredictorConfig, d: usize, bounds: Bounds, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = RngStream::for_kind(seed, StreamKind::Predictor);
        let network = Network::new(d, config.n_t, &mut rng);
        Ok(Self {
            store: TimeBestStore::new(config.k),
            config,
            bounds,
            pairs: Vec::new(),
            sampled_targets: BTreeSet::new(),
            network,
            trained: false,
            rng,
            last_losses: Vec::new(),
        })
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    pub fn store(&self) -> &TimeBestStore {
        &self.store
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn sample_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn last_losses(&self) -> &[f64] {
        &self.last_losses
    }

    pub fn record_time_best(&mut self, t: usize, candidates: &[Individual]) {
        self.store.record_time_best(t, candidates);
    }

    /// Builds pairs for windows completed since the last call. Returns the
    /// number of new pairs.
    pub fn collect_samples(&mut self) -> usize {
        let pending: Vec<usize> = self
            .store
            .times()
            .filter(|t| !self.sampled_targets.contains(t))
            .collect();
        let before = self.pairs.len();
        for t in pending {
            let fresh = build_window_samples(
                &self.store,
                t,
                self.config.n_t,
                self.config.max_new_per_time,
                &mut self.rng,
            );
            if !fresh.is_empty() {
                self.sampled_targets.insert(t);
                self.pairs.extend(fresh);
            }
        }
        self.pairs.len() - before
    }

    pub fn ready_to_train(&self) -> bool {
        !self.pairs.is_empty() && self.pairs.len() >= self.config.min_batch
    }

    /// One training call over every retained pair, continuing from the
    /// current weights.
    pub fn train(&mut self) -> Result<Vec<f64>> {
        let losses = train(&mut self.network, &self.pairs, &self.config, self.bounds, &mut self.rng)?;
        self.trained = true;
        self.last_losses = losses.clone();
        Ok(losses)
    }

    pub fn predict_neighbors(&mut self, n_p: usize) -> Result<Vec<Position>> {
        if !self.trained {
            return Err(Error::NotReady("network has not been trained"));
        }
        predict_neighbors(&self.network, &self.store, n_p, self.config.sigma, self.bounds, &mut self.rng)
    }
}
