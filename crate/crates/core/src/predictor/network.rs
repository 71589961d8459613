//! Two-layer feed-forward network.
//!
//! The first layer maps each of the `n_t` input positions independently to
//! a 4-unit ReLU representation with shared weights. The representations are
//! concatenated and a linear layer maps them to a `d`-dimensional output.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;

use super::TrainingPair;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Width of the per-position hidden representation.
pub const HIDDEN: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    d: usize,
    n_t: usize,
    /// `HIDDEN x d`, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// `d x (HIDDEN * n_t)`, row-major.
    w2: Vec<f64>,
    b2: Vec<f64>,
}

struct Activations {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    output: Vec<f64>,
}

impl Network {
    pub fn zeros(d: usize, n_t: usize) -> Self {
        Self {
            d,
            n_t,
            w1: vec![0.0; HIDDEN * d],
            b1: vec![0.0; HIDDEN],
            w2: vec![0.0; d * HIDDEN * n_t],
            b2: vec![0.0; d],
        }
    }

    /// Weights uniform in `+-sqrt(1 / fan_in)`.
    pub fn new(d: usize, n_t: usize, rng: &mut RngStream) -> Self {
        let mut net = Self::zeros(d, n_t);
        let s1 = (1.0 / d as f64).sqrt();
        let s2 = (1.0 / (HIDDEN * n_t) as f64).sqrt();
        for w in net.w1.iter_mut().chain(net.b1.iter_mut()) {
            *w = rng.uniform(-s1, s1);
        }
        for w in net.w2.iter_mut().chain(net.b2.iter_mut()) {
            *w = rng.uniform(-s2, s2);
        }
        net
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn window(&self) -> usize {
        self.n_t
    }

    fn concat_width(&self) -> usize {
        HIDDEN * self.n_t
    }

    pub fn w1_mut(&mut self) -> &mut [f64] {
        &mut self.w1
    }

    pub fn b1_mut(&mut self) -> &mut [f64] {
        &mut self.b1
    }

    pub fn w2_mut(&mut self) -> &mut [f64] {
        &mut self.w2
    }

    pub fn b2_mut(&mut self) -> &mut [f64] {
        &mut self.b2
    }

    /// All parameters in snapshot order: W1, b1, W2, b2.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    fn check_inputs<X: AsRef<[f64]>>(&self, inputs: &[X]) {
        assert_eq!(inputs.len(), self.n_t, "expected {} input positions", self.n_t);
        for x in inputs {
            assert_eq!(x.as_ref().len(), self.d, "input dimension mismatch");
        }
    }

    fn activations<X: AsRef<[f64]>>(&self, inputs: &[X]) -> Activations {
        self.check_inputs(inputs);
        let mut pre = vec![0.0; self.concat_width()];
        for (slot, x) in inputs.iter().enumerate() {
            let x = x.as_ref();
            for u in 0..HIDDEN {
                let row = &self.w1[u * self.d..(u + 1) * self.d];
                pre[slot * HIDDEN + u] =
                    self.b1[u] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|&z| z.max(0.0)).collect();
        let width = self.concat_width();
        let output = (0..self.d)
            .map(|j| {
                let row = &self.w2[j * width..(j + 1) * width];
                self.b2[j] + row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>()
            })
            .collect();
        Activations { pre, hidden, output }
    }

    /// Prediction for `n_t` positions, oldest first. No output activation.
    pub fn forward<X: AsRef<[f64]>>(&self, inputs: &[X]) -> Vec<f64> {
        self.activations(inputs).output
    }

    fn sample_loss(output: &[f64], target: &[f64]) -> f64 {
        output
            .iter()
            .zip(target)
            .map(|(o, y)| (o - y) * (o - y))
            .sum::<f64>()
            / output.len() as f64
    }

    /// Mean over the batch of the per-sample mean squared error.
    pub fn loss(&self, batch: &[TrainingPair]) -> f64 {
        self.loss_of(&batch.iter().collect::<Vec<_>>())
    }

    fn loss_of(&self, batch: &[&TrainingPair]) -> f64 {
        batch
            .iter()
            .map(|p| Self::sample_loss(&self.forward(&p.inputs), &p.target))
            .sum::<f64>()
            / batch.len() as f64
    }

    /// Gradient of [`Network::loss`], returned in a network of the same
    /// shape.
    pub fn gradient(&self, batch: &[TrainingPair]) -> Network {
        self.gradient_of(&batch.iter().collect::<Vec<_>>())
    }

    fn gradient_of(&self, batch: &[&TrainingPair]) -> Network {
        let mut g = Network::zeros(self.d, self.n_t);
        let width = self.concat_width();
        let scale = 2.0 / (self.d as f64 * batch.len() as f64);
        for pair in batch {
            let act = self.activations(&pair.inputs);
            let delta: Vec<f64> = act
                .output
                .iter()
                .zip(pair.target.iter())
                .map(|(o, y)| scale * (o - y))
                .collect();
            let mut d_hidden = vec![0.0; width];
            for (j, dj) in delta.iter().enumerate() {
                g.b2[j] += dj;
                let row = j * width;
                for m in 0..width {
                    g.w2[row + m] += dj * act.hidden[m];
                    d_hidden[m] += self.w2[row + m] * dj;
                }
            }
            for (slot, x) in pair.inputs.iter().enumerate() {
                for u in 0..HIDDEN {
                    let m = slot * HIDDEN + u;
                    if act.pre[m] <= 0.0 {
                        continue;
                    }
                    let dz = d_hidden[m];
                    g.b1[u] += dz;
                    let row = &mut g.w1[u * self.d..(u + 1) * self.d];
                    for (w, v) in row.iter_mut().zip(x.iter()) {
                        *w += dz * v;
                    }
                }
            }
        }
        g
    }

    fn descend(&mut self, grad: &Network, learning_rate: f64) {
        for (w, g) in self.params_mut().zip(grad.params()) {
            *w -= learning_rate * g;
        }
    }

    /// Mini-batch gradient descent, reshuffling every epoch. Returns the mean
    /// pre-update batch loss of each epoch.
    pub fn train(
        &mut self,
        pairs: &[TrainingPair],
        epochs: usize,
        batch_size: usize,
        learning_rate: f64,
        rng: &mut RngStream,
    ) -> Vec<f64> {
        let batch_size = batch_size.max(1);
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        let mut history = Vec::with_capacity(epochs);
        for _ in 0..epochs {
            order.shuffle(rng);
            let mut total = 0.0;
            for chunk in order.chunks(batch_size) {
                let batch: Vec<&TrainingPair> = chunk.iter().map(|&i| &pairs[i]).collect();
                total += self.loss_of(&batch) * batch.len() as f64;
                let grad = self.gradient_of(&batch);
                self.descend(&grad, learning_rate);
            }
            history.push(total / pairs.len().max(1) as f64);
        }
        history
    }

    /// Text snapshot: header `d=<d>,n_t=<n_t>,hidden=4`, then W1 rows, b1,
    /// W2 rows and b2, one comma-separated line each.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<()> {
        let line = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        writeln!(out, "d={},n_t={},hidden={HIDDEN}", self.d, self.n_t)?;
        for row in self.w1.chunks(self.d) {
            writeln!(out, "{}", line(row))?;
        }
        writeln!(out, "{}", line(&self.b1))?;
        for row in self.w2.chunks(self.concat_width()) {
            writeln!(out, "{}", line(row))?;
        }
        writeln!(out, "{}", line(&self.b2))?;
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self> {
        let bad = |m: String| Error::Format {
            path: "<network snapshot>".into(),
            message: m,
        };
        let mut lines = input.lines();
        let header = lines.next().ok_or_else(|| bad("empty snapshot".into()))??;
        let mut d = None;
        let mut n_t = None;
        for field in header.split(',') {
            match field.split_once('=') {
                Some(("d", v)) => d = v.parse::<usize>().ok(),
                Some(("n_t", v)) => n_t = v.parse::<usize>().ok(),
                Some(("hidden", v)) if v == HIDDEN.to_string() => {}
                _ => return Err(bad(format!("bad header field `{field}`"))),
            }
        }
        let (d, n_t) = d.zip(n_t).ok_or_else(|| bad("header needs d and n_t".into()))?;
        let mut net = Network::zeros(d, n_t);
        let width = net.concat_width();
        let mut values = Vec::with_capacity(net.param_count());
        let expected_rows = [vec![d; HIDDEN], vec![HIDDEN], vec![width; d], vec![d]].concat();
        for (k, len) in expected_rows.into_iter().enumerate() {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {}", k + 2)))??;
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("bad number `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != len {
                return Err(bad(format!("row {} has {} values, expected {len}", k + 2, row.len())));
            }
            values.extend(row);
        }
        for (p, v) in net.params_mut().zip(values) {
            *p = v;
        }
        Ok(net)
    }
}
