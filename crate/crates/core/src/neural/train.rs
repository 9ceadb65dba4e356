use ndarray::{s, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, Model, Sample};
use crate::{Error, Real, Result};

/// Training recipe. Defaults follow the reference LSTM recipe: 500 epochs,
/// batch 128, learning rate 0.001, ADAM, MSE, 40 dB training SNR, 16000
/// training and 2000 test symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Sequences per batch for recurrent models, rows per batch for MLPs.
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Only `"mse"` is supported.
    pub loss: String,
    pub training_snr_db: f64,
    pub training_symbols: usize,
    pub testing_symbols: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            batch_size: 128,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            loss: "mse".into(),
            training_snr_db: 40.0,
            training_symbols: 16_000,
            testing_symbols: 2_000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch size must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.epsilon <= 0.0 {
            return Err(Error::Config("ADAM moments must lie in [0, 1) with epsilon > 0".into()));
        }
        if self.loss != "mse" {
            return Err(Error::Config(format!("unsupported loss `{}`", self.loss)));
        }
        Ok(())
    }

    /// Training frames needed for `training_symbols` at `symbols_per_frame`.
    pub fn training_frames(&self, symbols_per_frame: usize) -> usize {
        self.training_symbols.div_ceil(symbols_per_frame)
    }
}

fn stack_rows<T: Real>(parts: &[&Array2<T>]) -> Array2<T> {
    let cols = parts[0].ncols();
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = Array2::zeros((rows, cols));
    let mut r = 0;
    for p in parts {
        out.slice_mut(s![r..r + p.nrows(), ..]).assign(*p);
        r += p.nrows();
    }
    out
}

/// Mean-squared error of `model` on `batch` and its parameter gradient.
///
/// Recurrent models need equal-length sequences in a batch; MLPs treat every
/// row of every sample as an independent example.
pub fn loss_and_grad<T: Real>(model: &Model<T>, batch: &[&Sample<T>]) -> Result<(T, Model<T>)> {
    if batch.is_empty() {
        return Err(Error::Shape("empty batch".into()));
    }
    let mut grad = model.zeros_like();
    match model {
        Model::Mlp(net) => {
            let x = stack_rows(&batch.iter().map(|s| &s.inputs).collect::<Vec<_>>());
            let y = stack_rows(&batch.iter().map(|s| &s.targets).collect::<Vec<_>>());
            if x.ncols() != net.input_dim() || y.ncols() != net.output_dim() {
                return Err(Error::Shape("batch width differs from the MLP".into()));
            }
            let (out, cache) = net.forward_batch(x.view());
            let n = T::from_usize(out.len()).unwrap();
            let diff = out - &y;
            let loss = diff.iter().map(|v| *v * *v).sum::<T>() / n;
            let d = diff.mapv(|v| v * T::lit(2.0) / n);
            let Model::Mlp(g) = &mut grad else { unreachable!() };
            net.backward_batch(&cache, d, g);
            Ok((loss, grad))
        }
        Model::Lstm(net) => {
            let steps = batch[0].steps();
            if batch.iter().any(|s| s.steps() != steps) || steps == 0 {
                return Err(Error::Shape("recurrent batch needs equal, non-empty sequences".into()));
            }
            if batch[0].inputs.ncols() != net.input_size() || batch[0].targets.ncols() != net.output_size() {
                return Err(Error::Shape("batch width differs from the LSTM".into()));
            }
            let b = batch.len();
            let gather = |t: usize, targets: bool| {
                let mut m = Array2::zeros((b, if targets { net.output_size() } else { net.input_size() }));
                for (r, s) in batch.iter().enumerate() {
                    let src = if targets { &s.targets } else { &s.inputs };
                    m.row_mut(r).assign(&src.row(t));
                }
                m
            };
            let xs: Vec<Array2<T>> = (0..steps).map(|t| gather(t, false)).collect();
            let (ys, cache) = net.forward_batch(&xs);
            let n = T::from_usize(steps * b * net.output_size()).unwrap();
            let mut loss = T::zero();
            let d: Vec<Array2<T>> = ys
                .into_iter()
                .enumerate()
                .map(|(t, y)| {
                    let diff = y - &gather(t, true);
                    loss += diff.iter().map(|v| *v * *v).sum::<T>();
                    diff.mapv(|v| v * T::lit(2.0) / n)
                })
                .collect();
            let Model::Lstm(g) = &mut grad else { unreachable!() };
            net.backward_batch(&cache, &d, g);
            Ok((loss / n, grad))
        }
    }
}

struct Adam<T> {
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    t: i32,
}

impl<T: Real> Adam<T> {
    fn new(model: &Model<T>) -> Self {
        let zeros: Vec<Vec<T>> = model.tensors().iter().map(|t| vec![T::zero(); t.len()]).collect();
        Self {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    fn update(&mut self, model: &mut Model<T>, grad: &Model<T>, cfg: &TrainConfig) {
        self.t += 1;
        let (b1, b2) = (T::lit(cfg.beta1), T::lit(cfg.beta2));
        let lr = T::lit(cfg.learning_rate);
        let eps = T::lit(cfg.epsilon);
        let c1 = T::one() - b1.powi(self.t);
        let c2 = T::one() - b2.powi(self.t);
        for (((p, g), m), v) in model
            .tensors_mut()
            .into_iter()
            .zip(grad.tensors())
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            for j in 0..p.len() {
                m[j] = b1 * m[j] + (T::one() - b1) * g[j];
                v[j] = b2 * v[j] + (T::one() - b2) * g[j] * g[j];
                let mh = m[j] / c1;
                let vh = v[j] / c2;
                p[j] -= lr * mh / (vh.sqrt() + eps);
            }
        }
    }
}

/// Trains `model` in place; returns the mean batch loss of each epoch.
pub fn train<T: Real>(model: &mut Model<T>, data: &Dataset<T>, cfg: &TrainConfig) -> Result<Vec<f64>> {
    train_with(model, data, cfg, |_, _| {})
}

/// [`train`] with a per-epoch callback `(epoch, loss)`.
pub fn train_with<T: Real>(
    model: &mut Model<T>,
    data: &Dataset<T>,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Shape("training set is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(model);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    // MLP batches are counted in rows, so group whole samples until the row budget is met
    let rows_per_sample = data.samples[0].steps().max(1);
    let samples_per_batch = match model {
        Model::Mlp(_) => cfg.batch_size.div_ceil(rows_per_sample).max(1),
        Model::Lstm(_) => cfg.batch_size,
    };

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0usize;
        for (bi, chunk) in order.chunks(samples_per_batch).enumerate() {
            let batch: Vec<&Sample<T>> = chunk.iter().map(|&i| &data.samples[i]).collect();
            let (loss, grad) = loss_and_grad(model, &batch)?;
            let loss = loss.to_f64_lossy();
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: bi, loss });
            }
            adam.update(model, &grad, cfg);
            total += loss;
            batches += 1;
        }
        let mean = total / batches as f64;
        history.push(mean);
        on_epoch(epoch, mean);
    }
    Ok(history)
}
