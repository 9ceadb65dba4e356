use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::training_log_csv;
use super::SimConfig;
use crate::estimators::{EstimatorConfig, EstimatorKind};
use crate::neural::{
    gen_dataset, load_model, save_model, train_with, Dataset, DatasetSpec, LstmParams, MlpParams, Model, ModelMeta,
    TrainedModel,
};
use crate::{Error, Result};

/// Fresh network for a learned estimator.
///
/// LSTM-DPA-TA: `2 K_on` inputs, `hidden` LSTM units, affine readout to
/// `2 K_d`. LSTM-DNN-DPA: `2 (K_on + K_p)` inputs, 128 LSTM units, a 40-unit
/// ReLU layer, then `2 K_d`. STA-DNN and TRFI-DNN: `2 K_on` in and out with
/// `dnn_hidden` ReLU layers.
pub fn default_model(kind: EstimatorKind, cfg: &SimConfig, seed: u64) -> Result<Model<f64>> {
    let layout = cfg.frame_spec().layout;
    let (on, d, p) = (layout.n_active(), layout.n_data(), layout.n_pilots());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        EstimatorKind::LstmDpaTa => Ok(Model::Lstm(LstmParams::new(
            2 * on,
            cfg.model.lstm_hidden,
            &[],
            2 * d,
            &mut rng,
        )?)),
        EstimatorKind::LstmDnnDpa => Ok(Model::Lstm(LstmParams::new(2 * (on + p), 128, &[40], 2 * d, &mut rng)?)),
        EstimatorKind::StaDnn | EstimatorKind::TrfiDnn => {
            let mut sizes = vec![2 * on];
            sizes.extend(&cfg.model.dnn_hidden);
            sizes.push(2 * on);
            Ok(Model::Mlp(MlpParams::new(&sizes, &mut rng)?))
        }
        other => Err(Error::Unsupported(format!("{other} has no trainable model"))),
    }
}

#[derive(Debug, Clone)]
pub struct TrainRequest {
    pub kind: EstimatorKind,
    /// Training frames; defaults to the configured symbol count over `I`.
    pub frames: Option<usize>,
    /// Dataset file to read instead of simulating.
    pub dataset: Option<PathBuf>,
    /// Model to continue training from.
    pub resume: Option<PathBuf>,
    /// Where to write the model; nothing is written when absent.
    pub out: Option<PathBuf>,
    /// Where to write the per-epoch loss CSV.
    pub log: Option<PathBuf>,
    pub estimator: EstimatorConfig,
}

impl TrainRequest {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            frames: None,
            dataset: None,
            resume: None,
            out: None,
            log: None,
            estimator: EstimatorConfig::default(),
        }
    }
}

/// Training set for `kind` as configured by `cfg.train`.
pub fn training_dataset(cfg: &SimConfig, kind: EstimatorKind, frames: Option<usize>) -> Result<Dataset<f64>> {
    let frames = frames.unwrap_or_else(|| cfg.train.training_frames(cfg.frame.symbols));
    gen_dataset(&DatasetSpec {
        kind,
        frames,
        snr_db: cfg.train.training_snr_db,
        scenario: cfg.scenario()?,
        estimator: EstimatorConfig::default(),
        seed: cfg.train.seed,
    })
}

/// Builds or loads the dataset, trains, and writes the model and loss log.
pub fn train_cmd(
    cfg: &SimConfig,
    req: &TrainRequest,
    on_epoch: impl FnMut(usize, f64),
) -> Result<(TrainedModel<f64>, Vec<f64>)> {
    cfg.validate()?;
    let data = match &req.dataset {
        Some(p) => Dataset::load(&cfg.resolve(p))?,
        None => {
            let frames = req.frames.unwrap_or_else(|| cfg.train.training_frames(cfg.frame.symbols));
            gen_dataset(&DatasetSpec {
                kind: req.kind,
                frames,
                snr_db: cfg.train.training_snr_db,
                scenario: cfg.scenario()?,
                estimator: req.estimator.clone(),
                seed: cfg.train.seed,
            })?
        }
    };
    let (mut model, prior_epochs) = match &req.resume {
        Some(p) => {
            let tm = load_model::<f64>(&cfg.resolve(p))?;
            (tm.model, tm.meta.epochs)
        }
        None => (default_model(req.kind, cfg, cfg.train.seed)?, 0),
    };
    if model.input_dim() != data.input_dim() || model.output_dim() != data.output_dim() {
        return Err(Error::ModelShape(format!(
            "model maps {} -> {}, dataset has {} -> {}",
            model.input_dim(),
            model.output_dim(),
            data.input_dim(),
            data.output_dim()
        )));
    }
    let history = train_with(&mut model, &data, &cfg.train, on_epoch)?;
    let tm = TrainedModel {
        model,
        meta: ModelMeta {
            label: req.kind.name().to_string(),
            epochs: prior_epochs + history.len() as u64,
            final_loss: history.last().copied().unwrap_or(f64::NAN),
            train_snr_db: cfg.train.training_snr_db,
            seed: cfg.train.seed,
        },
    };
    if let Some(out) = &req.out {
        save_model(out, &tm)?;
    }
    if let Some(log) = &req.log {
        std::fs::write(log, training_log_csv(&history)).map_err(|e| Error::io(log, e))?;
    }
    Ok((tm, history))
}
