use num_complex::Complex;
use rayon::prelude::*;

use super::SimConfig;
use crate::estimators::{guarded_div, run_baseline, EstimatorConfig, EstimatorKind, Models};
use crate::neural::{load_model, Model};
use crate::phy::{viterbi_decode_soft, Coding, Constellation, FrameGrid, FrameSpec};
use crate::sim::{simulate_trial, Scenario};
use crate::{Error, Result};

/// Aggregated result of one estimator at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub estimator: String,
    pub snr_db: f64,
    pub ber: f64,
    /// Mean per-frame NMSE over the data symbols.
    pub nmse: f64,
    pub frames: usize,
    pub bits: u64,
    pub bit_errors: u64,
    /// Divisions that hit the magnitude guard.
    pub flagged: u64,
    /// Order-independent digest of the channel realizations seen.
    pub channel_digest: u64,
}

/// An estimator ready to run: kind, settings and its trained network.
#[derive(Debug, Clone)]
pub struct PreparedEstimator {
    pub label: String,
    pub kind: EstimatorKind,
    pub config: EstimatorConfig,
    pub models: Models<f64>,
}

impl PreparedEstimator {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            label: kind.name().to_string(),
            kind,
            config: EstimatorConfig::default(),
            models: Models::default(),
        }
    }

    /// Attaches `model` to the slot `kind` reads from.
    pub fn with_model(mut self, model: Model<f64>) -> Result<Self> {
        let wrong = || Error::ModelShape(format!("{} cannot use this model type", self.kind));
        match (self.kind, model) {
            (EstimatorKind::LstmDpaTa, Model::Lstm(m)) => self.models.lstm_dpa_ta = Some(m),
            (EstimatorKind::LstmDnnDpa, Model::Lstm(m)) => self.models.lstm_dnn_dpa = Some(m),
            (EstimatorKind::StaDnn, Model::Mlp(m)) => self.models.sta_dnn = Some(m),
            (EstimatorKind::TrfiDnn, Model::Mlp(m)) => self.models.trfi_dnn = Some(m),
            _ => return Err(wrong()),
        }
        Ok(self)
    }
}

/// Loads the configured estimators and their model files.
pub fn prepare_estimators(cfg: &SimConfig) -> Result<Vec<PreparedEstimator>> {
    cfg.estimators
        .iter()
        .map(|e| {
            let mut p = PreparedEstimator::new(e.kind);
            p.label = e.label();
            p.config = e.estimator_config();
            if e.kind.is_learned() {
                let path = e
                    .model
                    .as_ref()
                    .ok_or_else(|| Error::MissingModel(format!("{} has no model path configured", p.label)))?;
                p = p.with_model(load_model::<f64>(&cfg.resolve(path))?.model)?;
            }
            Ok(p)
        })
        .collect()
}

/// Equalizes with `estimates` (one per data symbol), computes max-log LLRs and
/// decodes the payload.
pub fn recover_payload(
    grid: &FrameGrid<f64>,
    estimates: &[Vec<Complex<f64>>],
    spec: &FrameSpec,
    c: &Constellation<f64>,
    noise_var: f64,
) -> Result<Vec<u8>> {
    let data_pos = spec.layout.data_positions();
    let mut soft = Vec::with_capacity(spec.coded_bits());
    let mut hard = Vec::new();
    for (y, h) in grid.data_rx.iter().zip(estimates) {
        for &k in &data_pos {
            let (z, _) = guarded_div(y[k], h[k]);
            match spec.coding {
                Coding::Convolutional => {
                    let g = h[k].norm_sqr().max(1e-300);
                    c.llrs(z, noise_var.max(1e-12) / g, &mut soft);
                }
                Coding::Uncoded => c.demap_bits(z, &mut hard),
            }
        }
    }
    match spec.coding {
        Coding::Convolutional => viterbi_decode_soft(&soft),
        Coding::Uncoded => Ok(hard),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    bits: u64,
    errors: u64,
    nmse: f64,
    flagged: u64,
    digest: u64,
}

fn run_trial(
    ests: &[PreparedEstimator],
    scenario: &Scenario,
    c: &Constellation<f64>,
    snr_db: f64,
    seed: u64,
    trial: u64,
) -> Result<Vec<Tally>> {
    let t = simulate_trial::<f64>(scenario, c, snr_db, seed, trial)?;
    let spec = &scenario.frame;
    let digest = t.channel.checksum();
    ests.iter()
        .map(|e| {
            let (estimates, nmse, flagged) = if e.kind == EstimatorKind::Perfect {
                (t.channel.data_cfrs().to_vec(), 0.0, 0)
            } else {
                let tr = run_baseline(&t.grid, e.kind, &e.models, &e.config, &spec.layout, c)?;
                let nmse = tr.nmse(&t.channel)?;
                (tr.estimates[1..].to_vec(), nmse, tr.flagged as u64)
            };
            let bits = recover_payload(&t.grid, &estimates, spec, c, t.channel.noise_var)?;
            let errors = bits.iter().zip(&t.grid.payload).filter(|(a, b)| a != b).count() as u64;
            Ok(Tally {
                bits: bits.len() as u64,
                errors,
                nmse,
                flagged,
                digest,
            })
        })
        .collect()
}

/// Sweeps `cfg.snr_db` with already prepared estimators. Every estimator sees
/// the same frames: trial `f` uses payload, channel and noise streams keyed by
/// `(cfg.seed, f)` at every SNR point.
pub fn run_sweep_with(cfg: &SimConfig, ests: &[PreparedEstimator]) -> Result<Vec<MetricRecord>> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let c = Constellation::<f64>::new(scenario.frame.modulation);
    let mut records = Vec::with_capacity(cfg.snr_db.len() * ests.len());
    for &snr in &cfg.snr_db {
        let per_trial: Vec<Vec<Tally>> = (0..cfg.frames as u64)
            .into_par_iter()
            .map(|f| run_trial(ests, &scenario, &c, snr, cfg.seed, f))
            .collect::<Result<_>>()?;
        for (j, e) in ests.iter().enumerate() {
            let mut sum = Tally::default();
            for t in &per_trial {
                let t = t[j];
                sum.bits += t.bits;
                sum.errors += t.errors;
                sum.nmse += t.nmse;
                sum.flagged += t.flagged;
                sum.digest = sum.digest.wrapping_add(t.digest);
            }
            records.push(MetricRecord {
                estimator: e.label.clone(),
                snr_db: snr,
                ber: if sum.bits == 0 { 0.0 } else { sum.errors as f64 / sum.bits as f64 },
                nmse: sum.nmse / cfg.frames as f64,
                frames: cfg.frames,
                bits: sum.bits,
                bit_errors: sum.errors,
                flagged: sum.flagged,
                channel_digest: sum.digest,
            });
        }
    }
    Ok(records)
}

/// Loads models named in `cfg` and runs [`run_sweep_with`].
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    cfg.validate()?;
    run_sweep_with(cfg, &prepare_estimators(cfg)?)
}
