//! Training sequences and their binary file format.
//!
//! File layout (little-endian): magic `b"VCHD"`, version `u32`, then `u64`
//! sample count, steps, input width and target width, then for every sample
//! its inputs and its targets as row-major `f64` blocks (`steps x width`).

use std::fs;
use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;

use crate::estimators::{
    lstm_dnn_dpa_input, lstm_dpa_ta_input, pilot_ls, run_baseline, stack_re_im, EstimatorConfig, EstimatorKind,
    Models,
};
use crate::phy::Constellation;
use crate::sim::{simulate_trial, Scenario};
use crate::{Error, Real, Result};

const DATASET_MAGIC: [u8; 4] = *b"VCHD";
const DATASET_VERSION: u32 = 1;

/// One frame: `inputs` is `steps x input_dim`, `targets` is `steps x output_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub inputs: Array2<T>,
    pub targets: Array2<T>,
}

impl<T> Sample<T> {
    pub fn steps(&self) -> usize {
        self.inputs.nrows()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<T> {
    pub samples: Vec<Sample<T>>,
}

/// How to synthesize a dataset.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub kind: EstimatorKind,
    pub frames: usize,
    pub snr_db: f64,
    pub scenario: Scenario,
    pub estimator: EstimatorConfig,
    pub seed: u64,
}

impl<T: Real> Dataset<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.inputs.ncols())
    }

    pub fn output_dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.targets.ncols())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let (steps, k_in, k_out) = match self.samples.first() {
            Some(s) => (s.steps(), s.inputs.ncols(), s.targets.ncols()),
            None => (0, 0, 0),
        };
        if self
            .samples
            .iter()
            .any(|s| s.inputs.dim() != (steps, k_in) || s.targets.dim() != (steps, k_out))
        {
            return Err(Error::Shape("dataset samples differ in shape".into()));
        }
        let mut buf = Vec::with_capacity(36 + self.len() * steps * (k_in + k_out) * 8);
        buf.extend_from_slice(&DATASET_MAGIC);
        buf.extend_from_slice(&DATASET_VERSION.to_le_bytes());
        for v in [self.len(), steps, k_in, k_out] {
            buf.extend_from_slice(&(v as u64).to_le_bytes());
        }
        for s in &self.samples {
            for v in s.inputs.iter().chain(s.targets.iter()) {
                buf.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
            }
        }
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
        let corrupt = |m: &str| Error::CorruptDataset(format!("{}: {m}", path.display()));
        if buf.len() < 40 || buf[..4] != DATASET_MAGIC {
            return Err(corrupt("bad header"));
        }
        let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
        if version != DATASET_VERSION {
            return Err(corrupt(&format!("version {version}")));
        }
        let word = |i: usize| u64::from_le_bytes(buf[8 + 8 * i..16 + 8 * i].try_into().unwrap()) as usize;
        let (n, steps, k_in, k_out) = (word(0), word(1), word(2), word(3));
        let per = steps
            .checked_mul(k_in + k_out)
            .and_then(|v| v.checked_mul(8))
            .ok_or_else(|| corrupt("size overflow"))?;
        if Some(buf.len() - 40) != n.checked_mul(per) {
            return Err(corrupt("length does not match header"));
        }
        let mut vals = buf[40..]
            .chunks_exact(8)
            .map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap())));
        let mut block = |rows, cols| Array2::from_shape_fn((rows, cols), |_| vals.next().unwrap());
        let samples = (0..n)
            .map(|_| {
                let inputs = block(steps, k_in);
                let targets = block(steps, k_out);
                Sample { inputs, targets }
            })
            .collect();
        Ok(Self { samples })
    }
}

fn rows<T: Real>(rows: Vec<ndarray::Array1<T>>) -> Array2<T> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = Array2::zeros((rows.len(), cols));
    for (i, r) in rows.into_iter().enumerate() {
        m.row_mut(i).assign(&r);
    }
    m
}

/// Simulates `spec.frames` frames and records one training sequence per frame.
///
/// Recurrent kinds see the true channel of the previous symbol in place of the
/// fed-back estimate (teacher forcing) and learn the true channel of the
/// current symbol on the data carriers. Post-correction kinds map the
/// closed-loop STA or TRFI estimate to the true channel on all active carriers.
pub fn gen_dataset<T: Real>(spec: &DatasetSpec) -> Result<Dataset<T>> {
    if !spec.kind.is_learned() {
        return Err(Error::Unsupported(format!("{} has no trainable model", spec.kind)));
    }
    let layout = &spec.scenario.frame.layout;
    let c = Constellation::<T>::new(spec.scenario.frame.modulation);
    let data_pos = layout.data_positions();
    let samples = (0..spec.frames as u64)
        .into_par_iter()
        .map(|f| {
            let trial = simulate_trial::<T>(&spec.scenario, &c, spec.snr_db, spec.seed, f)?;
            let (grid, ch) = (&trial.grid, &trial.channel);
            let targets_data = || {
                rows(
                    (1..=grid.symbols())
                        .map(|i| {
                            let h = ch.data_cfr(i);
                            stack_re_im(&data_pos.iter().map(|&k| h[k]).collect::<Vec<_>>())
                        })
                        .collect(),
                )
            };
            let sample = match spec.kind {
                EstimatorKind::LstmDpaTa | EstimatorKind::LstmDnnDpa => {
                    let inputs = (1..=grid.symbols())
                        .map(|i| {
                            let prev = &ch.cfr[i];
                            let pilots = pilot_ls(&grid.data_rx[i - 1], layout, &grid.pilot_values);
                            if spec.kind == EstimatorKind::LstmDpaTa {
                                lstm_dpa_ta_input(prev, &pilots, layout)
                            } else {
                                lstm_dnn_dpa_input(prev, &pilots)
                            }
                        })
                        .collect();
                    Sample {
                        inputs: rows(inputs),
                        targets: targets_data(),
                    }
                }
                _ => {
                    let base = if spec.kind == EstimatorKind::StaDnn {
                        EstimatorKind::Sta
                    } else {
                        EstimatorKind::Trfi
                    };
                    let trace = run_baseline(grid, base, &Models::default(), &spec.estimator, layout, &c)?;
                    Sample {
                        inputs: rows(trace.data_estimates().iter().map(|h| stack_re_im(h)).collect()),
                        targets: rows(ch.data_cfrs().iter().map(|h| stack_re_im(h)).collect()),
                    }
                }
            };
            Ok(sample)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { samples })
}
