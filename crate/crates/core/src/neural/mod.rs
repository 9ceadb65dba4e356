//! Small dense neural-network engine: LSTM unit with readout, MLP, MSE training
//! with ADAM and backpropagation through time, gradient checking, datasets and
//! a binary model format.

mod dataset;
mod gradcheck;
mod init;
mod io;
mod lstm;
mod mlp;
mod train;

pub use dataset::{gen_dataset, Dataset, DatasetSpec, Sample};
pub use gradcheck::{grad_check, GradCheckReport};
pub use io::{load_model, save_model, ModelMeta, TrainedModel, MODEL_MAGIC, MODEL_VERSION};
pub use lstm::{Gate, LstmParams, LstmState};
pub use mlp::{Activation, Dense, MlpParams};
pub use train::{loss_and_grad, train, train_with, TrainConfig};

use crate::Real;

/// A trainable network.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Mlp(MlpParams<T>),
    Lstm(LstmParams<T>),
}

impl<T: Real> Model<T> {
    pub fn zeros_like(&self) -> Self {
        match self {
            Model::Mlp(m) => Model::Mlp(m.zeros_like()),
            Model::Lstm(m) => Model::Lstm(m.zeros_like()),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::Mlp(m) => m.input_dim(),
            Model::Lstm(m) => m.input_size(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Model::Mlp(m) => m.output_dim(),
            Model::Lstm(m) => m.output_size(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn as_lstm(&self) -> Option<&LstmParams<T>> {
        match self {
            Model::Lstm(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_mlp(&self) -> Option<&MlpParams<T>> {
        match self {
            Model::Mlp(m) => Some(m),
            _ => None,
        }
    }

    pub(crate) fn tensors(&self) -> Vec<&[T]> {
        match self {
            Model::Mlp(m) => m.tensors(),
            Model::Lstm(m) => m.tensors(),
        }
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        match self {
            Model::Mlp(m) => m.tensors_mut(),
            Model::Lstm(m) => m.tensors_mut(),
        }
    }

    /// Flat parameter access in serialization order.
    pub fn param(&self, index: usize) -> T {
        let mut i = index;
        for t in self.tensors() {
            if i < t.len() {
                return t[i];
            }
            i -= t.len();
        }
        panic!("parameter index {index} out of range");
    }

    pub fn set_param(&mut self, index: usize, value: T) {
        let mut i = index;
        for t in self.tensors_mut() {
            if i < t.len() {
                t[i] = value;
                return;
            }
            i -= t.len();
        }
        panic!("parameter index {index} out of range");
    }
}
