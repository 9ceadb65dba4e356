//! Configuration, Monte-Carlo BER/NMSE sweeps, training commands and reports.

mod config;
mod report;
mod sweep;
mod train;

pub use config::{ChannelSection, EstimatorEntry, FrameSection, ModelSection, SimConfig};
pub use report::{metrics_csv, summary_table, training_log_csv};
pub use sweep::{prepare_estimators, recover_payload, run_sweep, run_sweep_with, MetricRecord, PreparedEstimator};
pub use train::{default_model, train_cmd, training_dataset, TrainRequest};
