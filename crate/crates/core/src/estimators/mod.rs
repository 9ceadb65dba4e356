//! Channel estimators: LS, DPA, STA, TRFI, temporal averaging, the LSTM-DPA-TA
//! pipeline and the DNN-hybrid baselines.

mod dpa;
mod features;
mod ls;
mod pipeline;
mod spline;
mod sta;
mod ta;
mod trace;
mod trfi;

pub use dpa::{dpa_step, dpa_update, guarded_div, DpaOutput, DIVISION_GUARD};
pub use features::{
    lstm_dnn_dpa_input, lstm_dpa_ta_input, merge_prediction, pilot_ls, stack_re_im, unstack_re_im,
};
pub use ls::ls_estimate;
pub use pipeline::{
    run_baseline, run_lstm_dpa_ta, EstimatorConfig, EstimatorKind, Feedback, Models, PilotFeed,
};
pub use spline::NaturalSpline;
pub use sta::{frequency_average, sta_step, StaConfig};
pub use ta::{ta_noise_ratio, ta_noise_ratio_real, ta_noise_ratio_recursive, ta_step};
pub use trace::EstimateTrace;
pub use trfi::{trfi_step, TrfiOutput, TRFI_MIN_RELIABLE};
