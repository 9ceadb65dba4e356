//! Desk-scale IEEE 802.11p physical-layer simulator and channel-estimator library.
//!
//! The numeric core is generic over [`Real`] (implemented for `f32` and `f64`);
//! the aliases at the crate root pin the double-precision types used by the
//! Monte-Carlo harness and the CLI.
//!
//! Layout:
//! - [`phy`]: frame layout, Gray QAM, rate-1/2 convolutional code, frame construction.
//! - [`channel`]: tapped-delay-line Rayleigh fading with Jakes Doppler, AWGN, NMSE.
//! - [`estimators`]: LS, DPA, STA, TRFI, temporal averaging, LSTM-DPA-TA and the
//!   DNN-hybrid baselines.
//! - [`neural`]: LSTM / MLP engine with BPTT, ADAM, datasets and model files.
//! - [`complexity`]: real-valued operation counts of the LSTM estimators.
//! - [`sim`]: seeded end-to-end transmissions shared by datasets and sweeps.
//! - [`harness`]: configuration, BER/NMSE sweeps, training commands and reports.

pub mod channel;
pub mod complexity;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod neural;
pub mod phy;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

/// Complex double-precision sample.
pub type C64 = Complex<f64>;
/// Complex single-precision sample.
pub type C32 = Complex<f32>;

pub type Constellation64 = phy::Constellation<f64>;
pub type FrameGrid64 = phy::FrameGrid<f64>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type EstimateTrace64 = estimators::EstimateTrace<f64>;
pub type LstmParams64 = neural::LstmParams<f64>;
pub type MlpParams64 = neural::MlpParams<f64>;
pub type Model64 = neural::Model<f64>;
pub type Dataset64 = neural::Dataset<f64>;
