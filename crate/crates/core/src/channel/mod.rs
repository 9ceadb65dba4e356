//! Doubly-selective vehicular channel: tapped delay line with Jakes Doppler,
//! block fading per OFDM symbol, AWGN, and NMSE scoring.

mod apply;
mod jakes;
mod profile;

pub use apply::{apply_channel, noise_variance};
pub use jakes::{gen_realization, ChannelRealization, MobilityConfig};
pub use profile::TdlProfile;

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Normalized mean-squared error `sum ||est - h||^2 / sum ||h||^2` over all
/// symbols and active subcarriers.
pub fn nmse<T: Real>(estimates: &[Vec<Complex<T>>], truth: &[Vec<Complex<T>>]) -> Result<T> {
    if estimates.len() != truth.len() {
        return Err(Error::Shape(format!(
            "nmse: {} estimated symbols vs {} true",
            estimates.len(),
            truth.len()
        )));
    }
    let mut err = T::zero();
    let mut energy = T::zero();
    for (e, h) in estimates.iter().zip(truth) {
        if e.len() != h.len() {
            return Err(Error::Shape(format!("nmse: {} subcarriers vs {}", e.len(), h.len())));
        }
        for (a, b) in e.iter().zip(h) {
            err += (a - b).norm_sqr();
            energy += b.norm_sqr();
        }
    }
    Ok(err / energy)
}
