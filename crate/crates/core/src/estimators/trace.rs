use std::io::Write;

use num_complex::Complex;

use crate::channel::{nmse, ChannelRealization};
use crate::phy::FrameLayout;
use crate::{Error, Real, Result};

/// Per-symbol output of one estimator over one frame.
///
/// `estimates[0]` is the LS preamble estimate and `estimates[i]` the estimate
/// for data symbol `i`. `decisions` follows the same indexing with the
/// preamble at index 0. TRFI fills the reliable/unreliable sets (centered
/// indices, index 0 empty).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateTrace<T> {
    pub name: String,
    pub estimates: Vec<Vec<Complex<T>>>,
    pub decisions: Vec<Vec<Complex<T>>>,
    pub reliable: Option<Vec<Vec<usize>>>,
    pub unreliable: Option<Vec<Vec<usize>>>,
    pub flagged: usize,
}

impl<T: Real> EstimateTrace<T> {
    pub(crate) fn start(name: &str, ls: Vec<Complex<T>>, preamble: Vec<Complex<T>>, symbols: usize) -> Self {
        let mut estimates = Vec::with_capacity(symbols + 1);
        let mut decisions = Vec::with_capacity(symbols + 1);
        estimates.push(ls);
        decisions.push(preamble);
        Self {
            name: name.to_string(),
            estimates,
            decisions,
            reliable: None,
            unreliable: None,
            flagged: 0,
        }
    }

    pub fn ls(&self) -> &[Complex<T>] {
        &self.estimates[0]
    }

    /// Estimates for data symbols `1..=I`.
    pub fn data_estimates(&self) -> &[Vec<Complex<T>>] {
        &self.estimates[1..]
    }

    /// NMSE over the data symbols of one frame.
    pub fn nmse(&self, channel: &ChannelRealization<T>) -> Result<T> {
        nmse(self.data_estimates(), channel.data_cfrs())
    }

    /// Writes `symbol,subcarrier,est_re,est_im,true_re,true_im,estimator_name`.
    /// The true value at symbol 0 is the mean of the two preamble snapshots.
    pub fn write_csv<W: Write>(&self, layout: &FrameLayout, channel: &ChannelRealization<T>, w: &mut W) -> Result<()> {
        if channel.cfr.len() != self.estimates.len() + 1 {
            return Err(Error::Shape("trace and channel cover different frames".into()));
        }
        let half = T::lit(0.5);
        let pre: Vec<Complex<T>> = channel.cfr[0]
            .iter()
            .zip(&channel.cfr[1])
            .map(|(a, b)| (a + b) * half)
            .collect();
        let io = |e| Error::io("<trace>", e);
        writeln!(w, "symbol,subcarrier,est_re,est_im,true_re,true_im,estimator_name").map_err(io)?;
        for (i, est) in self.estimates.iter().enumerate() {
            let truth = if i == 0 { &pre[..] } else { channel.data_cfr(i) };
            for ((e, h), k) in est.iter().zip(truth).zip(&layout.active) {
                writeln!(w, "{i},{k},{},{},{},{},{}", e.re, e.im, h.re, h.im, self.name).map_err(io)?;
            }
        }
        Ok(())
    }
}
