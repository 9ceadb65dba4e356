use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TdlProfile;
use crate::phy::FrameLayout;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    /// Maximum Doppler shift in Hz.
    pub doppler_hz: f64,
    /// OFDM symbol duration including the guard interval.
    #[serde(default = "default_symbol_duration")]
    pub symbol_duration_s: f64,
    /// Sinusoids per tap in the sum-of-sinusoids synthesis.
    #[serde(default = "default_sinusoids")]
    pub sinusoids: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_symbol_duration() -> f64 {
    8e-6
}

fn default_sinusoids() -> usize {
    32
}

impl MobilityConfig {
    /// 100 km/h, 550 Hz Doppler.
    pub fn high() -> Self {
        Self::with_doppler(550.0)
    }

    /// 200 km/h, 1100 Hz Doppler.
    pub fn very_high() -> Self {
        Self::with_doppler(1100.0)
    }

    pub fn with_doppler(doppler_hz: f64) -> Self {
        Self {
            doppler_hz,
            symbol_duration_s: default_symbol_duration(),
            sinusoids: default_sinusoids(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.doppler_hz >= 0.0 && self.doppler_hz.is_finite()) {
            return Err(Error::Mobility(format!("Doppler {} Hz", self.doppler_hz)));
        }
        if !(self.symbol_duration_s > 0.0 && self.symbol_duration_s.is_finite()) {
            return Err(Error::Mobility(format!("symbol duration {} s", self.symbol_duration_s)));
        }
        if self.sinusoids == 0 {
            return Err(Error::Mobility("zero sinusoids".into()));
        }
        Ok(())
    }
}

/// One frame's channel: per-snapshot taps and the matching frequency response.
///
/// Snapshots 0 and 1 are the two preamble symbols, snapshot `i + 1` is data
/// symbol `i` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    pub delays: Vec<usize>,
    pub taps: Vec<Vec<Complex<T>>>,
    pub cfr: Vec<Vec<Complex<T>>>,
    pub noise_var: T,
}

impl<T: Real> ChannelRealization<T> {
    /// Frequency response of data symbol `i` (1-based).
    pub fn data_cfr(&self, i: usize) -> &[Complex<T>] {
        &self.cfr[i + 1]
    }

    /// Frequency responses of all data symbols in order.
    pub fn data_cfrs(&self) -> &[Vec<Complex<T>>] {
        &self.cfr[2..]
    }

    pub fn data_symbols(&self) -> usize {
        self.cfr.len() - 2
    }

    /// FNV-1a digest of the tap values, used to verify paired trials.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for v in self.taps.iter().flatten() {
            for x in [v.re.to_f64_lossy(), v.im.to_f64_lossy()] {
                for byte in x.to_bits().to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x100000001b3);
                }
            }
        }
        h
    }

    /// Channel that is `gain` on every subcarrier and snapshot.
    pub fn flat(layout: &FrameLayout, gain: Complex<T>) -> Self {
        let snapshots = layout.symbols_per_frame + 2;
        Self {
            delays: vec![0],
            taps: vec![vec![gain]; snapshots],
            cfr: vec![vec![gain; layout.n_active()]; snapshots],
            noise_var: T::zero(),
        }
    }
}

/// Frequency response of one tap vector on the active subcarriers.
pub(crate) fn taps_to_cfr<T: Real>(taps: &[Complex<T>], delays: &[usize], layout: &FrameLayout) -> Vec<Complex<T>> {
    let k = layout.total_subcarriers as f64;
    layout
        .active
        .iter()
        .map(|&idx| {
            let f = layout.logical(idx) as f64;
            taps.iter()
                .zip(delays)
                .map(|(h, &d)| {
                    let ang = -2.0 * PI * f * d as f64 / k;
                    h * Complex::new(T::lit(ang.cos()), T::lit(ang.sin()))
                })
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
        })
        .collect()
}

/// Draws a frame-long realization. Each tap is an independent Clarke
/// sum-of-sinusoids process with random arrival angles and phases, sampled once
/// per OFDM symbol.
pub fn gen_realization<T: Real, R: Rng + ?Sized>(
    profile: &TdlProfile,
    mobility: &MobilityConfig,
    layout: &FrameLayout,
    rng: &mut R,
) -> Result<ChannelRealization<T>> {
    profile.validate(layout.total_subcarriers)?;
    mobility.validate()?;
    let snapshots = layout.symbols_per_frame + 2;
    let n = mobility.sinusoids;
    let w = 2.0 * PI * mobility.doppler_hz * mobility.symbol_duration_s;

    // (per-snapshot angular increment, initial phase) per sinusoid, per tap
    let params: Vec<Vec<(f64, f64)>> = profile
        .powers
        .iter()
        .map(|_| {
            (0..n)
                .map(|_| {
                    let theta: f64 = rng.random_range(0.0..2.0 * PI);
                    let phi: f64 = rng.random_range(0.0..2.0 * PI);
                    (w * theta.cos(), phi)
                })
                .collect()
        })
        .collect();

    let mut taps = Vec::with_capacity(snapshots);
    let mut cfr = Vec::with_capacity(snapshots);
    for t in 0..snapshots {
        let tv: Vec<Complex<T>> = params
            .iter()
            .zip(&profile.powers)
            .map(|(sines, &power)| {
                let amp = (power / n as f64).sqrt();
                let (re, im) = sines.iter().fold((0.0, 0.0), |(re, im), &(dw, phi)| {
                    let a = dw * t as f64 + phi;
                    (re + a.cos(), im + a.sin())
                });
                Complex::new(T::lit(amp * re), T::lit(amp * im))
            })
            .collect();
        cfr.push(taps_to_cfr(&tv, &profile.delays, layout));
        taps.push(tv);
    }
    Ok(ChannelRealization {
        delays: profile.delays.clone(),
        taps,
        cfr,
        noise_var: T::zero(),
    })
}

impl MobilityConfig {
    /// [`gen_realization`] driven by this config's own seed.
    pub fn realize<T: Real>(&self, profile: &TdlProfile, layout: &FrameLayout) -> Result<ChannelRealization<T>> {
        gen_realization(profile, self, layout, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}
