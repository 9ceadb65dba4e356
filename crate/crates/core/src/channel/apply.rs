use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ChannelRealization;
use crate::phy::FrameGrid;
use crate::{Error, Real, Result};

/// Complex noise variance for unit-power symbols at `snr_db`; `+inf` disables noise.
pub fn noise_variance<T: Real>(snr_db: f64) -> T {
    if snr_db == f64::INFINITY {
        T::zero()
    } else {
        T::lit(10f64.powf(-snr_db / 10.0))
    }
}

pub(crate) fn complex_noise<T: Real, R: Rng + ?Sized>(rng: &mut R, var: T) -> Complex<T> {
    let s = (var / T::lit(2.0)).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re) * s, T::lit(im) * s)
}

/// Passes a frame through the channel: `y = h x + v` per subcarrier, with the
/// preambles on snapshots 0 and 1. Records the noise variance in `channel`.
pub fn apply_channel<T: Real, R: Rng + ?Sized>(
    grid: &FrameGrid<T>,
    channel: &mut ChannelRealization<T>,
    snr_db: f64,
    rng: &mut R,
) -> Result<FrameGrid<T>> {
    if channel.cfr.len() != grid.symbols() + 2 {
        return Err(Error::Shape(format!(
            "channel has {} snapshots, frame needs {}",
            channel.cfr.len(),
            grid.symbols() + 2
        )));
    }
    let var = noise_variance::<T>(snr_db);
    channel.noise_var = var;
    let mut pass = |x: &[Complex<T>], h: &[Complex<T>]| -> Vec<Complex<T>> {
        x.iter()
            .zip(h)
            .map(|(x, h)| {
                let y = h * x;
                if var > T::zero() {
                    y + complex_noise(rng, var)
                } else {
                    y
                }
            })
            .collect()
    };
    let mut out = grid.clone();
    out.preamble_rx = [
        pass(&grid.preamble, &channel.cfr[0]),
        pass(&grid.preamble, &channel.cfr[1]),
    ];
    out.data_rx = grid
        .data_tx
        .iter()
        .enumerate()
        .map(|(i, x)| pass(x, &channel.cfr[i + 2]))
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{MobilityConfig, TdlProfile};
    use crate::phy::{build_frame, random_bits, Constellation, FrameLayout, FrameSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(symbols: usize) -> (FrameSpec, FrameGrid<f64>) {
        let spec = FrameSpec {
            layout: FrameLayout::ieee80211p(symbols),
            ..FrameSpec::default()
        };
        let c = Constellation::new(spec.modulation);
        let bits = random_bits(&mut ChaCha8Rng::seed_from_u64(1), spec.payload_bits());
        let g = build_frame(&bits, &spec, &c).unwrap();
        (spec, g)
    }

    #[test]
    fn identity_channel_without_noise() {
        let (spec, g) = grid(50);
        let mut ch = ChannelRealization::flat(&spec.layout, Complex::new(1.0, 0.0));
        let rx = apply_channel(&g, &mut ch, f64::INFINITY, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(rx.data_rx, g.data_tx);
        assert_eq!(rx.preamble_rx[0], g.preamble);
    }

    #[test]
    fn noise_variance_at_10_db() {
        let (spec, g) = grid(50);
        let mut ch = ChannelRealization::flat(&spec.layout, Complex::new(0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sum = 0.0;
        let mut n = 0usize;
        while n < 100_000 {
            let rx = apply_channel(&g, &mut ch, 10.0, &mut rng).unwrap();
            for v in rx.data_rx.iter().flatten() {
                sum += v.norm_sqr();
                n += 1;
            }
        }
        let var = sum / n as f64;
        assert!((var - 0.1).abs() / 0.1 < 0.02, "{var}");
        assert!((ch.noise_var - 0.1).abs() < 1e-15);
    }

    #[test]
    fn received_energy_is_channel_plus_noise() {
        let (spec, g) = grid(50);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut ey, mut eh, mut frames) = (0.0, 0.0, 0);
        let dp = spec.layout.data_positions();
        // constant-modulus symbols isolate the channel/noise moments
        let qpsk_spec = FrameSpec {
            modulation: crate::phy::Modulation::Qpsk,
            ..spec.clone()
        };
        let c = Constellation::new(qpsk_spec.modulation);
        let g = {
            let bits = random_bits(&mut rng, qpsk_spec.payload_bits());
            let _ = &g;
            build_frame(&bits, &qpsk_spec, &c).unwrap()
        };
        while frames < 400 {
            let mut ch: ChannelRealization<f64> =
                crate::channel::gen_realization(&TdlProfile::default(), &MobilityConfig::high(), &spec.layout, &mut rng)
                    .unwrap();
            let rx = apply_channel(&g, &mut ch, 5.0, &mut rng).unwrap();
            for i in 0..rx.symbols() {
                for &p in &dp {
                    ey += rx.data_rx[i][p].norm_sqr();
                    eh += ch.cfr[i + 2][p].norm_sqr();
                }
            }
            frames += 1;
        }
        let n = (frames * 50 * 48) as f64;
        let sigma2 = 10f64.powf(-0.5);
        let lhs = ey / n;
        let rhs = eh / n + sigma2;
        assert!((lhs - rhs).abs() / rhs < 0.02, "{lhs} vs {rhs}");
    }

    #[test]
    fn rejects_mismatched_realization() {
        let (_, g) = grid(5);
        let mut ch = ChannelRealization::flat(&FrameLayout::ieee80211p(6), Complex::new(1.0, 0.0));
        assert!(apply_channel(&g, &mut ch, 10.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
