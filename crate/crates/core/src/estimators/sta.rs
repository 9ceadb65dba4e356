use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Spectral-temporal averaging weights: time weight `alpha >= 1` and frequency
/// half-window `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaConfig {
    pub alpha: f64,
    pub beta: usize,
}

impl Default for StaConfig {
    fn default() -> Self {
        Self { alpha: 2.0, beta: 2 }
    }
}

impl StaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!("STA alpha {} must be >= 1", self.alpha)));
        }
        Ok(())
    }

    /// Uniform frequency weight `1 / (2 beta + 1)` of a full window.
    pub fn frequency_weight(&self) -> f64 {
        1.0 / (2 * self.beta + 1) as f64
    }
}

/// Moving average over `[k - beta, k + beta]` along the active-carrier vector.
/// Windows that run past either band edge shrink to the available carriers and
/// are renormalized.
pub fn frequency_average<T: Real>(h: &[Complex<T>], beta: usize) -> Vec<Complex<T>> {
    let n = h.len();
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(beta);
            let hi = (k + beta).min(n - 1);
            let sum = h[lo..=hi]
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
            sum / T::from_usize(hi - lo + 1).unwrap()
        })
        .collect()
}

/// One STA update: frequency-average the current DPA estimate and blend it with
/// the previous STA estimate, `(1 - 1/alpha) prev + (1/alpha) fd`.
pub fn sta_step<T: Real>(h_sta_prev: &[Complex<T>], h_dpa: &[Complex<T>], cfg: &StaConfig) -> Vec<Complex<T>> {
    let fd = frequency_average(h_dpa, cfg.beta);
    super::ta_step(h_sta_prev, &fd, T::lit(cfg.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex<f64> {
        Complex::new(v, -v)
    }

    #[test]
    fn full_window_weight() {
        assert_eq!(StaConfig { alpha: 2.0, beta: 2 }.frequency_weight(), 0.2);
        assert!(StaConfig { alpha: 0.5, beta: 1 }.validate().is_err());
    }

    #[test]
    fn three_point_means_by_hand() {
        let h: Vec<Complex<f64>> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&v| c(v)).collect();
        let got = frequency_average(&h, 1);
        // edges shrink to two carriers
        let want = [1.5, 7.0 / 3.0, 14.0 / 3.0, 28.0 / 3.0, 12.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - c(w)).norm() < 1e-14, "{g} vs {w}");
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let h = vec![Complex::new(0.7, 0.1); 52];
        for beta in 0..5 {
            let out = sta_step(&h, &h, &StaConfig { alpha: 2.0, beta });
            for v in out {
                assert!((v - h[0]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_window_unit_alpha_is_identity() {
        let prev = vec![Complex::new(9.0, 9.0); 4];
        let h: Vec<Complex<f64>> = (0..4).map(|k| Complex::new(k as f64, 1.0)).collect();
        assert_eq!(sta_step(&prev, &h, &StaConfig { alpha: 1.0, beta: 0 }), h);
    }
}
