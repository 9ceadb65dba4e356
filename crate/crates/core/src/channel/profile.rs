use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tapped-delay-line power delay profile. Delays are in samples of the
/// 10 MHz OFDM sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdlProfile {
    pub delays: Vec<usize>,
    pub powers: Vec<f64>,
}

impl TdlProfile {
    /// Implementation-chosen 12-tap profile in the style of a highway
    /// oncoming-traffic channel (dense early taps, exponentially decaying tail).
    /// Not measured data.
    pub fn expressway_default() -> Self {
        let delays = vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15];
        let raw: Vec<f64> = delays.iter().map(|&d| (-(d as f64) / 3.0).exp()).collect();
        Self::new(delays, raw).expect("valid built-in profile")
    }

    pub fn single_tap() -> Self {
        Self {
            delays: vec![0],
            powers: vec![1.0],
        }
    }

    /// Builds a profile, normalizing powers to unit sum.
    pub fn new(delays: Vec<usize>, powers: Vec<f64>) -> Result<Self> {
        if delays.len() != powers.len() || delays.is_empty() {
            return Err(Error::Profile(format!(
                "{} delays vs {} powers",
                delays.len(),
                powers.len()
            )));
        }
        if powers.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Profile("tap powers must be finite and non-negative".into()));
        }
        let total: f64 = powers.iter().sum();
        if total <= 0.0 {
            return Err(Error::Profile("tap powers sum to zero".into()));
        }
        let p = Self {
            delays,
            powers: powers.iter().map(|p| p / total).collect(),
        };
        if !p.delays.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Profile("tap delays must be strictly increasing".into()));
        }
        Ok(p)
    }

    pub fn taps(&self) -> usize {
        self.delays.len()
    }

    /// Checks the stored profile against an FFT size.
    pub fn validate(&self, fft_size: usize) -> Result<()> {
        let again = Self::new(self.delays.clone(), self.powers.clone())?;
        let sum: f64 = self.powers.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Profile(format!("tap powers sum to {sum}, expected 1")));
        }
        if let Some(&max) = again.delays.last() {
            if max >= fft_size {
                return Err(Error::Profile(format!(
                    "maximum delay {max} must be below the FFT size {fft_size}"
                )));
            }
        }
        Ok(())
    }

    /// Loads `delays = [...]`, `powers = [...]` from a TOML file; powers are normalized.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: TdlProfile =
            toml::from_str(&text).map_err(|e| Error::Profile(format!("{}: {e}", path.display())))?;
        Self::new(raw.delays, raw.powers)
    }
}

impl Default for TdlProfile {
    fn default() -> Self {
        Self::expressway_default()
    }
}
