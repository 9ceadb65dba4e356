use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Subcarrier index sets of one OFDM frame.
///
/// Indices are in centered order: index `k` is logical subcarrier `k - K/2`, so
/// DC sits at `K/2` and neighbouring indices are neighbouring frequencies. Use
/// [`FrameLayout::fft_bin`] for the FFT-bin numbering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameLayout {
    pub total_subcarriers: usize,
    pub active: Vec<usize>,
    pub data: Vec<usize>,
    pub pilots: Vec<usize>,
    pub nulls: Vec<usize>,
    pub symbols_per_frame: usize,
}

impl FrameLayout {
    pub const K: usize = 64;
    pub const PILOT_LOGICAL: [i32; 4] = [-21, -7, 7, 21];

    /// The 802.11p 10 MHz layout: 52 active carriers at logical ±1..±26, pilots at
    /// ±7 and ±21, DC and 11 edge bins unused.
    pub fn ieee80211p(symbols_per_frame: usize) -> Self {
        let k = Self::K;
        let half = (k / 2) as i32;
        let active: Vec<usize> = (-26..=26)
            .filter(|&l| l != 0)
            .map(|l: i32| (l + half) as usize)
            .collect();
        let pilots: Vec<usize> = Self::PILOT_LOGICAL
            .iter()
            .map(|&l| (l + half) as usize)
            .collect();
        let data = active.iter().copied().filter(|k| !pilots.contains(k)).collect();
        let nulls = (0..k).filter(|k| !active.contains(k)).collect();
        Self {
            total_subcarriers: k,
            active,
            data,
            pilots,
            nulls,
            symbols_per_frame,
        }
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn n_data(&self) -> usize {
        self.data.len()
    }

    pub fn n_pilots(&self) -> usize {
        self.pilots.len()
    }

    /// Signed subcarrier number of a centered index.
    pub fn logical(&self, index: usize) -> i32 {
        index as i32 - (self.total_subcarriers / 2) as i32
    }

    /// FFT bin (0 = DC, negative frequencies wrap to the top) of a centered index.
    pub fn fft_bin(&self, index: usize) -> usize {
        let k = self.total_subcarriers as i32;
        self.logical(index).rem_euclid(k) as usize
    }

    /// Positions of the data subcarriers inside the active list.
    pub fn data_positions(&self) -> Vec<usize> {
        self.positions_of(&self.data)
    }

    /// Positions of the pilot subcarriers inside the active list.
    pub fn pilot_positions(&self) -> Vec<usize> {
        self.positions_of(&self.pilots)
    }

    fn positions_of(&self, subset: &[usize]) -> Vec<usize> {
        subset
            .iter()
            .map(|k| {
                self.active
                    .binary_search(k)
                    .expect("subset of the active carriers")
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.total_subcarriers;
        let bad = |msg: &str| Err(Error::Shape(format!("frame layout: {msg}")));
        for (name, set) in [
            ("active", &self.active),
            ("data", &self.data),
            ("pilots", &self.pilots),
            ("nulls", &self.nulls),
        ] {
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return bad(&format!("{name} indices not strictly increasing"));
            }
            if set.iter().any(|&i| i >= k) {
                return bad(&format!("{name} index out of range"));
            }
        }
        if self.active.len() + self.nulls.len() != k {
            return bad("active and null sets do not cover all subcarriers");
        }
        if self.active.iter().any(|i| self.nulls.binary_search(i).is_ok()) {
            return bad("active and null sets overlap");
        }
        if self.data.iter().any(|i| self.pilots.binary_search(i).is_ok()) {
            return bad("data and pilot sets overlap");
        }
        let mut union: Vec<usize> = self.data.iter().chain(&self.pilots).copied().collect();
        union.sort_unstable();
        if union != self.active {
            return bad("data and pilot sets do not partition the active set");
        }
        if self.symbols_per_frame == 0 {
            return bad("zero symbols per frame");
        }
        Ok(())
    }
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self::ieee80211p(50)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_sizes() {
        let l = FrameLayout::ieee80211p(50);
        assert_eq!(l.total_subcarriers, 64);
        assert_eq!(l.n_active(), 52);
        assert_eq!(l.n_data(), 48);
        assert_eq!(l.n_pilots(), 4);
        assert_eq!(l.nulls.len(), 12);
        assert_eq!(l.symbols_per_frame, 50);
        l.validate().unwrap();
    }

    #[test]
    fn pilot_bins_follow_the_standard() {
        let l = FrameLayout::default();
        let bins: Vec<usize> = l.pilots.iter().map(|&k| l.fft_bin(k)).collect();
        assert_eq!(bins, vec![43, 57, 7, 21]);
        assert_eq!(l.fft_bin(32), 0);
        assert!(l.nulls.contains(&32));
        // 6 lower edge + DC + 5 upper edge
        assert_eq!(l.nulls.iter().filter(|&&k| k < 32).count(), 6);
        assert_eq!(l.nulls.iter().filter(|&&k| k > 32).count(), 5);
    }

    #[test]
    fn positions_index_into_active() {
        let l = FrameLayout::default();
        for (pos, k) in l.pilot_positions().into_iter().zip(&l.pilots) {
            assert_eq!(l.active[pos], *k);
        }
        assert_eq!(l.data_positions().len(), 48);
    }

    #[test]
    fn validate_rejects_overlap() {
        let mut l = FrameLayout::default();
        l.data.push(l.pilots[0]);
        l.data.sort_unstable();
        assert!(l.validate().is_err());
    }
}
