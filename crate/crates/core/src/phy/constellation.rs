use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Qpsk,
    #[serde(rename = "16qam")]
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }
}

/// Gray-labelled square constellation with unit average energy.
///
/// `points[label]` is the symbol carrying `label`, whose bits are read MSB first.
/// The first half of the bits selects the in-phase level, the second half the
/// quadrature level; on each axis a leading 0 bit means a positive amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    modulation: Modulation,
    points: Vec<Complex<T>>,
    scale: T,
}

/// Gray amplitude levels per axis, indexed by the axis label.
fn axis_levels(modulation: Modulation) -> &'static [f64] {
    match modulation {
        Modulation::Qpsk => &[1.0, -1.0],
        // 00 -> +3, 01 -> +1, 10 -> -3, 11 -> -1
        Modulation::Qam16 => &[3.0, 1.0, -3.0, -1.0],
    }
}

impl<T: Real> Constellation<T> {
    pub fn new(modulation: Modulation) -> Self {
        let levels = axis_levels(modulation);
        let half = modulation.bits_per_symbol() / 2;
        let mean_energy = 2.0 * levels.iter().map(|a| a * a).sum::<f64>() / levels.len() as f64;
        let scale = 1.0 / mean_energy.sqrt();
        let axis_mask = (1 << half) - 1;
        let points = (0..modulation.order())
            .map(|label| {
                let re = levels[label >> half] * scale;
                let im = levels[label & axis_mask] * scale;
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self {
            modulation,
            points,
            scale: T::lit(scale),
        }
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    /// Amplitude normalization applied to the integer lattice.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn point(&self, label: usize) -> Complex<T> {
        self.points[label]
    }

    /// Maps MSB-first bit groups to symbols.
    pub fn map(&self, bits: &[u8]) -> Result<Vec<Complex<T>>> {
        let m = self.bits_per_symbol();
        if !bits.len().is_multiple_of(m) {
            return Err(Error::BitCount {
                len: bits.len(),
                bits_per_symbol: m,
            });
        }
        Ok(bits
            .chunks_exact(m)
            .map(|group| {
                let label = group.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Label of the nearest point; equidistant candidates resolve to the lowest label.
    pub fn nearest_label(&self, z: Complex<T>) -> usize {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (label, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    pub fn demap_nearest(&self, z: Complex<T>) -> Complex<T> {
        self.points[self.nearest_label(z)]
    }

    /// Hard bits of the nearest point, appended MSB first.
    pub fn demap_bits(&self, z: Complex<T>, out: &mut Vec<u8>) {
        let label = self.nearest_label(z);
        let m = self.bits_per_symbol();
        out.extend((0..m).rev().map(|s| ((label >> s) & 1) as u8));
    }

    /// Max-log bit LLRs, `ln P(b=0)/P(b=1)`, for an equalized sample with
    /// effective complex noise variance `noise_var`.
    pub fn llrs(&self, z: Complex<T>, noise_var: T, out: &mut Vec<T>) {
        let m = self.bits_per_symbol();
        let dist: Vec<T> = self.points.iter().map(|p| (z - p).norm_sqr()).collect();
        let nv = noise_var.max(T::min_positive_value());
        for s in (0..m).rev() {
            let mut d0 = T::infinity();
            let mut d1 = T::infinity();
            for (label, &d) in dist.iter().enumerate() {
                if (label >> s) & 1 == 0 {
                    d0 = d0.min(d);
                } else {
                    d1 = d1.min(d);
                }
            }
            out.push((d1 - d0) / nv);
        }
    }

    pub fn demap_nearest_all(&self, z: &[Complex<T>]) -> Vec<Complex<T>> {
        z.iter().map(|&v| self.demap_nearest(v)).collect()
    }
}
