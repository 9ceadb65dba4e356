use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::coding::{conv_encode, CONSTRAINT_LENGTH};
use super::{Constellation, FrameLayout, Modulation};
use crate::{Error, Real, Result};

/// 802.11a/p long training sequence on logical subcarriers -26..=26 (DC entry is 0).
pub const LONG_TRAINING: [i8; 53] = [
    1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 0, 1, -1,
    -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    Uncoded,
    /// Rate-1/2 K=7 convolutional code with zero tail.
    #[default]
    Convolutional,
}

/// Static frame parameters shared by the transmitter and the receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub layout: FrameLayout,
    pub modulation: Modulation,
    pub coding: Coding,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            layout: FrameLayout::default(),
            modulation: Modulation::Qam16,
            coding: Coding::Convolutional,
        }
    }
}

impl FrameSpec {
    /// Coded bits carried by the data subcarriers of one frame.
    pub fn coded_bits(&self) -> usize {
        self.layout.symbols_per_frame * self.layout.n_data() * self.modulation.bits_per_symbol()
    }

    /// Information bits per frame. With coding the six tail bits occupy part of
    /// the rate-1/2 budget.
    pub fn payload_bits(&self) -> usize {
        match self.coding {
            Coding::Uncoded => self.coded_bits(),
            Coding::Convolutional => self.coded_bits() / 2 - (CONSTRAINT_LENGTH - 1),
        }
    }

    /// Known preamble values on the active subcarriers.
    pub fn preamble<T: Real>(&self) -> Vec<Complex<T>> {
        let half = (self.layout.total_subcarriers / 2) as i32;
        self.layout
            .active
            .iter()
            .map(|&k| {
                let l = k as i32 - half;
                let v = LONG_TRAINING[(l + 26) as usize];
                Complex::new(T::from_i8(v).unwrap(), T::zero())
            })
            .collect()
    }

    /// Pilot values: BPSK +1 on every pilot, no polarity sequence.
    pub fn pilot_values<T: Real>(&self) -> Vec<Complex<T>> {
        vec![Complex::new(T::one(), T::zero()); self.layout.n_pilots()]
    }
}

/// Frequency-domain content of one frame, restricted to the active subcarriers.
///
/// Every per-symbol vector is indexed by position in `layout.active`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid<T> {
    pub preamble: Vec<Complex<T>>,
    pub preamble_rx: [Vec<Complex<T>>; 2],
    pub data_tx: Vec<Vec<Complex<T>>>,
    pub data_rx: Vec<Vec<Complex<T>>>,
    pub pilot_values: Vec<Complex<T>>,
    pub payload: Vec<u8>,
    pub coded: Vec<u8>,
}

impl<T: Real> FrameGrid<T> {
    pub fn symbols(&self) -> usize {
        self.data_tx.len()
    }

    /// Writes `symbol,subcarrier,re,im` rows. Symbols 0 and 1 are the preambles,
    /// data symbol `i` (1-based) is row group `i + 1`.
    pub fn write_csv<W: Write>(&self, layout: &FrameLayout, received: bool, w: &mut W) -> std::io::Result<()> {
        let data = if received { &self.data_rx } else { &self.data_tx };
        let pre: [&[Complex<T>]; 2] = if received {
            [&self.preamble_rx[0], &self.preamble_rx[1]]
        } else {
            [&self.preamble, &self.preamble]
        };
        let rows = pre.into_iter().chain(data.iter().map(|v| v.as_slice()));
        write_grid_csv(w, layout, rows)
    }
}

/// Shared `symbol,subcarrier,re,im` dump used for frames and channel realizations.
pub fn write_grid_csv<'a, T: Real, W: Write>(
    w: &mut W,
    layout: &FrameLayout,
    symbols: impl IntoIterator<Item = &'a [Complex<T>]>,
) -> std::io::Result<()> {
    writeln!(w, "symbol,subcarrier,re,im")?;
    for (i, row) in symbols.into_iter().enumerate() {
        for (v, k) in row.iter().zip(&layout.active) {
            writeln!(w, "{i},{k},{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

/// Encodes, maps and places a payload; received fields start as copies of the
/// transmitted ones (identity channel).
pub fn build_frame<T: Real>(payload: &[u8], spec: &FrameSpec, constellation: &Constellation<T>) -> Result<FrameGrid<T>> {
    let expected = spec.payload_bits();
    if payload.len() != expected {
        return Err(Error::PayloadSize {
            expected,
            got: payload.len(),
        });
    }
    if constellation.modulation() != spec.modulation {
        return Err(Error::Shape("constellation does not match frame modulation".into()));
    }
    let coded = match spec.coding {
        Coding::Uncoded => payload.to_vec(),
        Coding::Convolutional => conv_encode(payload),
    };
    debug_assert_eq!(coded.len(), spec.coded_bits());
    let symbols = constellation.map(&coded)?;

    let layout = &spec.layout;
    let data_pos = layout.data_positions();
    let pilot_pos = layout.pilot_positions();
    let pilot_values = spec.pilot_values::<T>();
    let preamble = spec.preamble::<T>();

    let data_tx: Vec<Vec<Complex<T>>> = symbols
        .chunks_exact(layout.n_data())
        .map(|chunk| {
            let mut row = vec![Complex::new(T::zero(), T::zero()); layout.n_active()];
            for (&pos, &s) in data_pos.iter().zip(chunk) {
                row[pos] = s;
            }
            for (&pos, &p) in pilot_pos.iter().zip(&pilot_values) {
                row[pos] = p;
            }
            row
        })
        .collect();

    Ok(FrameGrid {
        preamble_rx: [preamble.clone(), preamble.clone()],
        preamble,
        data_rx: data_tx.clone(),
        data_tx,
        pilot_values,
        payload: payload.to_vec(),
        coded,
    })
}
