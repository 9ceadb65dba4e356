//! Frequency-domain 802.11p frame construction and demodulation.

mod bits;
mod coding;
mod constellation;
mod frame;
mod layout;

pub use bits::{random_bits, read_bits_file};
pub use coding::{conv_encode, viterbi_decode_hard, viterbi_decode_soft, CONSTRAINT_LENGTH, GENERATORS};
pub use constellation::{Constellation, Modulation};
pub use frame::{build_frame, write_grid_csv, Coding, FrameGrid, FrameSpec, LONG_TRAINING};
pub use layout::FrameLayout;
