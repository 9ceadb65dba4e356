//! Rate-1/2, constraint-length-7 convolutional code (generators 133/171 octal)
//! with zero-tail termination, and its Viterbi decoder.

use crate::{Error, Real, Result};

pub const CONSTRAINT_LENGTH: usize = 7;
pub const GENERATORS: [u32; 2] = [0o133, 0o171];

const MEMORY: usize = CONSTRAINT_LENGTH - 1;
const STATES: usize = 1 << MEMORY;

#[inline]
fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Output pair for the register formed by `input` entering `state`.
/// The newest bit sits in the register MSB, matching the octal generator notation.
#[inline]
fn branch_output(state: usize, input: u8) -> [u8; 2] {
    let reg = ((input as u32) << MEMORY) | state as u32;
    [parity(reg & GENERATORS[0]), parity(reg & GENERATORS[1])]
}

#[inline]
fn next_state(state: usize, input: u8) -> usize {
    (((input as usize) << MEMORY) | state) >> 1
}

/// Encodes `bits` and flushes the register with six zero bits, producing
/// `2 * (bits.len() + 6)` coded bits.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * (bits.len() + MEMORY));
    let mut state = 0usize;
    for &b in bits.iter().chain(std::iter::repeat_n(&0u8, MEMORY)) {
        let b = b & 1;
        out.extend_from_slice(&branch_output(state, b));
        state = next_state(state, b);
    }
    out
}

/// Hard-decision decoding under the Hamming metric.
pub fn viterbi_decode_hard(coded: &[u8]) -> Result<Vec<u8>> {
    let soft: Vec<f64> = coded.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect();
    viterbi_decode_soft(&soft)
}

/// Soft-decision decoding of zero-tail terminated code words.
///
/// `soft[j] > 0` favours coded bit 0 (LLR convention). The decoder maximizes the
/// correlation `sum soft[j] * (1 - 2 c[j])`, which is the Euclidean metric for
/// antipodal symbols and the Hamming metric for `±1` inputs. Equal metrics keep
/// the lower-indexed predecessor state.
pub fn viterbi_decode_soft<T: Real>(soft: &[T]) -> Result<Vec<u8>> {
    if !soft.len().is_multiple_of(2) {
        return Err(Error::OddCodedLength(soft.len()));
    }
    let steps = soft.len() / 2;
    if steps < MEMORY {
        return Err(Error::ShortCodedStream(soft.len()));
    }

    // outputs[state][input] as +-1 signs
    let mut signs = [[[T::zero(); 2]; 2]; STATES];
    for (s, row) in signs.iter_mut().enumerate() {
        for input in 0..2u8 {
            let o = branch_output(s, input);
            row[input as usize] = [
                if o[0] == 0 { T::one() } else { -T::one() },
                if o[1] == 0 { T::one() } else { -T::one() },
            ];
        }
    }

    let neg_inf = T::neg_infinity();
    let mut metric = vec![neg_inf; STATES];
    metric[0] = T::zero();
    let mut next = vec![neg_inf; STATES];
    // bit s of decisions[t] set when state s was reached from the odd predecessor
    let mut decisions: Vec<u64> = Vec::with_capacity(steps);

    for pair in soft.chunks_exact(2) {
        let (r0, r1) = (pair[0], pair[1]);
        let mut word = 0u64;
        for (n, slot) in next.iter_mut().enumerate() {
            let input = n >> (MEMORY - 1);
            let p0 = (n & (STATES / 2 - 1)) << 1;
            let p1 = p0 | 1;
            let m0 = metric[p0] + r0 * signs[p0][input][0] + r1 * signs[p0][input][1];
            let m1 = metric[p1] + r0 * signs[p1][input][0] + r1 * signs[p1][input][1];
            if m1 > m0 {
                *slot = m1;
                word |= 1 << n;
            } else {
                *slot = m0;
            }
        }
        decisions.push(word);
        std::mem::swap(&mut metric, &mut next);
    }

    // trace back from the all-zero terminal state
    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = (state >> (MEMORY - 1)) as u8;
        let odd = (decisions[t] >> state) & 1;
        state = ((state & (STATES / 2 - 1)) << 1) | odd as usize;
    }
    bits.truncate(steps - MEMORY);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_in_zero_out() {
        for n in [1, 7, 100] {
            let c = conv_encode(&vec![0; n]);
            assert_eq!(c.len(), 2 * (n + 6));
            assert!(c.iter().all(|&b| b == 0));
        }
        assert_eq!(viterbi_decode_hard(&[0; 40]).unwrap(), vec![0; 14]);
    }

    #[test]
    fn impulse_response_is_interleaved_generators() {
        // 133 = 1011011, 171 = 1111001, read MSB (current input) first
        let c = conv_encode(&[1]);
        assert_eq!(c, vec![1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1]);
    }

    #[test]
    fn noiseless_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bits: Vec<u8> = (0..1000).map(|_| rng.random_range(0..2)).collect();
        assert_eq!(viterbi_decode_hard(&conv_encode(&bits)).unwrap(), bits);
    }

    #[test]
    fn corrects_isolated_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bits: Vec<u8> = (0..500).map(|_| rng.random_range(0..2)).collect();
        let mut coded = conv_encode(&bits);
        // one flipped coded bit per 100
        for j in (37..coded.len()).step_by(100) {
            coded[j] ^= 1;
        }
        assert_eq!(viterbi_decode_hard(&coded).unwrap(), bits);
    }

    #[test]
    fn rejects_odd_and_short_streams() {
        assert!(matches!(viterbi_decode_hard(&[0; 15]), Err(Error::OddCodedLength(15))));
        assert!(matches!(viterbi_decode_hard(&[0; 10]), Err(Error::ShortCodedStream(10))));
    }

    proptest! {
        #[test]
        fn encoder_is_linear(pairs in proptest::collection::vec((0u8..2, 0u8..2), 1..200)) {
            let a: Vec<u8> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<u8> = pairs.iter().map(|p| p.1).collect();
            let x: Vec<u8> = pairs.iter().map(|p| p.0 ^ p.1).collect();
            let ea = conv_encode(&a);
            let eb = conv_encode(&b);
            let ex: Vec<u8> = ea.iter().zip(&eb).map(|(u, v)| u ^ v).collect();
            prop_assert_eq!(conv_encode(&x), ex);
        }

        #[test]
        fn soft_roundtrip(bits in proptest::collection::vec(0u8..2, 1..300), amp in 0.1f64..5.0) {
            let soft: Vec<f64> = conv_encode(&bits).iter().map(|&c| if c == 0 { amp } else { -amp }).collect();
            prop_assert_eq!(viterbi_decode_soft(&soft).unwrap(), bits);
        }
    }
}
