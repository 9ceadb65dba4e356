use num_complex::Complex;

use crate::phy::Constellation;
use crate::Real;

/// Magnitude floor for equalization and estimation divisors.
pub const DIVISION_GUARD: f64 = 1e-12;

/// `num / den`, with `den` clamped to magnitude [`DIVISION_GUARD`] (keeping its
/// phase) when smaller. The flag reports whether the clamp fired.
#[inline]
pub fn guarded_div<T: Real>(num: Complex<T>, den: Complex<T>) -> (Complex<T>, bool) {
    let eps = T::lit(DIVISION_GUARD);
    let mag = den.norm();
    if mag >= eps {
        (num / den, false)
    } else if mag > T::zero() {
        (num / (den * (eps / mag)), true)
    } else {
        (num / Complex::new(eps, T::zero()), true)
    }
}

/// Result of one data-pilot-aided update.
#[derive(Debug, Clone, PartialEq)]
pub struct DpaOutput<T> {
    /// Demapped symbols on the active carriers; pilots hold their known values.
    pub decisions: Vec<Complex<T>>,
    pub estimate: Vec<Complex<T>>,
    /// Subcarriers where a divisor hit the guard.
    pub flagged: usize,
}

/// Decision-to-estimate half of DPA: `y / d` per active subcarrier.
pub fn dpa_update<T: Real>(y: &[Complex<T>], decisions: &[Complex<T>]) -> (Vec<Complex<T>>, usize) {
    let mut flagged = 0;
    let est = y
        .iter()
        .zip(decisions)
        .map(|(&y, &d)| {
            let (v, f) = guarded_div(y, d);
            flagged += f as usize;
            v
        })
        .collect();
    (est, flagged)
}

/// Demaps `y / h_prev` on the data carriers, forces pilots to their known values,
/// and re-estimates the channel as `y / d`.
///
/// `data_pos` and `pilot_pos` index into the active-carrier vectors.
pub fn dpa_step<T: Real>(
    y: &[Complex<T>],
    h_prev: &[Complex<T>],
    constellation: &Constellation<T>,
    data_pos: &[usize],
    pilot_pos: &[usize],
    pilot_values: &[Complex<T>],
) -> DpaOutput<T> {
    let mut decisions = vec![Complex::new(T::zero(), T::zero()); y.len()];
    let mut flagged = 0;
    for &k in data_pos {
        let (z, f) = guarded_div(y[k], h_prev[k]);
        flagged += f as usize;
        decisions[k] = constellation.demap_nearest(z);
    }
    for (&k, &p) in pilot_pos.iter().zip(pilot_values) {
        decisions[k] = p;
    }
    let (estimate, f2) = dpa_update(y, &decisions);
    DpaOutput {
        decisions,
        estimate,
        flagged: flagged + f2,
    }
}
