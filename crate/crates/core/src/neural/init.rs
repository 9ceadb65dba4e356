use ndarray::Array2;
use rand::Rng;

use crate::Real;

/// Glorot-uniform `(rows, cols)` matrix.
pub(crate) fn glorot<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Array2<T> {
    let limit = (6.0 / (rows + cols).max(1) as f64).sqrt();
    Array2::from_shape_simple_fn((rows, cols), || T::lit(rng.random_range(-limit..=limit)))
}
