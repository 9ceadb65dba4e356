use num_complex::Complex;

use crate::{Error, Real, Result};

/// Least-squares channel estimate from the two received long-training symbols:
/// `(y1 + y2) / (2 p)` per active subcarrier.
pub fn ls_estimate<T: Real>(
    y_p1: &[Complex<T>],
    y_p2: &[Complex<T>],
    preamble: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    if y_p1.len() != preamble.len() || y_p2.len() != preamble.len() {
        return Err(Error::Shape(format!(
            "ls: preambles of length {} and {} vs sequence of {}",
            y_p1.len(),
            y_p2.len(),
            preamble.len()
        )));
    }
    let two = T::lit(2.0);
    y_p1.iter()
        .zip(y_p2)
        .zip(preamble)
        .enumerate()
        .map(|(k, ((a, b), p))| {
            if p.norm_sqr() == T::zero() {
                Err(Error::ZeroPreamble(k))
            } else {
                Ok((a + b) / (p * two))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_preambles_recover_the_channel() {
        let p: Vec<Complex<f64>> = [1.0, -1.0, 1.0].iter().map(|&v| Complex::new(v, 0.0)).collect();
        let h = [Complex::new(0.3, -0.2), Complex::new(-1.1, 0.5), Complex::new(0.0, 2.0)];
        let y: Vec<Complex<f64>> = h.iter().zip(&p).map(|(h, p)| h * p).collect();
        assert_eq!(ls_estimate(&y, &y, &p).unwrap(), h.to_vec());
    }

    #[test]
    fn unit_channel_gives_ones() {
        let p: Vec<Complex<f64>> = [1.0, -1.0].iter().map(|&v| Complex::new(v, 0.0)).collect();
        let h = ls_estimate(&p, &p, &p).unwrap();
        assert!(h.iter().all(|v| *v == Complex::new(1.0, 0.0)));
    }

    #[test]
    fn rejects_zero_preamble() {
        let p = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        assert!(matches!(ls_estimate(&p, &p, &p), Err(Error::ZeroPreamble(1))));
        assert!(ls_estimate(&p[..1], &p, &p).is_err());
    }
}
