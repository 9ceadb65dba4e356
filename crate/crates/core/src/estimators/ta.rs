use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Pow};

use crate::{Error, Real, Result};

/// Temporal averaging: `(1 - 1/alpha) prev + (1/alpha) new`, elementwise.
pub fn ta_step<T: Real>(prev: &[Complex<T>], new: &[Complex<T>], alpha: T) -> Vec<Complex<T>> {
    let w_new = alpha.recip();
    let w_prev = T::one() - w_new;
    prev.iter()
        .zip(new)
        .map(|(p, n)| p * w_prev + n * w_new)
        .collect()
}

/// Noise-power ratio after `q - 1` averaging steps with `alpha = 2`, starting
/// from an estimate with unit relative noise power:
/// `(4^(q-1) + 2) / (3 * 4^(q-1))`, exact.
pub fn ta_noise_ratio(q: u64) -> Result<BigRational> {
    if q < 1 {
        return Err(Error::SymbolIndex(q));
    }
    let p = Pow::pow(BigInt::from(4), q - 1);
    Ok(BigRational::new(&p + BigInt::from(2), p * BigInt::from(3)))
}

/// The same ratio through the recursion `R_1 = 1`, `R_q = R_{q-1} / 4 + 1 / 4`.
pub fn ta_noise_ratio_recursive(q: u64) -> Result<BigRational> {
    if q < 1 {
        return Err(Error::SymbolIndex(q));
    }
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut r = BigRational::one();
    for _ in 1..q {
        r = &r * &quarter + &quarter;
    }
    Ok(r)
}

/// Floating-point evaluation of [`ta_noise_ratio`].
pub fn ta_noise_ratio_real<T: Real>(q: u64) -> Result<T> {
    if q < 1 {
        return Err(Error::SymbolIndex(q));
    }
    let inv = T::lit(0.25).powi((q - 1) as i32);
    Ok((T::one() + T::lit(2.0) * inv) / T::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn midpoint_and_memoryless() {
        let z = Complex::new(0.3, -0.4);
        let out = ta_step(&[Complex::new(0.0, 0.0)], &[z * 2.0], 2.0);
        assert_eq!(out[0], z);
        let out = ta_step(&[Complex::new(5.0, 5.0)], &[z], 1.0);
        assert_eq!(out[0], z);
    }

    #[test]
    fn three_steps_unroll() {
        // start at a, feed b then c with alpha = 2: c/2 + b/4 + a/4
        let (a, b, c) = (Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-2.0, 3.0));
        let s1 = ta_step(&[a], &[b], 2.0);
        let s2 = ta_step(&s1, &[c], 2.0);
        let want = a * 0.25 + b * 0.25 + c * 0.5;
        assert!((s2[0] - want).norm() < 1e-15);
    }

    #[test]
    fn first_values() {
        assert_eq!(ta_noise_ratio(1).unwrap(), rat(1, 1));
        assert_eq!(ta_noise_ratio(2).unwrap(), rat(1, 2));
        assert_eq!(ta_noise_ratio(3).unwrap(), rat(3, 8));
        assert!(matches!(ta_noise_ratio(0), Err(Error::SymbolIndex(0))));
        assert!(ta_noise_ratio_recursive(0).is_err());
    }

    #[test]
    fn closed_form_equals_recursion() {
        let third = rat(1, 3);
        let mut prev: Option<BigRational> = None;
        for q in 1..=51 {
            let closed = ta_noise_ratio(q).unwrap();
            assert_eq!(closed, ta_noise_ratio_recursive(q).unwrap(), "q = {q}");
            assert!(closed > third);
            if let Some(p) = prev {
                assert!(closed < p);
            }
            let f: f64 = ta_noise_ratio_real(q).unwrap();
            let exact = num_traits::ToPrimitive::to_f64(&closed).unwrap();
            assert!((f - exact).abs() < 1e-15);
            prev = Some(closed);
        }
    }

    #[test]
    fn series_form_agrees() {
        // (1/4)^(q-1) + sum_{j=2..q} (1/4)^(q-j+1)
        let quarter = rat(1, 4);
        for q in 1..=20u64 {
            let mut s = Pow::pow(&quarter, (q - 1) as u32);
            for j in 2..=q {
                s += Pow::pow(&quarter, (q - j + 1) as u32);
            }
            assert_eq!(s, ta_noise_ratio(q).unwrap());
        }
    }

    proptest! {
        #[test]
        fn convex_bounds(prev in -10.0f64..10.0, new in -10.0f64..10.0, alpha in 1.0f64..50.0) {
            let out = ta_step(&[Complex::new(prev, 0.0)], &[Complex::new(new, 0.0)], alpha)[0].re;
            prop_assert!(out >= prev.min(new) - 1e-12 && out <= prev.max(new) + 1e-12);
            let same = ta_step(&[Complex::new(prev, new)], &[Complex::new(prev, new)], alpha)[0];
            prop_assert!((same - Complex::new(prev, new)).norm() < 1e-12);
        }
    }
}
