use crate::{Error, Real, Result};

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct NaturalSpline<T> {
    x: Vec<T>,
    y: Vec<T>,
    /// Second derivatives at the knots.
    m: Vec<T>,
}

impl<T: Real> NaturalSpline<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n < 2 {
            return Err(Error::Shape(format!("spline needs >= 2 matching knots, got {n}/{}", y.len())));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Shape("spline knots must be strictly increasing".into()));
        }
        let mut m = vec![T::zero(); n];
        if n > 2 {
            // tridiagonal system for the interior second derivatives (Thomas algorithm)
            let inner = n - 2;
            let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let two = T::lit(2.0);
            let six = T::lit(6.0);
            let mut diag = vec![T::zero(); inner];
            let mut rhs = vec![T::zero(); inner];
            for i in 0..inner {
                diag[i] = two * (h[i] + h[i + 1]);
                rhs[i] = six * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..inner {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
            m[inner] = rhs[inner - 1] / diag[inner - 1];
            for i in (0..inner - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    /// Value at `t`; outside the knot range the nearest end value is returned.
    pub fn eval(&self, t: T) -> T {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).expect("finite knots")) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let six = T::lit(6.0);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route: assemble the full (n x n) natural-spline system and
    /// solve it by Gaussian elimination with partial pivoting.
    fn dense_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut a = vec![vec![0.0; n + 1]; n];
        a[0][0] = 1.0;
        a[n - 1][n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i][i - 1] = h0;
            a[i][i] = 2.0 * (h0 + h1);
            a[i][i + 1] = h1;
            a[i][n] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn matches_dense_solve() {
        let x = vec![0.0, 1.0, 2.5, 3.0, 7.0, 8.0, 11.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| (v * 0.7).sin() + 0.1 * v).collect();
        let s = NaturalSpline::new(x.clone(), y.clone()).unwrap();
        let dense = dense_second_derivatives(&x, &y);
        for (a, b) in s.m.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn reproduces_linear_data() {
        let x: Vec<f64> = vec![-20.0, -13.0, -5.0, 2.0, 3.0, 9.0, 26.0];
        let y: Vec<f64> = x.iter().map(|v| 0.25 * v - 1.5).collect();
        let s = NaturalSpline::new(x, y).unwrap();
        for t in [-19.0, -6.5, 0.0, 2.5, 17.0] {
            assert!((s.eval(t) - (0.25 * t - 1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn clamps_outside_the_hull() {
        let s = NaturalSpline::new(vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 1.0, 2.0, -3.0]).unwrap();
        assert_eq!(s.eval(-10.0), 5.0);
        assert_eq!(s.eval(40.0), -3.0);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(NaturalSpline::new(vec![1.0], vec![1.0]).is_err());
        assert!(NaturalSpline::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(NaturalSpline::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
