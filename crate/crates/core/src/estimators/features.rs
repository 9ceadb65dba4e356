use ndarray::{Array1, ArrayView1};
use num_complex::Complex;

use super::dpa::guarded_div;
use crate::phy::FrameLayout;
use crate::Real;

/// `[re(v), im(v)]` as one real vector.
pub fn stack_re_im<T: Real>(v: &[Complex<T>]) -> Array1<T> {
    let n = v.len();
    Array1::from_shape_fn(2 * n, |j| if j < n { v[j].re } else { v[j - n].im })
}

/// Inverse of [`stack_re_im`].
pub fn unstack_re_im<T: Real>(a: ArrayView1<T>) -> Vec<Complex<T>> {
    let n = a.len() / 2;
    (0..n).map(|j| Complex::new(a[j], a[n + j])).collect()
}

/// Per-symbol LS estimate at the pilots, `y[k] / p[k]`, in pilot order.
pub fn pilot_ls<T: Real>(y: &[Complex<T>], layout: &FrameLayout, pilot_values: &[Complex<T>]) -> Vec<Complex<T>> {
    layout
        .pilot_positions()
        .iter()
        .zip(pilot_values)
        .map(|(&k, &p)| guarded_div(y[k], p).0)
        .collect()
}

/// Active-carrier vector holding `pred_data` on the data carriers and
/// `pilots` on the pilot carriers.
pub fn merge_prediction<T: Real>(pred_data: &[Complex<T>], pilots: &[Complex<T>], layout: &FrameLayout) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); layout.n_active()];
    for (&k, &v) in layout.data_positions().iter().zip(pred_data) {
        out[k] = v;
    }
    for (&k, &v) in layout.pilot_positions().iter().zip(pilots) {
        out[k] = v;
    }
    out
}

/// LSTM-DPA-TA input: the previous estimate on the data carriers and the pilot
/// LS values on the pilot carriers, in active-carrier order, real parts first.
pub fn lstm_dpa_ta_input<T: Real>(prev: &[Complex<T>], pilots: &[Complex<T>], layout: &FrameLayout) -> Array1<T> {
    let data: Vec<Complex<T>> = layout.data_positions().iter().map(|&k| prev[k]).collect();
    stack_re_im(&merge_prediction(&data, pilots, layout))
}

/// LSTM-DNN-DPA input: the previous estimate on all active carriers followed by
/// the pilot LS values, real parts first.
pub fn lstm_dnn_dpa_input<T: Real>(prev: &[Complex<T>], pilots: &[Complex<T>]) -> Array1<T> {
    let joined: Vec<Complex<T>> = prev.iter().chain(pilots).copied().collect();
    stack_re_im(&joined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacking_roundtrip_and_widths() {
        let l = FrameLayout::default();
        let h: Vec<Complex<f64>> = (0..52).map(|k| Complex::new(k as f64, -(k as f64) / 2.0)).collect();
        let a = stack_re_im(&h);
        assert_eq!(a.len(), 104);
        assert_eq!((a[3], a[55]), (3.0, -1.5));
        assert_eq!(unstack_re_im(a.view()), h);

        let p = vec![Complex::new(9.0, 9.0); 4];
        let x = lstm_dpa_ta_input(&h, &p, &l);
        assert_eq!(x.len(), 104);
        let back = unstack_re_im(x.view());
        for (k, v) in back.iter().enumerate() {
            if l.pilot_positions().contains(&k) {
                assert_eq!(*v, p[0]);
            } else {
                assert_eq!(*v, h[k]);
            }
        }
        assert_eq!(lstm_dnn_dpa_input(&h, &p).len(), 112);
    }

    #[test]
    fn pilot_ls_divides_by_pilots() {
        let l = FrameLayout::default();
        let mut y = vec![Complex::new(0.0, 0.0); 52];
        for (j, &k) in l.pilot_positions().iter().enumerate() {
            y[k] = Complex::new(j as f64, 1.0);
        }
        let pv = vec![Complex::new(-1.0, 0.0); 4];
        let ls = pilot_ls(&y, &l, &pv);
        assert_eq!(ls[2], Complex::new(-2.0, -1.0));
    }
}
