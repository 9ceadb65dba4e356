use num_complex::Complex;

use super::dpa::guarded_div;
use super::spline::NaturalSpline;
use crate::phy::{Constellation, FrameLayout};
use crate::{Real, Result};

/// Output of one time-reliability frequency-interpolation update.
#[derive(Debug, Clone, PartialEq)]
pub struct TrfiOutput<T> {
    pub estimate: Vec<Complex<T>>,
    /// Reliable subcarriers (centered indices).
    pub reliable: Vec<usize>,
    /// Unreliable subcarriers (centered indices).
    pub unreliable: Vec<usize>,
    pub flagged: usize,
}

/// Minimum number of reliable carriers for cubic interpolation.
pub const TRFI_MIN_RELIABLE: usize = 4;

/// Splits the active carriers by re-demapping the previous received symbol with
/// the current DPA estimate and with the previous TRFI estimate. Carriers where
/// both decisions agree keep the DPA value; the rest are filled by a natural
/// cubic spline through the reliable ones (clamped outside their span). With
/// fewer than [`TRFI_MIN_RELIABLE`] reliable carriers the DPA estimate is returned.
pub fn trfi_step<T: Real>(
    y_prev: &[Complex<T>],
    h_trfi_prev: &[Complex<T>],
    h_dpa: &[Complex<T>],
    constellation: &Constellation<T>,
    layout: &FrameLayout,
) -> Result<TrfiOutput<T>> {
    let pilot_pos = layout.pilot_positions();
    let mut flagged = 0;
    let mut reliable_pos = Vec::with_capacity(h_dpa.len());
    let mut unreliable_pos = Vec::new();
    for k in 0..h_dpa.len() {
        if pilot_pos.contains(&k) {
            reliable_pos.push(k);
            continue;
        }
        let (a, f1) = guarded_div(y_prev[k], h_dpa[k]);
        let (b, f2) = guarded_div(y_prev[k], h_trfi_prev[k]);
        flagged += f1 as usize + f2 as usize;
        if constellation.nearest_label(a) == constellation.nearest_label(b) {
            reliable_pos.push(k);
        } else {
            unreliable_pos.push(k);
        }
    }

    let mut estimate = h_dpa.to_vec();
    if !unreliable_pos.is_empty() && reliable_pos.len() >= TRFI_MIN_RELIABLE {
        let xs: Vec<T> = reliable_pos
            .iter()
            .map(|&k| T::from_usize(layout.active[k]).unwrap())
            .collect();
        let re = NaturalSpline::new(xs.clone(), reliable_pos.iter().map(|&k| h_dpa[k].re).collect())?;
        let im = NaturalSpline::new(xs, reliable_pos.iter().map(|&k| h_dpa[k].im).collect())?;
        for &k in &unreliable_pos {
            let t = T::from_usize(layout.active[k]).unwrap();
            estimate[k] = Complex::new(re.eval(t), im.eval(t));
        }
    }
    Ok(TrfiOutput {
        estimate,
        reliable: reliable_pos.iter().map(|&k| layout.active[k]).collect(),
        unreliable: unreliable_pos.iter().map(|&k| layout.active[k]).collect(),
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Modulation;

    fn setup() -> (FrameLayout, Constellation<f64>) {
        (FrameLayout::default(), Constellation::new(Modulation::Qam16))
    }

    #[test]
    fn agreement_everywhere_returns_dpa() {
        let (l, c) = setup();
        let h: Vec<Complex<f64>> = (0..52).map(|k| Complex::new(1.0, k as f64 * 0.01)).collect();
        let y: Vec<Complex<f64>> = h.iter().map(|h| h * c.point(3)).collect();
        let out = trfi_step(&y, &h, &h, &c, &l).unwrap();
        assert!(out.unreliable.is_empty());
        assert_eq!(out.reliable, l.active);
        assert_eq!(out.estimate, h);
    }

    #[test]
    fn interior_unreliable_carrier_is_interpolated() {
        let (l, c) = setup();
        // linear channel in the subcarrier index
        let truth: Vec<Complex<f64>> = l
            .active
            .iter()
            .map(|&k| Complex::new(0.5 + 0.01 * k as f64, -0.2 + 0.005 * k as f64))
            .collect();
        let x = c.point(0);
        let y: Vec<Complex<f64>> = truth.iter().map(|h| h * x).collect();
        let mut dpa = truth.clone();
        let bad = 20; // a data carrier
        assert!(!l.pilot_positions().contains(&bad));
        dpa[bad] = -truth[bad]; // flips the decision on that carrier
        let out = trfi_step(&y, &truth, &dpa, &c, &l).unwrap();
        assert_eq!(out.unreliable, vec![l.active[bad]]);
        assert!((out.estimate[bad] - truth[bad]).norm() < 1e-12);
        assert_eq!(out.reliable.len() + out.unreliable.len(), 52);
    }

    #[test]
    fn edge_carrier_clamps_to_nearest_reliable() {
        let (l, c) = setup();
        let truth: Vec<Complex<f64>> = (0..52).map(|k| Complex::new(1.0 + k as f64 * 0.1, 0.0)).collect();
        let x = c.point(0);
        let y: Vec<Complex<f64>> = truth.iter().map(|h| h * x).collect();
        let mut dpa = truth.clone();
        dpa[0] = -truth[0];
        let out = trfi_step(&y, &truth, &dpa, &c, &l).unwrap();
        assert_eq!(out.unreliable, vec![l.active[0]]);
        assert_eq!(out.estimate[0], truth[1]);
    }

    #[test]
    fn too_few_reliable_falls_back_to_dpa() {
        let (l, c) = setup();
        let h = vec![Complex::new(1.0, 0.0); 52];
        let y = vec![c.point(0); 52];
        // previous TRFI estimate rotated by pi: every data decision disagrees
        let other = vec![Complex::new(-1.0, 0.0); 52];
        let out = trfi_step(&y, &other, &h, &c, &l).unwrap();
        assert_eq!(out.reliable.len(), 4); // pilots only
        let out2 = {
            let mut l2 = l.clone();
            l2.pilots.truncate(3);
            l2.data = l2.active.iter().copied().filter(|k| !l2.pilots.contains(k)).collect();
            trfi_step(&y, &other, &h, &c, &l2).unwrap()
        };
        assert_eq!(out2.reliable.len(), 3);
        assert_eq!(out2.estimate, h);
    }
}
