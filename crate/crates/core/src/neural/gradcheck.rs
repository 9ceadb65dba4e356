use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{loss_and_grad, Model, Sample};
use crate::{Error, Result};

/// Central-difference step.
pub const GRAD_CHECK_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    /// Parameter index with the largest error.
    pub worst_index: usize,
}

/// Compares analytic gradients against central differences on `count`
/// randomly chosen parameters (all of them when `count` exceeds the total).
pub fn grad_check(model: &Model<f64>, batch: &[&Sample<f64>], count: usize, seed: u64) -> Result<GradCheckReport> {
    let (_, grad) = loss_and_grad(model, batch)?;
    let total = model.num_params();
    if total == 0 {
        return Err(Error::Shape("model has no parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, total, count.min(total));
    let mut probe = model.clone();
    let mut report = GradCheckReport {
        checked: 0,
        max_rel_error: 0.0,
        worst_index: 0,
    };
    for idx in picks.iter() {
        let w = model.param(idx);
        probe.set_param(idx, w + GRAD_CHECK_STEP);
        let (lp, _) = loss_and_grad(&probe, batch)?;
        probe.set_param(idx, w - GRAD_CHECK_STEP);
        let (lm, _) = loss_and_grad(&probe, batch)?;
        probe.set_param(idx, w);
        let numeric = (lp - lm) / (2.0 * GRAD_CHECK_STEP);
        let analytic = grad.param(idx);
        let scale = numeric.abs().max(analytic.abs());
        let err = if scale < 1e-9 {
            (numeric - analytic).abs()
        } else {
            (numeric - analytic).abs() / scale
        };
        if err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst_index = idx;
        }
        report.checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{LstmParams, MlpParams};
    use ndarray::Array2;
    use rand::Rng;

    fn samples(n: usize, steps: usize, k_in: usize, k_out: usize, seed: u64) -> Vec<Sample<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Sample {
                inputs: Array2::from_shape_fn((steps, k_in), |_| rng.random_range(-1.0..1.0)),
                targets: Array2::from_shape_fn((steps, k_out), |_| rng.random_range(-1.0..1.0)),
            })
            .collect()
    }

    #[test]
    fn lstm_gradients_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = Model::Lstm(LstmParams::new(6, 5, &[7], 4, &mut rng).unwrap());
        let data = samples(3, 4, 6, 4, 6);
        let batch: Vec<_> = data.iter().collect();
        let r = grad_check(&model, &batch, 10_000, 1).unwrap();
        assert_eq!(r.checked, model.num_params());
        assert!(r.max_rel_error < 1e-4, "{r:?}");
    }

    #[test]
    fn mlp_gradients_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let model = Model::Mlp(MlpParams::new(&[5, 6, 6, 3], &mut rng).unwrap());
        let data = samples(4, 2, 5, 3, 8);
        let batch: Vec<_> = data.iter().collect();
        let r = grad_check(&model, &batch, 10_000, 2).unwrap();
        assert!(r.max_rel_error < 1e-4, "{r:?}");
    }
}
