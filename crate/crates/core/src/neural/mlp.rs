use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::init::glorot;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Relu,
}

impl Activation {
    pub(crate) fn tag(self) -> u32 {
        match self {
            Activation::Linear => 0,
            Activation::Relu => 1,
        }
    }

    pub(crate) fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Activation::Linear),
            1 => Some(Activation::Relu),
            _ => None,
        }
    }

    #[inline]
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Linear => z,
            Activation::Relu => z.max(T::zero()),
        }
    }

    #[inline]
    fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::Linear => T::one(),
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Fully connected layer `act(W x + b)` with `W` of shape `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    pub weights: Array2<T>,
    pub bias: Array1<T>,
    pub activation: Activation,
}

impl<T: Real> Dense<T> {
    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

/// Multilayer perceptron: ReLU hidden layers, linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<T> {
    pub layers: Vec<Dense<T>>,
}

/// Per-layer activations kept for the backward pass.
pub(crate) struct MlpCache<T> {
    /// Layer inputs; `inputs[0]` is the network input.
    inputs: Vec<Array2<T>>,
    pre: Vec<Array2<T>>,
}

impl<T: Real> MlpParams<T> {
    /// Random network with layer sizes `N_0 .. N_{L+1}`.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Shape("an MLP needs at least input and output sizes".into()));
        }
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(l, w)| Dense {
                weights: glorot(w[1], w[0], rng),
                bias: Array1::zeros(w[1]),
                activation: if l == last { Activation::Linear } else { Activation::Relu },
            })
            .collect();
        Ok(Self { layers })
    }

    /// All-zero network of the same shape.
    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Dense {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.len()),
                    activation: l.activation,
                })
                .collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].inputs()];
        s.extend(self.layers.iter().map(|l| l.outputs()));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.outputs()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("MLP without layers".into()));
        }
        for (l, pair) in self.layers.windows(2).enumerate() {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::Shape(format!("MLP layer {l} output does not feed layer {}", l + 1)));
            }
        }
        for l in &self.layers {
            if l.bias.len() != l.outputs() {
                return Err(Error::Shape("MLP bias length".into()));
            }
            if l.weights.iter().chain(l.bias.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Shape("MLP holds non-finite weights".into()));
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: ArrayView1<T>) -> Result<Array1<T>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "MLP input has {} entries, expected {}",
                x.len(),
                self.input_dim()
            )));
        }
        let mut a = x.to_owned();
        for l in &self.layers {
            let act = l.activation;
            a = (l.weights.dot(&a) + &l.bias).mapv(|z| act.apply(z));
        }
        Ok(a)
    }

    /// Row-batched forward pass (`x` is `batch x in`) keeping the cache.
    pub(crate) fn forward_batch(&self, x: ArrayView2<T>) -> (Array2<T>, MlpCache<T>) {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = x.to_owned();
        for l in &self.layers {
            let z = a.dot(&l.weights.t()) + &l.bias;
            let act = l.activation;
            let next = z.mapv(|v| act.apply(v));
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        (a, MlpCache { inputs, pre })
    }

    /// Accumulates parameter gradients into `grad` and returns the gradient with
    /// respect to the network input.
    pub(crate) fn backward_batch(&self, cache: &MlpCache<T>, d_out: Array2<T>, grad: &mut Self) -> Array2<T> {
        let mut d = d_out;
        for (idx, l) in self.layers.iter().enumerate().rev() {
            let act = l.activation;
            let dz = match act {
                Activation::Linear => d,
                _ => {
                    let mut dz = d;
                    dz.zip_mut_with(&cache.pre[idx], |g, &z| *g *= act.derivative(z));
                    dz
                }
            };
            let g = &mut grad.layers[idx];
            g.weights += &dz.t().dot(&cache.inputs[idx]);
            g.bias += &dz.sum_axis(Axis(0));
            d = dz.dot(&l.weights);
        }
        d
    }

    pub(crate) fn tensors(&self) -> Vec<&[T]> {
        self.layers
            .iter()
            .flat_map(|l| {
                [
                    l.weights.as_slice().expect("standard layout"),
                    l.bias.as_slice().expect("standard layout"),
                ]
            })
            .collect()
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                [
                    l.weights.as_slice_mut().expect("standard layout"),
                    l.bias.as_slice_mut().expect("standard layout"),
                ]
            })
            .collect()
    }
}
