use ndarray::{s, Array1, Array2, ArrayView1, Axis, Zip};
use rand::Rng;

use super::init::glorot;
use super::MlpParams;
use crate::{Error, Real, Result};

/// Classical LSTM unit followed by a readout network mapping the hidden state
/// to the output width.
///
/// Gate blocks are stacked row-wise in the order forget, input, candidate,
/// output: rows `g*P .. (g+1)*P` of `w_input` (`4P x K_in`), `w_recurrent`
/// (`4P x P`) and `bias` (`4P`) belong to gate `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<T> {
    pub w_input: Array2<T>,
    pub w_recurrent: Array2<T>,
    pub bias: Array1<T>,
    pub readout: MlpParams<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Forget = 0,
    Input = 1,
    Candidate = 2,
    Output = 3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState<T> {
    pub hidden: Array1<T>,
    pub cell: Array1<T>,
}

impl<T: Real> LstmState<T> {
    pub fn zeros(hidden_size: usize) -> Self {
        Self {
            hidden: Array1::zeros(hidden_size),
            cell: Array1::zeros(hidden_size),
        }
    }
}

#[inline]
fn sigmoid<T: Real>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Forward activations of one training batch.
pub(crate) struct LstmCache<T> {
    xs: Vec<Array2<T>>,
    /// Hidden states h_0 .. h_T (h_0 = 0), each `batch x P`.
    hs: Vec<Array2<T>>,
    cs: Vec<Array2<T>>,
    /// Activated gates per step, `batch x 4P`.
    gates: Vec<Array2<T>>,
    tanh_c: Vec<Array2<T>>,
    readout: super::mlp::MlpCache<T>,
}

impl<T: Real> LstmParams<T> {
    /// Glorot-initialized unit with forget-gate bias 1. `readout_hidden` lists
    /// hidden widths of the readout network (empty for a single affine layer).
    pub fn new<R: Rng + ?Sized>(
        input_size: usize,
        hidden_size: usize,
        readout_hidden: &[usize],
        output_size: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if input_size == 0 || hidden_size == 0 || output_size == 0 {
            return Err(Error::Shape("LSTM dimensions must be positive".into()));
        }
        let p = hidden_size;
        let mut bias = Array1::zeros(4 * p);
        bias.slice_mut(s![0..p]).fill(T::one());
        let mut sizes = vec![p];
        sizes.extend_from_slice(readout_hidden);
        sizes.push(output_size);
        Ok(Self {
            w_input: glorot(4 * p, input_size, rng),
            w_recurrent: glorot(4 * p, p, rng),
            bias,
            readout: MlpParams::new(&sizes, rng)?,
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            w_input: Array2::zeros(self.w_input.raw_dim()),
            w_recurrent: Array2::zeros(self.w_recurrent.raw_dim()),
            bias: Array1::zeros(self.bias.len()),
            readout: self.readout.zeros_like(),
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.w_recurrent.ncols()
    }

    pub fn input_size(&self) -> usize {
        self.w_input.ncols()
    }

    pub fn output_size(&self) -> usize {
        self.readout.output_dim()
    }

    pub fn gate_bias_mut(&mut self, gate: Gate) -> ndarray::ArrayViewMut1<'_, T> {
        let p = self.hidden_size();
        let g = gate as usize;
        self.bias.slice_mut(s![g * p..(g + 1) * p])
    }

    pub fn gate_input_weights_mut(&mut self, gate: Gate) -> ndarray::ArrayViewMut2<'_, T> {
        let p = self.hidden_size();
        let g = gate as usize;
        self.w_input.slice_mut(s![g * p..(g + 1) * p, ..])
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.hidden_size();
        if self.w_recurrent.nrows() != 4 * p || self.w_input.nrows() != 4 * p || self.bias.len() != 4 * p {
            return Err(Error::Shape("LSTM gate blocks are not 4P tall".into()));
        }
        if self.readout.input_dim() != p {
            return Err(Error::Shape("LSTM readout input must equal the hidden size".into()));
        }
        self.readout.validate()?;
        let finite = self
            .w_input
            .iter()
            .chain(self.w_recurrent.iter())
            .chain(self.bias.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Shape("LSTM holds non-finite weights".into()));
        }
        Ok(())
    }

    /// One LSTM time step; returns the new hidden state (also stored in the
    /// returned state).
    pub fn cell(&self, x: ArrayView1<T>, state: &LstmState<T>) -> Result<(Array1<T>, LstmState<T>)> {
        let p = self.hidden_size();
        if x.len() != self.input_size() {
            return Err(Error::Shape(format!(
                "LSTM input has {} entries, expected {}",
                x.len(),
                self.input_size()
            )));
        }
        if state.hidden.len() != p || state.cell.len() != p {
            return Err(Error::Shape("LSTM state size differs from hidden size".into()));
        }
        let z = self.w_input.dot(&x) + self.w_recurrent.dot(&state.hidden) + &self.bias;
        let f = z.slice(s![0..p]).mapv(sigmoid);
        let i = z.slice(s![p..2 * p]).mapv(sigmoid);
        let g = z.slice(s![2 * p..3 * p]).mapv(|v| v.tanh());
        let o = z.slice(s![3 * p..4 * p]).mapv(sigmoid);
        let cell = &f * &state.cell + &i * &g;
        let hidden = &o * &cell.mapv(|v| v.tanh());
        Ok((hidden.clone(), LstmState { hidden, cell }))
    }

    /// Cell step followed by the readout.
    pub fn step(&self, x: ArrayView1<T>, state: &mut LstmState<T>) -> Result<Array1<T>> {
        let (h, next) = self.cell(x, state)?;
        *state = next;
        self.readout.forward(h.view())
    }

    /// Runs a sequence from the zero state and returns the readout per step.
    pub fn forward_seq(&self, inputs: &[Array1<T>]) -> Result<Vec<Array1<T>>> {
        if inputs.is_empty() {
            return Err(Error::Shape("empty LSTM input sequence".into()));
        }
        let mut state = LstmState::zeros(self.hidden_size());
        inputs.iter().map(|x| self.step(x.view(), &mut state)).collect()
    }

    /// Batched forward pass over `xs[t]` (`batch x K_in` per step).
    pub(crate) fn forward_batch(&self, xs: &[Array2<T>]) -> (Vec<Array2<T>>, LstmCache<T>) {
        let steps = xs.len();
        let batch = xs[0].nrows();
        let p = self.hidden_size();
        let mut hs = Vec::with_capacity(steps + 1);
        let mut cs = Vec::with_capacity(steps + 1);
        let mut gates = Vec::with_capacity(steps);
        let mut tanh_c = Vec::with_capacity(steps);
        hs.push(Array2::zeros((batch, p)));
        cs.push(Array2::zeros((batch, p)));
        for x in xs {
            let mut z = x.dot(&self.w_input.t()) + hs.last().unwrap().dot(&self.w_recurrent.t()) + &self.bias;
            z.slice_mut(s![.., 0..2 * p]).mapv_inplace(sigmoid);
            z.slice_mut(s![.., 2 * p..3 * p]).mapv_inplace(|v| v.tanh());
            z.slice_mut(s![.., 3 * p..4 * p]).mapv_inplace(sigmoid);
            let c_prev = cs.last().unwrap();
            let mut c = Array2::zeros((batch, p));
            Zip::from(&mut c)
                .and(z.slice(s![.., 0..p]))
                .and(c_prev)
                .and(z.slice(s![.., p..2 * p]))
                .and(z.slice(s![.., 2 * p..3 * p]))
                .for_each(|c, &f, &cp, &i, &g| *c = f * cp + i * g);
            let tc = c.mapv(|v| v.tanh());
            let h = &z.slice(s![.., 3 * p..4 * p]) * &tc;
            hs.push(h);
            cs.push(c);
            gates.push(z);
            tanh_c.push(tc);
        }
        // readout over all steps at once
        let mut stacked = Array2::zeros((steps * batch, p));
        for (t, h) in hs[1..].iter().enumerate() {
            stacked.slice_mut(s![t * batch..(t + 1) * batch, ..]).assign(h);
        }
        let (y, readout_cache) = self.readout.forward_batch(stacked.view());
        let outputs = (0..steps)
            .map(|t| y.slice(s![t * batch..(t + 1) * batch, ..]).to_owned())
            .collect();
        (
            outputs,
            LstmCache {
                xs: xs.to_vec(),
                hs,
                cs,
                gates,
                tanh_c,
                readout: readout_cache,
            },
        )
    }

    /// Backpropagation through time; accumulates into `grad`.
    pub(crate) fn backward_batch(&self, cache: &LstmCache<T>, d_outputs: &[Array2<T>], grad: &mut Self) {
        let steps = d_outputs.len();
        let batch = d_outputs[0].nrows();
        let p = self.hidden_size();
        let mut d_y = Array2::zeros((steps * batch, self.output_size()));
        for (t, d) in d_outputs.iter().enumerate() {
            d_y.slice_mut(s![t * batch..(t + 1) * batch, ..]).assign(d);
        }
        let d_h_readout = self.readout.backward_batch(&cache.readout, d_y, &mut grad.readout);

        let one = T::one();
        let mut dh_next: Array2<T> = Array2::zeros((batch, p));
        let mut dc_next: Array2<T> = Array2::zeros((batch, p));
        let mut dz = Array2::zeros((batch, 4 * p));
        for t in (0..steps).rev() {
            let gates = &cache.gates[t];
            let dh = &d_h_readout.slice(s![t * batch..(t + 1) * batch, ..]) + &dh_next;
            let tc = &cache.tanh_c[t];
            let c_prev = &cache.cs[t];

            // dc = dc_next + dh * o * (1 - tanh(c)^2)
            let mut dc = dc_next;
            Zip::from(&mut dc)
                .and(&dh)
                .and(gates.slice(s![.., 3 * p..4 * p]))
                .and(tc)
                .for_each(|dc, &dh, &o, &tc| *dc += dh * o * (one - tc * tc));

            let (mut dzf, rest) = dz.view_mut().split_at(Axis(1), p);
            let (mut dzi, rest) = rest.split_at(Axis(1), p);
            let (mut dzg, mut dzo) = rest.split_at(Axis(1), p);
            Zip::from(&mut dzf)
                .and(&dc)
                .and(c_prev)
                .and(gates.slice(s![.., 0..p]))
                .for_each(|d, &dc, &cp, &f| *d = dc * cp * f * (one - f));
            Zip::from(&mut dzi)
                .and(&dc)
                .and(gates.slice(s![.., 2 * p..3 * p]))
                .and(gates.slice(s![.., p..2 * p]))
                .for_each(|d, &dc, &g, &i| *d = dc * g * i * (one - i));
            Zip::from(&mut dzg)
                .and(&dc)
                .and(gates.slice(s![.., p..2 * p]))
                .and(gates.slice(s![.., 2 * p..3 * p]))
                .for_each(|d, &dc, &i, &g| *d = dc * i * (one - g * g));
            Zip::from(&mut dzo)
                .and(&dh)
                .and(tc)
                .and(gates.slice(s![.., 3 * p..4 * p]))
                .for_each(|d, &dh, &tc, &o| *d = dh * tc * o * (one - o));

            let mut dcp = dc;
            Zip::from(&mut dcp)
                .and(gates.slice(s![.., 0..p]))
                .for_each(|d, &f| *d *= f);
            dc_next = dcp;

            grad.w_input += &dz.t().dot(&cache.xs[t]);
            grad.w_recurrent += &dz.t().dot(&cache.hs[t]);
            grad.bias += &dz.sum_axis(Axis(0));
            dh_next = dz.dot(&self.w_recurrent);
        }
    }

    pub(crate) fn tensors(&self) -> Vec<&[T]> {
        let mut v = vec![
            self.w_input.as_slice().expect("standard layout"),
            self.w_recurrent.as_slice().expect("standard layout"),
            self.bias.as_slice().expect("standard layout"),
        ];
        v.extend(self.readout.tensors());
        v
    }

    pub(crate) fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut v = vec![
            self.w_input.as_slice_mut().expect("standard layout"),
            self.w_recurrent.as_slice_mut().expect("standard layout"),
            self.bias.as_slice_mut().expect("standard layout"),
        ];
        v.extend(self.readout.tensors_mut());
        v
    }
}
