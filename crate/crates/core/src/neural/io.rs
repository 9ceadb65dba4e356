//! Binary model files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    b"VCHM"
//! version  u32
//! kind     u32            0 = MLP, 1 = LSTM
//! meta     epochs u64, final_loss f64, train_snr_db f64, seed u64,
//!          label_len u32, label utf-8 bytes
//! dims     LSTM: input u32, hidden u32, then the readout MLP table
//!          MLP:  layers u32, then (in u32, out u32, activation u32) per layer
//! weights  f64 blocks, row-major: LSTM w_input, w_recurrent, bias, readout;
//!          MLP per layer weights then bias
//! ```

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Activation, Dense, LstmParams, MlpParams, Model};
use crate::{Error, Real, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"VCHM";
pub const MODEL_VERSION: u32 = 1;

const KIND_MLP: u32 = 0;
const KIND_LSTM: u32 = 1;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelMeta {
    /// Estimator the model was trained for.
    pub label: String,
    pub epochs: u64,
    pub final_loss: f64,
    pub train_snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<T> {
    pub model: Model<T>,
    pub meta: ModelMeta,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn dim(&mut self, v: usize) {
        self.u32(v as u32);
    }
    fn values<T: Real>(&mut self, vals: &[T]) {
        for v in vals {
            self.f64(v.to_f64_lossy());
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::CorruptModel(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn dim(&mut self) -> Result<usize> {
        let d = self.u32()? as usize;
        if d == 0 || d > 1 << 16 {
            return Err(Error::CorruptModel(format!("implausible dimension {d}")));
        }
        Ok(d)
    }
    fn values<T: Real>(&mut self, n: usize) -> Result<Vec<T>> {
        (0..n).map(|_| self.f64().map(T::lit)).collect()
    }
    fn matrix<T: Real>(&mut self, rows: usize, cols: usize) -> Result<Array2<T>> {
        let v = self.values(rows * cols)?;
        Ok(Array2::from_shape_vec((rows, cols), v).expect("length checked"))
    }
}

fn write_mlp_dims<T: Real>(w: &mut Writer, m: &MlpParams<T>) {
    w.dim(m.layers.len());
    for l in &m.layers {
        w.dim(l.inputs());
        w.dim(l.outputs());
        w.u32(l.activation.tag());
    }
}

fn write_mlp_weights<T: Real>(w: &mut Writer, m: &MlpParams<T>) {
    for t in m.tensors() {
        w.values(t);
    }
}

fn read_mlp_dims(r: &mut Reader) -> Result<Vec<(usize, usize, Activation)>> {
    let n = r.dim()?;
    (0..n)
        .map(|_| {
            let (i, o) = (r.dim()?, r.dim()?);
            let tag = r.u32()?;
            let act = Activation::from_tag(tag).ok_or_else(|| Error::CorruptModel(format!("activation tag {tag}")))?;
            Ok((i, o, act))
        })
        .collect()
}

fn read_mlp_weights<T: Real>(r: &mut Reader, dims: &[(usize, usize, Activation)]) -> Result<MlpParams<T>> {
    let layers = dims
        .iter()
        .map(|&(i, o, activation)| {
            Ok(Dense {
                weights: r.matrix(o, i)?,
                bias: Array1::from(r.values(o)?),
                activation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let m = MlpParams { layers };
    m.validate().map_err(|e| Error::CorruptModel(e.to_string()))?;
    Ok(m)
}

/// Serializes a model to bytes.
pub fn encode_model<T: Real>(tm: &TrainedModel<T>) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(&MODEL_MAGIC);
    w.u32(MODEL_VERSION);
    w.u32(match tm.model {
        Model::Mlp(_) => KIND_MLP,
        Model::Lstm(_) => KIND_LSTM,
    });
    let m = &tm.meta;
    w.u64(m.epochs);
    w.f64(m.final_loss);
    w.f64(m.train_snr_db);
    w.u64(m.seed);
    w.u32(m.label.len() as u32);
    w.0.extend_from_slice(m.label.as_bytes());
    match &tm.model {
        Model::Mlp(net) => {
            write_mlp_dims(&mut w, net);
            write_mlp_weights(&mut w, net);
        }
        Model::Lstm(net) => {
            w.dim(net.input_size());
            w.dim(net.hidden_size());
            write_mlp_dims(&mut w, &net.readout);
            w.values(net.w_input.as_slice().expect("standard layout"));
            w.values(net.w_recurrent.as_slice().expect("standard layout"));
            w.values(net.bias.as_slice().expect("standard layout"));
            write_mlp_weights(&mut w, &net.readout);
        }
    }
    w.0
}

/// Parses bytes produced by [`encode_model`].
pub fn decode_model<T: Real>(buf: &[u8]) -> Result<TrainedModel<T>> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4).ok() != Some(&MODEL_MAGIC[..]) {
        return Err(Error::CorruptModel("bad magic".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::ModelVersion {
            expected: MODEL_VERSION,
            found: version,
        });
    }
    let kind = r.u32()?;
    let epochs = r.u64()?;
    let final_loss = r.f64()?;
    let train_snr_db = r.f64()?;
    let seed = r.u64()?;
    let label_len = r.u32()? as usize;
    let label = String::from_utf8(r.take(label_len)?.to_vec()).map_err(|_| Error::CorruptModel("label is not utf-8".into()))?;
    let meta = ModelMeta {
        label,
        epochs,
        final_loss,
        train_snr_db,
        seed,
    };
    let model = match kind {
        KIND_MLP => {
            let dims = read_mlp_dims(&mut r)?;
            Model::Mlp(read_mlp_weights(&mut r, &dims)?)
        }
        KIND_LSTM => {
            let k = r.dim()?;
            let p = r.dim()?;
            let dims = read_mlp_dims(&mut r)?;
            let w_input = r.matrix(4 * p, k)?;
            let w_recurrent = r.matrix(4 * p, p)?;
            let bias = Array1::from(r.values(4 * p)?);
            let readout = read_mlp_weights(&mut r, &dims)?;
            let net = LstmParams {
                w_input,
                w_recurrent,
                bias,
                readout,
            };
            net.validate().map_err(|e| Error::CorruptModel(e.to_string()))?;
            Model::Lstm(net)
        }
        other => return Err(Error::CorruptModel(format!("unknown model kind {other}"))),
    };
    if r.pos != buf.len() {
        return Err(Error::CorruptModel(format!("{} trailing bytes", buf.len() - r.pos)));
    }
    Ok(TrainedModel { model, meta })
}

pub fn save_model<T: Real>(path: &Path, tm: &TrainedModel<T>) -> Result<()> {
    fs::write(path, encode_model(tm)).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Real>(path: &Path) -> Result<TrainedModel<T>> {
    let buf = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingModel(format!("no model file at {}", path.display())),
        _ => Error::io(path, e),
    })?;
    decode_model(&buf)
}
