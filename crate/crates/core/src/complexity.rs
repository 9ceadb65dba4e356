//! Real-valued operation counts of the learned estimators.
//!
//! Counts follow the per-gate itemization of the LSTM (each gate: `P^2 + P K_in`
//! multiplications and `3P + K_in - 2` additions, plus `3P` multiplications and
//! `P` additions for the state update), `sum N_{l-1} N_l` multiplications and as
//! many additions for a dense network, `(18 K_d, 8 K_d)` for a DPA update and
//! `(2 K_on, 2 K_on)` for temporal averaging.

use std::fmt;
use std::ops::Add;

use crate::estimators::EstimatorKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCount {
    pub mul_div: u64,
    pub add_sub: u64,
}

impl OpCount {
    pub const fn new(mul_div: u64, add_sub: u64) -> Self {
        Self { mul_div, add_sub }
    }

    pub fn total(self) -> u64 {
        self.mul_div + self.add_sub
    }
}

impl Add for OpCount {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.mul_div + o.mul_div, self.add_sub + o.add_sub)
    }
}

/// Dense network with layer widths `N_0 .. N_{L+1}`.
pub fn dnn_ops(sizes: &[usize]) -> Result<OpCount> {
    if sizes.len() < 2 {
        return Err(Error::Parameter("a dense network needs at least two layer sizes".into()));
    }
    let s: u64 = sizes.windows(2).map(|w| (w[0] * w[1]) as u64).sum();
    Ok(OpCount::new(s, s))
}

/// One LSTM step with `p` hidden units and `k_in` inputs, readout excluded.
pub fn lstm_ops(p: usize, k_in: usize) -> Result<OpCount> {
    if p == 0 || k_in == 0 {
        return Err(Error::Parameter(format!("LSTM dimensions P={p}, K_in={k_in}")));
    }
    let (p, k) = (p as u64, k_in as u64);
    Ok(OpCount::new(4 * (p * p + p * k) + 3 * p, 4 * (3 * p + k - 2) + p))
}

/// Closed-form total `4(P^2 + P K_in + 3P + K_in - 2) + 4P`.
pub fn lstm_total(p: usize, k_in: usize) -> Result<u64> {
    if p == 0 || k_in == 0 {
        return Err(Error::Parameter(format!("LSTM dimensions P={p}, K_in={k_in}")));
    }
    let (p, k) = (p as u64, k_in as u64);
    Ok(4 * (p * p + p * k + 3 * p + k - 2) + 4 * p)
}

pub fn dpa_ops(k_d: usize) -> OpCount {
    OpCount::new(18 * k_d as u64, 8 * k_d as u64)
}

pub fn ta_ops(k_on: usize) -> OpCount {
    OpCount::new(2 * k_on as u64, 2 * k_on as u64)
}

/// Network dimensions entering the estimator totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims {
    /// LSTM hidden units.
    pub p: usize,
    /// LSTM input width.
    pub k_in: usize,
    pub k_on: usize,
    pub k_d: usize,
    /// Hidden widths of the dense stage between LSTM and DPA.
    pub dnn_hidden: Vec<usize>,
}

impl Dims {
    /// LSTM-DNN-DPA: `P = 128`, 112 inputs, one hidden layer of 40.
    pub fn lstm_dnn_dpa() -> Self {
        Self {
            p: 128,
            k_in: 112,
            k_on: 52,
            k_d: 48,
            dnn_hidden: vec![40],
        }
    }

    /// LSTM-DPA-TA with `p` hidden units and `2 K_on` inputs.
    pub fn lstm_dpa_ta(p: usize) -> Self {
        Self {
            p,
            k_in: 104,
            k_on: 52,
            k_d: 48,
            dnn_hidden: Vec::new(),
        }
    }
}

/// Per-symbol cost of a learned estimator.
pub fn estimator_total(kind: EstimatorKind, dims: &Dims) -> Result<OpCount> {
    match kind {
        EstimatorKind::LstmDnnDpa => {
            let mut sizes = vec![dims.p];
            sizes.extend(&dims.dnn_hidden);
            sizes.push(2 * dims.k_d);
            Ok(lstm_ops(dims.p, dims.k_in)? + dnn_ops(&sizes)? + dpa_ops(dims.k_d))
        }
        EstimatorKind::LstmDpaTa => Ok(lstm_ops(dims.p, dims.k_in)? + dpa_ops(dims.k_d) + ta_ops(dims.k_on)),
        other => Err(Error::UnknownEstimator(format!("no operation count for {other}"))),
    }
}

/// [`estimator_total`] plus the affine readout from `P` hidden units to the
/// `2 K_d` outputs, which the LSTM-DPA-TA count leaves out.
pub fn estimator_total_with_readout(kind: EstimatorKind, dims: &Dims) -> Result<OpCount> {
    let base = estimator_total(kind, dims)?;
    match kind {
        EstimatorKind::LstmDpaTa => Ok(base + dnn_ops(&[dims.p, 2 * dims.k_d])?),
        _ => Ok(base),
    }
}

/// Relative saving in basis points, truncated: `floor(10000 (base - x) / base)`.
pub fn reduction_bp(base: u64, x: u64) -> i64 {
    if base == 0 {
        return 0;
    }
    let diff = base as i128 - x as i128;
    (10_000 * diff).div_euclid(base as i128) as i64
}

pub fn format_bp(bp: i64) -> String {
    let sign = if bp < 0 { "-" } else { "" };
    let a = bp.unsigned_abs();
    format!("{sign}{}.{:02}%", a / 100, a % 100)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostRow {
    pub label: String,
    pub ops: OpCount,
    pub with_readout: OpCount,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub label: String,
    pub mul_div_bp: i64,
    pub add_sub_bp: i64,
}

/// Costs of LSTM-DNN-DPA and LSTM-DPA-TA (`P` = 128 and 64) and the savings of
/// the latter relative to the former.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub rows: Vec<CostRow>,
    pub reductions: Vec<Reduction>,
}

pub fn reduction_report() -> ComplexityReport {
    let entries = [
        ("LSTM-DNN-DPA", EstimatorKind::LstmDnnDpa, Dims::lstm_dnn_dpa()),
        ("LSTM-DPA-TA (P=128)", EstimatorKind::LstmDpaTa, Dims::lstm_dpa_ta(128)),
        ("LSTM-DPA-TA (P=64)", EstimatorKind::LstmDpaTa, Dims::lstm_dpa_ta(64)),
    ];
    let rows: Vec<CostRow> = entries
        .iter()
        .map(|(label, kind, dims)| CostRow {
            label: label.to_string(),
            ops: estimator_total(*kind, dims).expect("fixed dimensions are valid"),
            with_readout: estimator_total_with_readout(*kind, dims).expect("fixed dimensions are valid"),
        })
        .collect();
    let base = rows[0].ops;
    let reductions = rows[1..]
        .iter()
        .map(|r| Reduction {
            label: r.label.clone(),
            mul_div_bp: reduction_bp(base.mul_div, r.ops.mul_div),
            add_sub_bp: reduction_bp(base.add_sub, r.ops.add_sub),
        })
        .collect();
    ComplexityReport { rows, reductions }
}

impl ComplexityReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("estimator,mul_div,add_sub,mul_div_with_readout,add_sub_with_readout\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{}\n",
                r.label, r.ops.mul_div, r.ops.add_sub, r.with_readout.mul_div, r.with_readout.add_sub
            );
        }
        s
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>10} {:>10}", "estimator", "mul/div", "add/sub")?;
        for r in &self.rows {
            writeln!(f, "{:<22} {:>10} {:>10}", r.label, r.ops.mul_div, r.ops.add_sub)?;
        }
        writeln!(f)?;
        writeln!(f, "reduction vs LSTM-DNN-DPA")?;
        for r in &self.reductions {
            writeln!(
                f,
                "{:<22} {:>10} {:>10}",
                r.label,
                format_bp(r.mul_div_bp),
                format_bp(r.add_sub_bp)
            )?;
        }
        writeln!(f)?;
        writeln!(f, "including the P -> 2K_d readout")?;
        for r in &self.rows {
            writeln!(f, "{:<22} {:>10} {:>10}", r.label, r.with_readout.mul_div, r.with_readout.add_sub)?;
        }
        Ok(())
    }
}
