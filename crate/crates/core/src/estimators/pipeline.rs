use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::dpa::dpa_step;
use super::features::{lstm_dnn_dpa_input, lstm_dpa_ta_input, merge_prediction, pilot_ls, stack_re_im, unstack_re_im};
use super::ls::ls_estimate;
use super::sta::{sta_step, StaConfig};
use super::ta::ta_step;
use super::trace::EstimateTrace;
use super::trfi::trfi_step;
use crate::neural::{LstmParams, LstmState, MlpParams};
use crate::phy::{Constellation, FrameGrid, FrameLayout};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Ls,
    Dpa,
    Sta,
    Trfi,
    StaDnn,
    TrfiDnn,
    LstmDnnDpa,
    LstmDpaTa,
    /// True channel; only meaningful inside the simulation harness.
    Perfect,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 9] = [
        EstimatorKind::Ls,
        EstimatorKind::Dpa,
        EstimatorKind::Sta,
        EstimatorKind::Trfi,
        EstimatorKind::StaDnn,
        EstimatorKind::TrfiDnn,
        EstimatorKind::LstmDnnDpa,
        EstimatorKind::LstmDpaTa,
        EstimatorKind::Perfect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Dpa => "dpa",
            EstimatorKind::Sta => "sta",
            EstimatorKind::Trfi => "trfi",
            EstimatorKind::StaDnn => "sta-dnn",
            EstimatorKind::TrfiDnn => "trfi-dnn",
            EstimatorKind::LstmDnnDpa => "lstm-dnn-dpa",
            EstimatorKind::LstmDpaTa => "lstm-dpa-ta",
            EstimatorKind::Perfect => "perfect",
        }
    }

    pub fn is_learned(self) -> bool {
        matches!(
            self,
            EstimatorKind::StaDnn | EstimatorKind::TrfiDnn | EstimatorKind::LstmDnnDpa | EstimatorKind::LstmDpaTa
        )
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        let t = if t == "ls-only" { "ls".to_string() } else { t };
        Self::ALL
            .into_iter()
            .find(|k| k.name() == t)
            .ok_or_else(|| Error::UnknownEstimator(s.to_string()))
    }
}

/// What the LSTM of LSTM-DPA-TA sees as the previous data-carrier channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feedback {
    /// The temporally averaged output estimate.
    #[default]
    Smoothed,
    /// The raw LSTM prediction of the previous step.
    LstmOutput,
}

/// Which received symbol supplies the pilot LS values of the LSTM input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PilotFeed {
    #[default]
    Current,
    Previous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub sta: StaConfig,
    /// Time weight of the LSTM-DPA-TA averaging stage.
    pub ta_alpha: f64,
    pub feedback: Feedback,
    pub pilot_feed: PilotFeed,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            sta: StaConfig::default(),
            ta_alpha: 2.0,
            feedback: Feedback::Smoothed,
            pilot_feed: PilotFeed::Current,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        self.sta.validate()?;
        if !(self.ta_alpha >= 1.0 && self.ta_alpha.is_finite()) {
            return Err(Error::Parameter(format!("TA alpha {} must be >= 1", self.ta_alpha)));
        }
        Ok(())
    }
}

/// Trained networks for the learned estimators.
#[derive(Debug, Clone, Default)]
pub struct Models<T> {
    pub lstm_dpa_ta: Option<LstmParams<T>>,
    pub lstm_dnn_dpa: Option<LstmParams<T>>,
    pub sta_dnn: Option<MlpParams<T>>,
    pub trfi_dnn: Option<MlpParams<T>>,
}

fn require<M>(m: &Option<M>, kind: EstimatorKind) -> Result<&M> {
    m.as_ref().ok_or_else(|| Error::MissingModel(format!("{kind} has no trained network loaded")))
}

fn check_model_dims(
    kind: EstimatorKind,
    input: usize,
    output: usize,
    want_in: usize,
    want_out: usize,
) -> Result<()> {
    if input != want_in || output != want_out {
        return Err(Error::ModelShape(format!(
            "{kind} model maps {input} -> {output}, expected {want_in} -> {want_out}"
        )));
    }
    Ok(())
}

fn start<T: Real>(kind: EstimatorKind, grid: &FrameGrid<T>) -> Result<EstimateTrace<T>> {
    let ls = ls_estimate(&grid.preamble_rx[0], &grid.preamble_rx[1], &grid.preamble)?;
    Ok(EstimateTrace::start(kind.name(), ls, grid.preamble.clone(), grid.symbols()))
}

fn dpa<T: Real>(
    trace: &mut EstimateTrace<T>,
    y: &[Complex<T>],
    divisor: &[Complex<T>],
    grid: &FrameGrid<T>,
    layout: &FrameLayout,
    c: &Constellation<T>,
) -> Vec<Complex<T>> {
    let out = dpa_step(y, divisor, c, &layout.data_positions(), &layout.pilot_positions(), &grid.pilot_values);
    trace.flagged += out.flagged;
    trace.decisions.push(out.decisions);
    out.estimate
}

/// Runs one of the reference estimators over a received frame.
pub fn run_baseline<T: Real>(
    grid: &FrameGrid<T>,
    kind: EstimatorKind,
    models: &Models<T>,
    cfg: &EstimatorConfig,
    layout: &FrameLayout,
    c: &Constellation<T>,
) -> Result<EstimateTrace<T>> {
    cfg.validate()?;
    let mut trace = start(kind, grid)?;
    let n_on = layout.n_active();
    match kind {
        EstimatorKind::Ls => {
            let ls = trace.ls().to_vec();
            for y in &grid.data_rx {
                dpa(&mut trace, y, &ls, grid, layout, c);
                trace.estimates.push(ls.clone());
            }
        }
        EstimatorKind::Dpa => {
            for y in &grid.data_rx {
                let prev = trace.estimates.last().unwrap().clone();
                let est = dpa(&mut trace, y, &prev, grid, layout, c);
                trace.estimates.push(est);
            }
        }
        EstimatorKind::Sta | EstimatorKind::StaDnn => {
            for y in &grid.data_rx {
                let prev = trace.estimates.last().unwrap().clone();
                let h_dpa = dpa(&mut trace, y, &prev, grid, layout, c);
                trace.estimates.push(sta_step(&prev, &h_dpa, &cfg.sta));
            }
        }
        EstimatorKind::Trfi | EstimatorKind::TrfiDnn => {
            let mut reliable = vec![Vec::new()];
            let mut unreliable = vec![Vec::new()];
            for (i, y) in grid.data_rx.iter().enumerate() {
                let prev = trace.estimates.last().unwrap().clone();
                let h_dpa = dpa(&mut trace, y, &prev, grid, layout, c);
                if i == 0 {
                    reliable.push(layout.active.clone());
                    unreliable.push(Vec::new());
                    trace.estimates.push(h_dpa);
                } else {
                    let out = trfi_step(&grid.data_rx[i - 1], &prev, &h_dpa, c, layout)?;
                    trace.flagged += out.flagged;
                    reliable.push(out.reliable);
                    unreliable.push(out.unreliable);
                    trace.estimates.push(out.estimate);
                }
            }
            trace.reliable = Some(reliable);
            trace.unreliable = Some(unreliable);
        }
        EstimatorKind::LstmDnnDpa => {
            let net = require(&models.lstm_dnn_dpa, kind)?;
            let n_p = layout.n_pilots();
            check_model_dims(kind, net.input_size(), net.output_size(), 2 * (n_on + n_p), 2 * layout.n_data())?;
            let mut state = LstmState::zeros(net.hidden_size());
            for y in &grid.data_rx {
                let prev = trace.estimates.last().unwrap().clone();
                let pilots = pilot_ls(y, layout, &grid.pilot_values);
                let pred = net.step(lstm_dnn_dpa_input(&prev, &pilots).view(), &mut state)?;
                let divisor = merge_prediction(&unstack_re_im(pred.view()), &pilots, layout);
                let est = dpa(&mut trace, y, &divisor, grid, layout, c);
                trace.estimates.push(est);
            }
        }
        EstimatorKind::LstmDpaTa => {
            let net = require(&models.lstm_dpa_ta, kind)?;
            return run_lstm_dpa_ta(grid, net, cfg, layout, c);
        }
        EstimatorKind::Perfect => {
            return Err(Error::Unsupported("the perfect-CSI estimator needs the true channel".into()));
        }
    }

    // post-correction networks refine each estimate without feeding back
    let post = match kind {
        EstimatorKind::StaDnn => Some(require(&models.sta_dnn, kind)?),
        EstimatorKind::TrfiDnn => Some(require(&models.trfi_dnn, kind)?),
        _ => None,
    };
    if let Some(net) = post {
        check_model_dims(kind, net.input_dim(), net.output_dim(), 2 * n_on, 2 * n_on)?;
        for est in trace.estimates.iter_mut().skip(1) {
            let out = net.forward(stack_re_im(est).view())?;
            *est = unstack_re_im(out.view());
        }
    }
    Ok(trace)
}

/// LSTM prediction, DPA re-estimation and temporal averaging, symbol by symbol.
pub fn run_lstm_dpa_ta<T: Real>(
    grid: &FrameGrid<T>,
    net: &LstmParams<T>,
    cfg: &EstimatorConfig,
    layout: &FrameLayout,
    c: &Constellation<T>,
) -> Result<EstimateTrace<T>> {
    cfg.validate()?;
    let kind = EstimatorKind::LstmDpaTa;
    check_model_dims(kind, net.input_size(), net.output_size(), 2 * layout.n_active(), 2 * layout.n_data())?;
    let mut trace = start(kind, grid)?;
    let alpha = T::lit(cfg.ta_alpha);
    let mut state = LstmState::zeros(net.hidden_size());
    let mut feedback = trace.ls().to_vec();
    let ls_pilots: Vec<Complex<T>> = layout.pilot_positions().iter().map(|&k| trace.ls()[k]).collect();
    for (i, y) in grid.data_rx.iter().enumerate() {
        let current = pilot_ls(y, layout, &grid.pilot_values);
        let fed_pilots = match cfg.pilot_feed {
            PilotFeed::Current => current.clone(),
            PilotFeed::Previous if i == 0 => ls_pilots.clone(),
            PilotFeed::Previous => pilot_ls(&grid.data_rx[i - 1], layout, &grid.pilot_values),
        };
        let pred = net.step(lstm_dpa_ta_input(&feedback, &fed_pilots, layout).view(), &mut state)?;
        let divisor = merge_prediction(&unstack_re_im(pred.view()), &current, layout);
        let h_dpa = dpa(&mut trace, y, &divisor, grid, layout, c);
        let smoothed = ta_step(trace.estimates.last().unwrap(), &h_dpa, alpha);
        feedback = match cfg.feedback {
            Feedback::Smoothed => smoothed.clone(),
            Feedback::LstmOutput => divisor,
        };
        trace.estimates.push(smoothed);
    }
    Ok(trace)
}
