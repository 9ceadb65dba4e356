use ndarray::{s, Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vchan_core::channel::{apply_channel, gen_realization, MobilityConfig, TdlProfile};
use vchan_core::estimators::{
    dpa_step, ls_estimate, merge_prediction, pilot_ls, run_baseline, run_lstm_dpa_ta, sta_step, unstack_re_im,
    lstm_dpa_ta_input, EstimatorConfig, EstimatorKind, Feedback, Models, StaConfig,
};
use vchan_core::neural::{Dense, LstmParams, LstmState, MlpParams};
use vchan_core::phy::{build_frame, random_bits, Constellation, FrameGrid, FrameSpec};
use vchan_core::{ChannelRealization64, Error};

fn frame(snr_db: f64, doppler: f64, seed: u64) -> (FrameGrid<f64>, ChannelRealization64, FrameSpec) {
    let spec = FrameSpec::default();
    let c = Constellation::new(spec.modulation);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = build_frame(&random_bits(&mut rng, spec.payload_bits()), &spec, &c).unwrap();
    let mut ch = gen_realization(&TdlProfile::default(), &MobilityConfig::with_doppler(doppler), &spec.layout, &mut rng)
        .unwrap();
    let rx = apply_channel(&grid, &mut ch, snr_db, &mut rng).unwrap();
    (rx, ch, spec)
}

/// LSTM whose readout returns (approximately) the data-carrier part of its input:
/// closed forget gate, open input and output gates, a small-signal candidate and
/// a readout that undoes the gains.
fn copy_model(spec: &FrameSpec) -> LstmParams<f64> {
    let layout = &spec.layout;
    let (k_in, p) = (2 * layout.n_active(), 2 * layout.n_active());
    let eps = 1e-4;
    let mut w_input = Array2::zeros((4 * p, k_in));
    let mut bias = Array1::zeros(4 * p);
    bias.slice_mut(s![0..p]).fill(-40.0);
    bias.slice_mut(s![p..2 * p]).fill(40.0);
    bias.slice_mut(s![3 * p..4 * p]).fill(40.0);
    for j in 0..p {
        w_input[[2 * p + j, j]] = eps;
    }
    let data = layout.data_positions();
    let n_on = layout.n_active();
    let mut readout = Array2::zeros((2 * data.len(), p));
    for (r, &k) in data.iter().enumerate() {
        readout[[r, k]] = 1.0 / eps;
        readout[[data.len() + r, n_on + k]] = 1.0 / eps;
    }
    LstmParams {
        w_input,
        w_recurrent: Array2::zeros((4 * p, p)),
        bias,
        readout: MlpParams {
            layers: vec![Dense {
                weights: readout,
                bias: Array1::zeros(2 * data.len()),
                activation: vchan_core::neural::Activation::Linear,
            }],
        },
    }
}

fn random_models(spec: &FrameSpec) -> Models<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let on = spec.layout.n_active();
    let d = spec.layout.n_data();
    Models {
        lstm_dpa_ta: Some(LstmParams::new(2 * on, 8, &[], 2 * d, &mut rng).unwrap()),
        lstm_dnn_dpa: Some(LstmParams::new(2 * (on + 4), 8, &[5], 2 * d, &mut rng).unwrap()),
        sta_dnn: Some(MlpParams::new(&[2 * on, 15, 15, 15, 2 * on], &mut rng).unwrap()),
        trfi_dnn: Some(MlpParams::new(&[2 * on, 15, 15, 15, 2 * on], &mut rng).unwrap()),
    }
}

#[test]
fn every_trace_starts_from_ls_and_keeps_pilots() {
    let (rx, _, spec) = frame(20.0, 550.0, 3);
    let c = Constellation::new(spec.modulation);
    let ls = ls_estimate(&rx.preamble_rx[0], &rx.preamble_rx[1], &rx.preamble).unwrap();
    let models = random_models(&spec);
    for kind in EstimatorKind::ALL.into_iter().filter(|k| *k != EstimatorKind::Perfect) {
        let tr = run_baseline(&rx, kind, &models, &EstimatorConfig::default(), &spec.layout, &c).unwrap();
        assert_eq!(tr.estimates[0], ls, "{kind}");
        assert_eq!(tr.estimates.len(), 51, "{kind}");
        assert_eq!(tr.name, kind.name());
        for d in &tr.decisions[1..] {
            for (&k, p) in spec.layout.pilot_positions().iter().zip(&rx.pilot_values) {
                assert_eq!(d[k], *p, "{kind}");
            }
        }
    }
}

#[test]
fn ls_only_is_static() {
    let (rx, _, spec) = frame(15.0, 550.0, 4);
    let c = Constellation::new(spec.modulation);
    let tr = run_baseline(&rx, EstimatorKind::Ls, &Models::default(), &EstimatorConfig::default(), &spec.layout, &c)
        .unwrap();
    assert!(tr.estimates.iter().all(|e| *e == tr.estimates[0]));
}

#[test]
fn dpa_noiseless_static_channel_is_exact() {
    let (rx, ch, spec) = frame(f64::INFINITY, 0.0, 5);
    let c = Constellation::new(spec.modulation);
    let tr = run_baseline(&rx, EstimatorKind::Dpa, &Models::default(), &EstimatorConfig::default(), &spec.layout, &c)
        .unwrap();
    assert!(tr.nmse(&ch).unwrap() < 1e-25);
    assert_eq!(tr.flagged, 0);
}

#[test]
fn sta_matches_stepwise_composition() {
    let (rx, _, spec) = frame(20.0, 550.0, 6);
    let c = Constellation::new(spec.modulation);
    let cfg = EstimatorConfig::default();
    let tr = run_baseline(&rx, EstimatorKind::Sta, &Models::default(), &cfg, &spec.layout, &c).unwrap();
    let mut prev = ls_estimate(&rx.preamble_rx[0], &rx.preamble_rx[1], &rx.preamble).unwrap();
    for (i, y) in rx.data_rx.iter().enumerate() {
        let out = dpa_step(y, &prev, &c, &spec.layout.data_positions(), &spec.layout.pilot_positions(), &rx.pilot_values);
        prev = sta_step(&prev, &out.estimate, &cfg.sta);
        assert_eq!(tr.estimates[i + 1], prev);
    }
}

#[test]
fn sta_without_averaging_is_dpa() {
    let (rx, _, spec) = frame(18.0, 550.0, 7);
    let c = Constellation::new(spec.modulation);
    let cfg = EstimatorConfig {
        sta: StaConfig { alpha: 1.0, beta: 0 },
        ..EstimatorConfig::default()
    };
    let sta = run_baseline(&rx, EstimatorKind::Sta, &Models::default(), &cfg, &spec.layout, &c).unwrap();
    let dpa = run_baseline(&rx, EstimatorKind::Dpa, &Models::default(), &cfg, &spec.layout, &c).unwrap();
    assert_eq!(sta.estimates, dpa.estimates);
}

#[test]
fn trfi_partitions_active_carriers() {
    let (rx, _, spec) = frame(12.0, 1100.0, 8);
    let c = Constellation::new(spec.modulation);
    let tr = run_baseline(&rx, EstimatorKind::Trfi, &Models::default(), &EstimatorConfig::default(), &spec.layout, &c)
        .unwrap();
    let (rel, unrel) = (tr.reliable.unwrap(), tr.unreliable.unwrap());
    assert!(unrel.iter().any(|u| !u.is_empty()), "noisy frame should have unreliable carriers");
    for (r, u) in rel.iter().zip(&unrel).skip(1) {
        let mut all: Vec<usize> = r.iter().chain(u).copied().collect();
        all.sort();
        assert_eq!(all, spec.layout.active);
    }
}

#[test]
fn copy_model_reproduces_dpa_on_static_noiseless_channel() {
    let (rx, ch, spec) = frame(f64::INFINITY, 0.0, 9);
    let c = Constellation::new(spec.modulation);
    let net = copy_model(&spec);
    let cfg = EstimatorConfig::default();
    let lstm = run_lstm_dpa_ta(&rx, &net, &cfg, &spec.layout, &c).unwrap();
    let dpa = run_baseline(&rx, EstimatorKind::Dpa, &Models::default(), &cfg, &spec.layout, &c).unwrap();
    assert_eq!(lstm.decisions, dpa.decisions);
    for (a, b) in lstm.estimates.iter().zip(&dpa.estimates) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < 1e-12);
        }
    }
    assert!(lstm.nmse(&ch).unwrap() < 1e-25);
}

#[test]
fn unit_alpha_removes_averaging() {
    let (rx, _, spec) = frame(20.0, 550.0, 10);
    let c = Constellation::new(spec.modulation);
    let net = random_models(&spec).lstm_dpa_ta.unwrap();
    let cfg = EstimatorConfig {
        ta_alpha: 1.0,
        ..EstimatorConfig::default()
    };
    let tr = run_lstm_dpa_ta(&rx, &net, &cfg, &spec.layout, &c).unwrap();

    // LSTM prediction followed by DPA, without temporal averaging
    let layout = &spec.layout;
    let mut state = LstmState::zeros(net.hidden_size());
    let mut prev = tr.estimates[0].clone();
    for (i, y) in rx.data_rx.iter().enumerate() {
        let pilots = pilot_ls(y, layout, &rx.pilot_values);
        let pred = net.step(lstm_dpa_ta_input(&prev, &pilots, layout).view(), &mut state).unwrap();
        let divisor = merge_prediction(&unstack_re_im(pred.view()), &pilots, layout);
        let out = dpa_step(y, &divisor, &c, &layout.data_positions(), &layout.pilot_positions(), &rx.pilot_values);
        assert_eq!(tr.estimates[i + 1], out.estimate);
        prev = out.estimate;
    }
}

#[test]
fn feedback_switch_changes_the_trace() {
    let (rx, _, spec) = frame(20.0, 550.0, 11);
    let c = Constellation::new(spec.modulation);
    let net = random_models(&spec).lstm_dpa_ta.unwrap();
    let a = run_lstm_dpa_ta(&rx, &net, &EstimatorConfig::default(), &spec.layout, &c).unwrap();
    let cfg = EstimatorConfig {
        feedback: Feedback::LstmOutput,
        ..EstimatorConfig::default()
    };
    let b = run_lstm_dpa_ta(&rx, &net, &cfg, &spec.layout, &c).unwrap();
    assert_eq!(a.estimates[1], b.estimates[1]);
    assert_ne!(a.estimates[2..], b.estimates[2..]);
}

#[test]
fn learned_kinds_need_models() {
    let (rx, _, spec) = frame(20.0, 550.0, 12);
    let c = Constellation::new(spec.modulation);
    for kind in EstimatorKind::ALL.into_iter().filter(|k| k.is_learned()) {
        let e = run_baseline(&rx, kind, &Models::default(), &EstimatorConfig::default(), &spec.layout, &c).unwrap_err();
        assert!(matches!(e, Error::MissingModel(_)), "{kind}: {e}");
        assert_eq!(e.exit_code(), 3);
    }
    let mut m = random_models(&spec);
    m.lstm_dpa_ta = m.lstm_dnn_dpa.clone();
    let e = run_baseline(&rx, EstimatorKind::LstmDpaTa, &m, &EstimatorConfig::default(), &spec.layout, &c).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn trace_csv_columns() {
    let (rx, ch, spec) = frame(20.0, 550.0, 13);
    let c = Constellation::new(spec.modulation);
    let tr = run_baseline(&rx, EstimatorKind::Dpa, &Models::default(), &EstimatorConfig::default(), &spec.layout, &c)
        .unwrap();
    let mut buf = Vec::new();
    tr.write_csv(&spec.layout, &ch, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "symbol,subcarrier,est_re,est_im,true_re,true_im,estimator_name"
    );
    assert_eq!(text.lines().count(), 1 + 51 * 52);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("50,58,") && last.ends_with(",dpa"));
    let h = ch.data_cfr(50)[51];
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[4].parse::<f64>().unwrap(), h.re);
}
