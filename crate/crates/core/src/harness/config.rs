use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{MobilityConfig, TdlProfile};
use crate::estimators::{EstimatorConfig, EstimatorKind, Feedback, PilotFeed, StaConfig};
use crate::neural::TrainConfig;
use crate::phy::{Coding, FrameLayout, FrameSpec, Modulation};
use crate::sim::Scenario;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    /// Data symbols per frame.
    pub symbols: usize,
    pub modulation: Modulation,
    pub coding: Coding,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            symbols: 50,
            modulation: Modulation::Qam16,
            coding: Coding::Convolutional,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    /// TOML file with `delays` and `powers`; relative to the config file.
    pub profile: Option<PathBuf>,
    /// Inline profile, used when `profile` is absent.
    pub delays: Option<Vec<usize>>,
    pub powers: Option<Vec<f64>>,
    pub doppler_hz: f64,
    pub symbol_duration_s: f64,
    pub sinusoids: usize,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let m = MobilityConfig::high();
        Self {
            profile: None,
            delays: None,
            powers: None,
            doppler_hz: m.doppler_hz,
            symbol_duration_s: m.symbol_duration_s,
            sinusoids: m.sinusoids,
        }
    }
}

/// One estimator of a sweep with its optional settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorEntry {
    pub kind: EstimatorKind,
    /// Name in reports; defaults to the kind's name.
    pub label: Option<String>,
    /// STA time weight.
    pub alpha: Option<f64>,
    /// STA frequency half-window.
    pub beta: Option<usize>,
    pub ta_alpha: Option<f64>,
    pub feedback: Option<Feedback>,
    pub pilot_feed: Option<PilotFeed>,
    /// Model file for learned kinds; relative to the config file.
    pub model: Option<PathBuf>,
}

impl EstimatorEntry {
    pub fn new(kind: EstimatorKind) -> Self {
        Self {
            kind,
            label: None,
            alpha: None,
            beta: None,
            ta_alpha: None,
            feedback: None,
            pilot_feed: None,
            model: None,
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        let d = EstimatorConfig::default();
        EstimatorConfig {
            sta: StaConfig {
                alpha: self.alpha.unwrap_or(d.sta.alpha),
                beta: self.beta.unwrap_or(d.sta.beta),
            },
            ta_alpha: self.ta_alpha.unwrap_or(d.ta_alpha),
            feedback: self.feedback.unwrap_or(d.feedback),
            pilot_feed: self.pilot_feed.unwrap_or(d.pilot_feed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// LSTM hidden units of LSTM-DPA-TA.
    pub lstm_hidden: usize,
    /// Hidden widths of the STA-DNN / TRFI-DNN correction networks.
    pub dnn_hidden: Vec<usize>,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            lstm_hidden: 128,
            dnn_hidden: vec![15, 15, 15],
        }
    }
}

/// Simulation configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    /// Frames per SNR point.
    pub frames: usize,
    pub snr_db: Vec<f64>,
    pub frame: FrameSection,
    pub channel: ChannelSection,
    pub estimators: Vec<EstimatorEntry>,
    pub model: ModelSection,
    pub train: TrainConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            frames: 100,
            snr_db: (0..=8).map(|i| 5.0 * i as f64).collect(),
            frame: FrameSection::default(),
            channel: ChannelSection::default(),
            estimators: [EstimatorKind::Ls, EstimatorKind::Dpa, EstimatorKind::Sta, EstimatorKind::Trfi]
                .into_iter()
                .map(EstimatorEntry::new)
                .collect(),
            model: ModelSection::default(),
            train: TrainConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Config("the SNR grid is empty".into()));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(Error::Config("SNR values must be numbers".into()));
        }
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.frame.symbols == 0 {
            return Err(Error::Config("a frame needs at least one data symbol".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        if self.model.lstm_hidden == 0 {
            return Err(Error::Config("lstm_hidden must be positive".into()));
        }
        for e in &self.estimators {
            e.estimator_config().validate()?;
        }
        self.train.validate()?;
        self.mobility().validate()?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn frame_spec(&self) -> FrameSpec {
        FrameSpec {
            layout: FrameLayout::ieee80211p(self.frame.symbols),
            modulation: self.frame.modulation,
            coding: self.frame.coding,
        }
    }

    pub fn mobility(&self) -> MobilityConfig {
        MobilityConfig {
            doppler_hz: self.channel.doppler_hz,
            symbol_duration_s: self.channel.symbol_duration_s,
            sinusoids: self.channel.sinusoids,
            seed: self.seed,
        }
    }

    pub fn profile(&self) -> Result<TdlProfile> {
        match (&self.channel.profile, &self.channel.delays, &self.channel.powers) {
            (Some(path), _, _) => TdlProfile::load(&self.resolve(path)),
            (None, Some(d), Some(p)) => TdlProfile::new(d.clone(), p.clone()),
            (None, None, None) => Ok(TdlProfile::default()),
            _ => Err(Error::Profile("inline profile needs both delays and powers".into())),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let s = Scenario {
            frame: self.frame_spec(),
            profile: self.profile()?,
            mobility: self.mobility(),
        };
        s.profile.validate(s.frame.layout.total_subcarriers)?;
        Ok(s)
    }
}
