use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vchan_core::complexity::reduction_report;
use vchan_core::estimators::{run_baseline, ta_noise_ratio, EstimatorKind};
use vchan_core::harness::{
    metrics_csv, prepare_estimators, run_sweep_with, summary_table, train_cmd, training_dataset, EstimatorEntry,
    SimConfig, TrainRequest,
};
use vchan_core::phy::Constellation;
use vchan_core::sim::simulate_trial;
use vchan_core::{Error, Result};

/// IEEE 802.11p channel-estimation simulator.
#[derive(Parser, Debug)]
#[command(name = "vchan", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// SNR points in dB: `20,25,30` or `start:stop:step`.
    #[arg(long, global = true)]
    snr: Option<String>,
    /// Frames per SNR point (training frames for `train` and `gen-data`).
    #[arg(long, global = true)]
    frames: Option<usize>,
    /// Comma-separated estimators, `kind` or `kind=model.bin`.
    #[arg(long, global = true)]
    estimators: Option<String>,
    /// Output file (CSV, model or dataset, depending on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// BER/NMSE sweep over the SNR grid.
    Sweep,
    /// Simulate and store a training dataset.
    GenData {
        #[arg(long)]
        kind: String,
    },
    /// Train the network of a learned estimator.
    Train {
        #[arg(long)]
        kind: String,
        /// Read the training set from this file instead of simulating it.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Continue from this model file.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Per-epoch loss CSV.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Sweep and additionally dump per-symbol estimates of the first frame.
    Eval {
        /// Directory for `<estimator>_trace.csv` files.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Operation counts of the LSTM estimators.
    Complexity {
        #[arg(long)]
        csv: bool,
    },
    /// Noise-power ratio of temporal averaging per symbol index.
    TaRatio {
        #[arg(long, default_value_t = 10)]
        max_q: u64,
    },
}

fn parse_snr(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse SNR list `{s}`"));
    if s.contains(':') {
        let p: Vec<f64> = s
            .split(':')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = p[..] else { return Err(bad()) };
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + step * i as f64).collect())
    } else {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

fn parse_estimators(s: &str) -> Result<Vec<EstimatorEntry>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (kind, model) = match t.split_once('=') {
                Some((k, m)) => (k, Some(PathBuf::from(m.trim()))),
                None => (t, None),
            };
            let mut e = EstimatorEntry::new(kind.parse()?);
            e.model = model;
            Ok(e)
        })
        .collect()
}

fn load_config(common: &Common) -> Result<SimConfig> {
    let mut cfg = match &common.config {
        Some(p) => SimConfig::load(p).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
            other => other,
        })?,
        None => SimConfig {
            base_dir: std::env::current_dir().unwrap_or_default(),
            ..SimConfig::default()
        },
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        cfg.train.seed = seed;
    }
    if let Some(s) = &common.snr {
        cfg.snr_db = parse_snr(s)?;
    }
    if let Some(f) = common.frames {
        cfg.frames = f;
    }
    if let Some(e) = &common.estimators {
        // command-line model paths are relative to the working directory
        let cwd = std::env::current_dir().unwrap_or_default();
        cfg.estimators = parse_estimators(e)?
            .into_iter()
            .map(|mut e| {
                e.model = e.model.map(|m| if m.is_absolute() { m } else { cwd.join(m) });
                e
            })
            .collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn sweep(cfg: &SimConfig, out: Option<&Path>) -> Result<()> {
    let ests = prepare_estimators(cfg)?;
    let records = run_sweep_with(cfg, &ests)?;
    eprint!("{}", summary_table(&records));
    emit(out, &metrics_csv(&records))
}

fn write_traces(cfg: &SimConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let scenario = cfg.scenario()?;
    let c = Constellation::<f64>::new(scenario.frame.modulation);
    let trial = simulate_trial::<f64>(&scenario, &c, cfg.snr_db[0], cfg.seed, 0)?;
    for e in prepare_estimators(cfg)? {
        if e.kind == EstimatorKind::Perfect {
            continue;
        }
        let mut trace = run_baseline(&trial.grid, e.kind, &e.models, &e.config, &scenario.frame.layout, &c)?;
        trace.name = e.label.clone();
        let path = dir.join(format!("{}_trace.csv", e.label));
        let mut buf = Vec::new();
        trace.write_csv(&scenario.frame.layout, &trial.channel, &mut buf)?;
        fs::write(&path, buf).map_err(|err| Error::io(&path, err))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let out = common.out.as_deref();
    match cli.command {
        Command::Complexity { csv } => {
            let r = reduction_report();
            emit(out, &if csv { r.to_csv() } else { r.to_string() })
        }
        Command::TaRatio { max_q } => {
            let mut s = String::from("q,ratio,value\n");
            for q in 1..=max_q.max(1) {
                let r = ta_noise_ratio(q)?;
                let v = vchan_core::estimators::ta_noise_ratio_real::<f64>(q)?;
                s += &format!("{q},{r},{v}\n");
            }
            emit(out, &s)
        }
        Command::Sweep => sweep(&load_config(common)?, out),
        Command::Eval { trace } => {
            let cfg = load_config(common)?;
            if let Some(dir) = &trace {
                write_traces(&cfg, dir)?;
            }
            sweep(&cfg, out)
        }
        Command::GenData { kind } => {
            let cfg = load_config(common)?;
            let out = out.ok_or_else(|| Error::Config("gen-data needs --out".into()))?;
            let data = training_dataset(&cfg, kind.parse()?, common.frames)?;
            data.save(out)?;
            eprintln!("{} sequences written to {}", data.len(), out.display());
            Ok(())
        }
        Command::Train {
            kind,
            dataset,
            resume,
            log,
            epochs,
        } => {
            let mut cfg = load_config(common)?;
            if let Some(e) = epochs {
                cfg.train.epochs = e;
            }
            let mut req = TrainRequest::new(kind.parse()?);
            req.frames = common.frames;
            req.dataset = dataset;
            req.resume = resume;
            req.log = log;
            req.out = Some(
                out.map(Path::to_path_buf)
                    .ok_or_else(|| Error::Config("train needs --out".into()))?,
            );
            let (tm, _) = train_cmd(&cfg, &req, |epoch, loss| eprintln!("epoch {:>5}  loss {loss:.6e}", epoch + 1))?;
            eprintln!("final loss {:.6e} after {} epochs", tm.meta.final_loss, tm.meta.epochs);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_lists() {
        assert_eq!(parse_snr("20, 25,30").unwrap(), vec![20.0, 25.0, 30.0]);
        assert_eq!(parse_snr("0:40:10").unwrap(), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        assert!(parse_snr("0:40").is_err());
        assert!(parse_snr("a").is_err());
    }

    #[test]
    fn estimator_lists() {
        let e = parse_estimators("dpa,lstm-dpa-ta=m.bin").unwrap();
        assert_eq!(e[0].kind, EstimatorKind::Dpa);
        assert_eq!(e[1].model.as_deref(), Some(Path::new("m.bin")));
        assert_eq!(parse_estimators("bogus").unwrap_err().exit_code(), 2);
    }
}
