use std::path::Path;
use std::process::{Command, Output};

fn vchan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vchan"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run vchan")
}

const SMALL: &str = r#"
seed = 5
frames = 3
snr_db = [10.0, 30.0]
estimators = [{ kind = "ls" }, { kind = "dpa" }, { kind = "sta", alpha = 2.0, beta = 2 }, { kind = "trfi" }]
"#;

#[test]
fn complexity_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = vchan(dir.path(), &["complexity", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("estimator,mul_div,add_sub"));
    assert!(text.contains("\nLSTM-DNN-DPA,133088,11448,"));
    assert!(text.contains("\nLSTM-DPA-TA (P=64),44168,1728,"));
}

#[test]
fn ta_ratio_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = vchan(dir.path(), &["ta-ratio", "--max-q", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,ratio,value");
    assert_eq!(lines[1], "1,1,1");
    assert_eq!(lines[2], "2,1/2,0.5");
    assert_eq!(lines.len(), 4);
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = vchan(dir.path(), &["--config", "small.toml", "--out", name, "sweep"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "estimator,snr_db,ber,nmse,frames,bits");
    assert_eq!(text.lines().count(), 1 + 2 * 4);

    // flags override the file
    let out = vchan(dir.path(), &["--config", "small.toml", "--snr", "20", "--estimators", "dpa", "sweep"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn eval_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let out = vchan(dir.path(), &["--config", "small.toml", "--frames", "1", "eval", "--trace", "traces"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("traces/dpa_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 51 * 52);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "frames = \"many\"\n").unwrap();
    std::fs::write(dir.path().join("extra.toml"), "colour = 1\n").unwrap();
    for args in [
        &["--config", "bad.toml", "sweep"][..],
        &["--config", "extra.toml", "sweep"],
        &["--config", "absent.toml", "sweep"],
        &["--estimators", "kalman", "sweep"],
        &["--snr", "1:2", "sweep"],
    ] {
        let out = vchan(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn missing_model_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = vchan(
        dir.path(),
        &["--snr", "20", "--frames", "1", "--estimators", "dpa,lstm-dpa-ta=nowhere.bin", "sweep"],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = vchan(dir.path(), &["--snr", "20", "--frames", "1", "--estimators", "lstm-dpa-ta", "sweep"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn train_then_sweep() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tiny.toml"),
        "[model]\nlstm_hidden = 8\n[train]\nepochs = 2\nbatch_size = 2\n",
    )
    .unwrap();
    let out = vchan(
        dir.path(),
        &["--config", "tiny.toml", "--frames", "2", "--out", "data.bin", "gen-data", "--kind", "lstm-dpa-ta"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = vchan(
        dir.path(),
        &[
            "--config", "tiny.toml", "--out", "m.bin", "train", "--kind", "lstm-dpa-ta", "--dataset", "data.bin", "--log",
            "log.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert_eq!(log.lines().count(), 3);
    let out = vchan(
        dir.path(),
        &["--snr", "25", "--frames", "1", "--estimators", "dpa,lstm-dpa-ta=m.bin", "sweep"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("lstm-dpa-ta,25"));
}
