use std::fmt::Write;

use super::MetricRecord;

/// Metrics as CSV: `estimator,snr_db,ber,nmse,frames,bits`, in record order.
pub fn metrics_csv(records: &[MetricRecord]) -> String {
    let mut s = String::from("estimator,snr_db,ber,nmse,frames,bits\n");
    for r in records {
        writeln!(s, "{},{},{},{},{},{}", r.estimator, r.snr_db, r.ber, r.nmse, r.frames, r.bits).unwrap();
    }
    s
}

/// Fixed-width summary for terminals.
pub fn summary_table(records: &[MetricRecord]) -> String {
    let mut s = format!(
        "{:<16} {:>7} {:>12} {:>12} {:>7} {:>10} {:>8}\n",
        "estimator", "snr_db", "ber", "nmse", "frames", "errors", "flagged"
    );
    for r in records {
        writeln!(
            s,
            "{:<16} {:>7} {:>12.4e} {:>12.4e} {:>7} {:>10} {:>8}",
            r.estimator, r.snr_db, r.ber, r.nmse, r.frames, r.bit_errors, r.flagged
        )
        .unwrap();
    }
    s
}

/// Per-epoch training log: `epoch,loss` with 1-based epochs.
pub fn training_log_csv(history: &[f64]) -> String {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in history.iter().enumerate() {
        writeln!(s, "{},{}", i + 1, l).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(name: &str, ber: f64) -> MetricRecord {
        MetricRecord {
            estimator: name.into(),
            snr_db: 20.0,
            ber,
            nmse: 0.0125,
            frames: 2,
            bits: 9588,
            bit_errors: 0,
            flagged: 0,
            channel_digest: 0,
        }
    }

    #[test]
    fn csv_layout() {
        let csv = metrics_csv(&[rec("dpa", 0.0), rec("sta", 1.5e-3)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "estimator,snr_db,ber,nmse,frames,bits");
        assert_eq!(lines[1], "dpa,20,0,0.0125,2,9588");
        assert_eq!(lines[2], "sta,20,0.0015,0.0125,2,9588");
        assert_eq!(csv, metrics_csv(&[rec("dpa", 0.0), rec("sta", 1.5e-3)]));
    }

    #[test]
    fn log_layout() {
        assert_eq!(training_log_csv(&[0.5, 0.25]), "epoch,loss\n1,0.5\n2,0.25\n");
    }
}
