use sparseq_sim::{read_csv, read_csv_file, run_fer, write_csv, write_csv_file, DetectorKind, FerRow, FerTable, SimConfig, CSV_HEADER};

fn row(detector: DetectorKind, ebn0_db: f64, frames: usize, errors: usize, mean_ops: f64) -> FerRow {
    FerRow {
        detector,
        ebn0_db,
        frames,
        errors,
        fer: errors as f64 / frames as f64,
        mean_ops,
        seconds: 0.0,
        skipped: 0,
        skip_reason: None,
    }
}

fn to_string(t: &FerTable) -> String {
    let mut buf = Vec::new();
    write_csv(t, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn empty_table_is_header_only() {
    assert_eq!(to_string(&FerTable::default()), format!("{}\n", CSV_HEADER.join(",")));
    assert_eq!(CSV_HEADER.join(","), "detector,ebn0_db,frames,errors,fer,mean_ops,seconds");
}

#[test]
fn two_detectors_three_snrs_give_six_rows() {
    let cfg = SimConfig::from_toml(
        r#"
n_tx = 1
n_rx = 1
adc_bits = 2
detectors = ["qbp", "ofdm_mmse"]
ebn0_db = [0.0, 1.0, 2.0]
frames = 2

[channel]
kind = "exp_pdp"
n_taps = 2
decay = 1.0
"#,
    )
    .unwrap();
    let t = run_fer(&cfg).unwrap();
    let text = to_string(&t);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.starts_with("qbp,") || l.starts_with("ofdm_mmse,")));
}

#[test]
fn values_reparse_exactly() {
    let t = FerTable {
        rows: vec![
            row(DetectorKind::Qbcjr, -1.5, 300, 17, 91544.625),
            row(DetectorKind::OfdmBussgang, 0.1 + 0.2, 7, 3, 1.0 / 3.0),
            row(DetectorKind::Oracle, 2.0, 1, 0, 0.0),
        ],
    };
    let back = read_csv(to_string(&t).as_bytes()).unwrap();
    assert_eq!(back, t);
}

#[test]
fn nan_fer_of_skipped_rows_survives() {
    let mut r = row(DetectorKind::Bcjr, 0.0, 1, 0, 0.0);
    r.frames = 0;
    r.fer = f64::NAN;
    let back = read_csv(to_string(&FerTable { rows: vec![r] }).as_bytes()).unwrap();
    assert!(back.rows[0].fer.is_nan());
    assert_eq!(back.rows[0].frames, 0);
}

#[test]
fn file_round_trip_and_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let t = FerTable { rows: vec![row(DetectorKind::Qbp, 4.0, 10, 1, 12.5)] };
    let path = dir.path().join("out.csv");
    write_csv_file(&t, &path).unwrap();
    assert_eq!(read_csv_file(&path).unwrap(), t);
    assert!(write_csv_file(&t, dir.path().join("missing/dir/out.csv")).is_err());
}

#[test]
fn rejects_foreign_header() {
    assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
}
