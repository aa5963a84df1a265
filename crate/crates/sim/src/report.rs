//! CSV output of FER tables.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::DetectorKind;
use crate::run::{FerRow, FerTable};

pub const CSV_HEADER: [&str; 7] = ["detector", "ebn0_db", "frames", "errors", "fer", "mean_ops", "seconds"];

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    detector: DetectorKind,
    ebn0_db: f64,
    frames: usize,
    errors: usize,
    fer: f64,
    mean_ops: f64,
    seconds: f64,
}

pub fn write_csv<W: Write>(table: &FerTable, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &table.rows {
        w.serialize(CsvRecord {
            detector: r.detector,
            ebn0_db: r.ebn0_db,
            frames: r.frames,
            errors: r.errors,
            fer: r.fer,
            mean_ops: r.mean_ops,
            seconds: r.seconds,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(table: &FerTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(table, std::io::BufWriter::new(f))
}

/// Parses a CSV written by [`write_csv`]. Columns outside the CSV (skip
/// counts and reasons) come back empty.
pub fn read_csv<R: Read>(input: R) -> Result<FerTable> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        anyhow::bail!("unexpected CSV header {header:?}");
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<CsvRecord>() {
        let r = rec?;
        rows.push(FerRow {
            detector: r.detector,
            ebn0_db: r.ebn0_db,
            frames: r.frames,
            errors: r.errors,
            fer: r.fer,
            mean_ops: r.mean_ops,
            seconds: r.seconds,
            skipped: 0,
            skip_reason: None,
        });
    }
    Ok(FerTable { rows })
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<FerTable> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_csv(f)
}
