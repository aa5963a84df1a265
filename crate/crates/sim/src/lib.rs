//! Monte-Carlo FER harness for the `sparseq-core` detectors.
//!
//! A [`SimConfig`] (TOML) describes the link; [`run_fer`] sweeps Eb/N0 and
//! returns a [`FerTable`] that [`write_csv`] serializes.

pub mod config;
pub mod diag;
pub mod report;
pub mod run;

pub use config::{parse_detectors, parse_ebn0, ChannelSpec, CsirSpec, DetectorKind, SimConfig, CODE_LENGTH};
pub use report::{read_csv, read_csv_file, write_csv, write_csv_file, CSV_HEADER};
pub use run::{run_fer, run_fer_with, wilson_interval, FerRow, FerTable, RunOptions, Setup};
