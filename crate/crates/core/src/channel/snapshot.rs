//! JSON snapshots: `{n_rx, n_tx, taps: [{delay, matrix: [[re, im], …]}]}`.
//!
//! Matrices are row-major. Numbers are written with the shortest decimal
//! representation that parses back to the identical `f64`.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ChannelTaps;
use crate::error::Result;
use crate::linalg::CMat;
use crate::numeric::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotTap {
    pub delay: usize,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSnapshot {
    pub n_rx: usize,
    pub n_tx: usize,
    pub taps: Vec<SnapshotTap>,
}

impl ChannelSnapshot {
    pub fn from_channel<T: Real>(ch: &ChannelTaps<T>) -> Self {
        let taps = ch
            .taps()
            .map(|(delay, h)| SnapshotTap {
                delay,
                matrix: h.as_slice().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
            })
            .collect();
        Self { n_rx: ch.n_rx(), n_tx: ch.n_tx(), taps }
    }

    pub fn to_channel<T: Real>(&self) -> Result<ChannelTaps<T>> {
        let mut taps = Vec::with_capacity(self.taps.len());
        for t in &self.taps {
            let entries = t.matrix.iter().map(|e| Complex::new(T::lit(e[0]), T::lit(e[1]))).collect();
            taps.push((t.delay, CMat::from_vec(self.n_rx, self.n_tx, entries)?));
        }
        ChannelTaps::new(self.n_rx, self.n_tx, taps)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
