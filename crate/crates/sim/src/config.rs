//! TOML simulation configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sparseq_core::chanest::PilotNorm;
use sparseq_core::coding::Modulation;
use sparseq_core::detect::{DEFAULT_BP_ITERATIONS, DEFAULT_TRELLIS_BUDGET};

/// Coded block length of the built-in LDPC code.
pub const CODE_LENGTH: usize = 672;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Qbcjr,
    Qbp,
    Bcjr,
    OfdmMmse,
    OfdmBussgang,
    Oracle,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 6] = [
        DetectorKind::Qbcjr,
        DetectorKind::Qbp,
        DetectorKind::Bcjr,
        DetectorKind::OfdmMmse,
        DetectorKind::OfdmBussgang,
        DetectorKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Qbcjr => "qbcjr",
            DetectorKind::Qbp => "qbp",
            DetectorKind::Bcjr => "bcjr",
            DetectorKind::OfdmMmse => "ofdm_mmse",
            DetectorKind::OfdmBussgang => "ofdm_bussgang",
            DetectorKind::Oracle => "oracle",
        }
    }

    pub fn is_ofdm(self) -> bool {
        matches!(self, DetectorKind::OfdmMmse | DetectorKind::OfdmBussgang)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.name() == t)
            .with_context(|| format!("unknown detector {s:?}"))
    }
}

/// Where the per-frame channel comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Fresh Rayleigh exp-PDP draw per frame.
    ExpPdp { n_taps: usize, decay: f64 },
    /// Fixed channel from a cluster description (JSON `ClusterSpec`).
    Geometric { path: PathBuf, max_l: usize },
    /// Fixed channel from a snapshot JSON file.
    Snapshot { path: PathBuf },
}

/// Receiver channel knowledge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CsirSpec {
    Perfect,
    Ls {
        t_p: usize,
        /// Pilot Eb/N0; the data Eb/N0 of the point when absent.
        #[serde(default)]
        pilot_ebn0_db: Option<f64>,
        #[serde(default)]
        normalization: PilotNorm,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub seed: u64,
    pub n_tx: usize,
    pub n_rx: usize,
    #[serde(default = "default_modulation")]
    pub modulation: Modulation,
    pub adc_bits: u32,
    #[serde(default)]
    pub detectors: Vec<DetectorKind>,
    #[serde(default = "default_eps_th")]
    pub eps_th: f64,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    #[serde(default = "default_n_it")]
    pub n_it: usize,
    pub ebn0_db: Vec<f64>,
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default = "default_stop_errors")]
    pub stop_errors: usize,
    #[serde(default = "default_decoder_iters")]
    pub decoder_iters: usize,
    #[serde(default = "default_trellis_budget")]
    pub trellis_budget: u64,
    pub channel: ChannelSpec,
    #[serde(default = "default_csir")]
    pub csir: CsirSpec,
}

fn default_modulation() -> Modulation {
    Modulation::Bpsk
}
fn default_eps_th() -> f64 {
    0.1
}
fn default_d_max() -> usize {
    3
}
fn default_n_it() -> usize {
    DEFAULT_BP_ITERATIONS
}
fn default_frames() -> usize {
    1000
}
fn default_stop_errors() -> usize {
    100
}
fn default_decoder_iters() -> usize {
    50
}
fn default_trellis_budget() -> u64 {
    DEFAULT_TRELLIS_BUDGET as u64
}
fn default_csir() -> CsirSpec {
    CsirSpec::Perfect
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).context("parsing configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        // relative channel files resolve against the config's directory
        if let Some(dir) = path.parent() {
            match &mut cfg.channel {
                ChannelSpec::Geometric { path, .. } | ChannelSpec::Snapshot { path } if path.is_relative() => {
                    *path = dir.join(&*path);
                }
                _ => {}
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Bits per transmitted symbol vector.
    pub fn bits_per_symbol(&self) -> usize {
        self.n_tx * self.modulation.bits_per_antenna()
    }

    /// Symbol vectors per coded frame.
    pub fn n_d(&self) -> usize {
        CODE_LENGTH / self.bits_per_symbol()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.n_tx) {
            bail!("n_tx must be in 1..=8, got {}", self.n_tx);
        }
        if !(1..=64).contains(&self.n_rx) {
            bail!("n_rx must be in 1..=64, got {}", self.n_rx);
        }
        if !(1..=16).contains(&self.adc_bits) {
            bail!("adc_bits must be in 1..=16, got {}", self.adc_bits);
        }
        let m = self.bits_per_symbol();
        if CODE_LENGTH % m != 0 {
            bail!("code length {CODE_LENGTH} is not a multiple of {m} bits per symbol vector");
        }
        if !(self.eps_th >= 0.0) {
            bail!("eps_th must be nonnegative");
        }
        if self.d_max == 0 {
            bail!("d_max must be at least 1");
        }
        if self.n_it == 0 {
            bail!("n_it must be at least 1");
        }
        if self.decoder_iters == 0 {
            bail!("decoder_iters must be at least 1");
        }
        if self.stop_errors == 0 {
            bail!("stop_errors must be at least 1");
        }
        if self.ebn0_db.iter().any(|v| !v.is_finite()) {
            bail!("Eb/N0 values must be finite");
        }
        let mut seen = self.detectors.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.detectors.len() {
            bail!("duplicate detector in list");
        }
        match &self.channel {
            ChannelSpec::ExpPdp { n_taps, decay } => {
                if *n_taps == 0 || !(*decay > 0.0) {
                    bail!("exp_pdp needs n_taps >= 1 and decay > 0");
                }
            }
            ChannelSpec::Geometric { max_l, .. } => {
                if *max_l == 0 {
                    bail!("geometric channel needs max_l >= 1");
                }
            }
            ChannelSpec::Snapshot { .. } => {}
        }
        if let CsirSpec::Ls { t_p, pilot_ebn0_db, .. } = &self.csir {
            if *t_p == 0 {
                bail!("t_p must be at least 1");
            }
            if pilot_ebn0_db.is_some_and(|v| !v.is_finite()) {
                bail!("pilot_ebn0_db must be finite");
            }
        }
        Ok(())
    }
}

/// Parses a comma-separated detector list.
pub fn parse_detectors(s: &str) -> Result<Vec<DetectorKind>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// Parses a comma-separated Eb/N0 list or a `start:step:stop` range.
pub fn parse_ebn0(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>()?;
        let (start, step, stop) = (v[0], v[1], v[2]);
        if !(step > 0.0) || stop < start {
            bail!("bad Eb/N0 range {s:?}");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad Eb/N0 value {t:?}")))
        .collect()
}
