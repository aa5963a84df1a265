//! Monte-Carlo frame-error-rate loop.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::Rng;
use rayon::prelude::*;
use sparseq_core::chanest::{gen_pilots, ls_estimate};
use sparseq_core::channel::{gen_exp_pdp, gen_geometric, propagate, ChannelSnapshot, ClusterSpec};
use sparseq_core::coding::{Constellation, LdpcCode};
use sparseq_core::detect::{
    bcjr_unquantized_llrs, bruteforce_llrs, build_trellis, qbcjr_llrs, qbp_llrs, LlrFrame,
};
use sparseq_core::ofdm::{cp_noise_variance, ofdm_bussgang_llrs, ofdm_mmse_llrs, ofdm_modulate};
use sparseq_core::sparsify::select_dominant_taps;
use sparseq_core::{eb_n0_to_sigma2, Channel, Error, Model, Quant, RngStream};

use crate::config::{ChannelSpec, CsirSpec, DetectorKind, SimConfig};

// fork labels for the per-frame sub-streams
const RNG_CHANNEL: u64 = 1;
const RNG_BITS: u64 = 2;
const RNG_NOISE: u64 = 3;
const RNG_PILOTS: u64 = 4;
const RNG_PILOT_NOISE: u64 = 5;
const RNG_OFDM_NOISE: u64 = 6;

/// One `(detector, Eb/N0)` point.
#[derive(Clone, Debug, PartialEq)]
pub struct FerRow {
    pub detector: DetectorKind,
    pub ebn0_db: f64,
    /// Frames the detector actually ran on.
    pub frames: usize,
    pub errors: usize,
    /// `errors / frames`; NaN when no frame ran.
    pub fer: f64,
    /// Mean LLR-computation operation count per frame.
    pub mean_ops: f64,
    /// Summed detector wall time; zero unless timing is enabled.
    pub seconds: f64,
    /// Frames on which the detector was skipped.
    pub skipped: usize,
    pub skip_reason: Option<String>,
}

impl FerRow {
    pub fn successes(&self) -> usize {
        self.frames - self.errors
    }

    /// Wilson score interval at ~95% confidence.
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.frames, 1.96)
    }
}

pub fn wilson_interval(errors: usize, frames: usize, z: f64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FerTable {
    pub rows: Vec<FerRow>,
}

impl FerTable {
    pub fn get(&self, detector: DetectorKind, ebn0_db: f64) -> Option<&FerRow> {
        self.rows.iter().find(|r| r.detector == detector && r.ebn0_db == ebn0_db)
    }

    pub fn for_detector(&self, detector: DetectorKind) -> impl Iterator<Item = &FerRow> {
        self.rows.iter().filter(move |r| r.detector == detector)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Record detector wall time (makes the `seconds` column nondeterministic).
    pub timing: bool,
    /// Frames evaluated in parallel between early-stop checks.
    pub batch: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { timing: false, batch: 64 }
    }
}

#[derive(Clone, Debug)]
enum Outcome {
    Ran { error: bool, ops: u64, seconds: f64 },
    Skipped(String),
}

/// Immutable per-run state shared by all frames.
pub struct Setup {
    pub cfg: SimConfig,
    pub code: LdpcCode,
    pub cst: Constellation,
    pub quant: Quant,
    pub fixed_channel: Option<Channel>,
}

impl Setup {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let code = LdpcCode::ieee80211ad_rate12();
        if code.n() != crate::config::CODE_LENGTH {
            bail!("unexpected code length {}", code.n());
        }
        let cst = Constellation::new(cfg.modulation, cfg.n_tx)?;
        let quant = Quant::uniform(cfg.adc_bits)?;
        let fixed_channel = match &cfg.channel {
            ChannelSpec::ExpPdp { .. } => None,
            ChannelSpec::Snapshot { path } => {
                let snap = ChannelSnapshot::load(path).with_context(|| format!("loading {}", path.display()))?;
                Some(snap.to_channel::<f64>()?)
            }
            ChannelSpec::Geometric { path, max_l } => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let spec: ClusterSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                Some(gen_geometric::<f64>(&spec, *max_l)?)
            }
        };
        if let Some(ch) = &fixed_channel {
            if ch.n_rx() != cfg.n_rx || ch.n_tx() != cfg.n_tx {
                bail!(
                    "channel file is {}x{} but the config asks for n_rx = {}, n_tx = {}",
                    ch.n_rx(),
                    ch.n_tx(),
                    cfg.n_rx,
                    cfg.n_tx
                );
            }
        }
        Ok(Self { cfg: cfg.clone(), code, cst, quant, fixed_channel })
    }

    /// True channel of a frame.
    pub fn channel(&self, root: &RngStream) -> Result<Channel> {
        match (&self.fixed_channel, &self.cfg.channel) {
            (Some(ch), _) => Ok(ch.clone()),
            (None, ChannelSpec::ExpPdp { n_taps, decay }) => {
                Ok(gen_exp_pdp(*n_taps, *decay, self.cfg.n_rx, self.cfg.n_tx, &mut root.fork(RNG_CHANNEL))?)
            }
            (None, _) => unreachable!("file channels are loaded up front"),
        }
    }

    /// Channel available at the receiver: the truth or an LS estimate from quantized pilots.
    pub fn receiver_channel(&self, truth: &Channel, root: &RngStream, ebn0_db: f64) -> Result<Channel> {
        match &self.cfg.csir {
            CsirSpec::Perfect => Ok(truth.clone()),
            CsirSpec::Ls { t_p, pilot_ebn0_db, normalization } => {
                let pilots = gen_pilots::<f64>(*t_p, self.cfg.n_tx, truth.len(), *normalization, &mut root.fork(RNG_PILOTS))?;
                let db = pilot_ebn0_db.unwrap_or(ebn0_db);
                let sigma2 = eb_n0_to_sigma2(db, self.cfg.n_tx, self.cst.m());
                let r = propagate(truth, &pilots.symbols(), None, sigma2, &mut root.fork(RNG_PILOT_NOISE))?;
                let y = self.quant.quantize_seq(&r);
                Ok(ls_estimate(&y, &pilots, &self.quant)?)
            }
        }
    }

    fn frame(&self, index: u64, ebn0_db: f64, active: &[bool], timing: bool) -> Result<Vec<Outcome>> {
        let cfg = &self.cfg;
        let n_d = cfg.n_d();
        let root = RngStream::new(cfg.seed, index);
        let sigma2 = eb_n0_to_sigma2(ebn0_db, cfg.n_tx, self.cst.m());
        let truth = self.channel(&root)?;
        let rx_ch = self.receiver_channel(&truth, &root, ebn0_db)?;

        let mut bit_rng = root.fork(RNG_BITS);
        let info: Vec<u8> = (0..self.code.k()).map(|_| bit_rng.gen_range(0..2u8)).collect();
        let codeword = self.code.encode(&info)?;
        let x = self.cst.map_symbols(&codeword)?;

        let r = propagate(&truth, &x, None, sigma2, &mut root.fork(RNG_NOISE))?;
        let y = self.quant.quantize_seq(&r);

        let wants = |d: DetectorKind| cfg.detectors.iter().zip(active).any(|(&k, &a)| a && k == d);
        let model = if wants(DetectorKind::Qbcjr) || wants(DetectorKind::Qbp) {
            let sel = select_dominant_taps(&rx_ch, sigma2, &self.quant, cfg.eps_th, cfg.d_max)?;
            if sel.dominant.is_empty() {
                None
            } else {
                Some(Model::new(&rx_ch, &sel.dominant, sigma2)?)
            }
        } else {
            None
        };
        let ofdm = if cfg.detectors.iter().zip(active).any(|(k, &a)| a && k.is_ofdm()) {
            let cp = truth.len() - 1;
            let noise = cp_noise_variance(sigma2, n_d, truth.len());
            let xt = ofdm_modulate(&x, cp);
            let rt = propagate(&truth, &xt, None, noise, &mut root.fork(RNG_OFDM_NOISE))?;
            Some((self.quant.quantize_seq(&rt), noise))
        } else {
            None
        };

        let mut out = Vec::with_capacity(cfg.detectors.len());
        for (&det, &on) in cfg.detectors.iter().zip(active) {
            if !on {
                out.push(Outcome::Skipped("stopped".into()));
                continue;
            }
            let start = timing.then(Instant::now);
            let llrs: std::result::Result<LlrFrame, Error> = match det {
                DetectorKind::Qbcjr => match &model {
                    Some(m) => build_trellis(m.dominant(), self.cst.size(), n_d, u128::from(cfg.trellis_budget))
                        .and_then(|tr| qbcjr_llrs(&y, m, &tr, &self.quant, &self.cst)),
                    None => {
                        out.push(Outcome::Skipped("tap selection returned an empty dominant set".into()));
                        continue;
                    }
                },
                DetectorKind::Qbp => match &model {
                    Some(m) => {
                        let needed = (self.cst.size() as u128).checked_pow(m.dominant().len() as u32).unwrap_or(u128::MAX);
                        if needed > u128::from(cfg.trellis_budget) {
                            Err(Error::Budget { needed, budget: u128::from(cfg.trellis_budget) })
                        } else {
                            qbp_llrs(&y, m, &self.quant, &self.cst, n_d, cfg.n_it)
                        }
                    }
                    None => {
                        out.push(Outcome::Skipped("tap selection returned an empty dominant set".into()));
                        continue;
                    }
                },
                DetectorKind::Bcjr => bcjr_unquantized_llrs(&r, &rx_ch, sigma2, &self.cst, n_d, u128::from(cfg.trellis_budget)),
                DetectorKind::OfdmMmse => {
                    let (yt, noise) = ofdm.as_ref().expect("OFDM frame prepared");
                    ofdm_mmse_llrs(yt, &rx_ch, *noise, &self.cst, n_d)
                }
                DetectorKind::OfdmBussgang => {
                    let (yt, noise) = ofdm.as_ref().expect("OFDM frame prepared");
                    ofdm_bussgang_llrs(yt, &rx_ch, *noise, &self.quant, &self.cst, n_d)
                }
                DetectorKind::Oracle => bruteforce_llrs(&y, &rx_ch, &self.quant, sigma2, &self.cst, n_d),
            };
            let llrs = match llrs {
                Ok(f) => f,
                Err(e @ Error::Budget { .. }) => {
                    out.push(Outcome::Skipped(e.to_string()));
                    continue;
                }
                Err(e) => return Err(e).with_context(|| format!("{det} at frame {index}")),
            };
            let decoded = self.code.decode(&llrs.llrs, cfg.decoder_iters)?;
            let seconds = start.map_or(0.0, |t| t.elapsed().as_secs_f64());
            out.push(Outcome::Ran { error: decoded.info != info, ops: llrs.ops.total(), seconds });
        }
        Ok(out)
    }
}

/// Per-detector accumulator over frames taken in index order.
#[derive(Clone, Debug, Default)]
struct Tally {
    frames: usize,
    errors: usize,
    ops: f64,
    seconds: f64,
    skipped: usize,
    reason: Option<String>,
    done: bool,
}

impl Tally {
    fn push(&mut self, o: &Outcome, stop_errors: usize) {
        if self.done {
            return;
        }
        match o {
            Outcome::Ran { error, ops, seconds } => {
                self.frames += 1;
                self.errors += usize::from(*error);
                self.ops += *ops as f64;
                self.seconds += seconds;
                if self.errors >= stop_errors {
                    self.done = true;
                }
            }
            Outcome::Skipped(why) => {
                self.skipped += 1;
                self.reason.get_or_insert_with(|| why.clone());
            }
        }
    }
}

/// FER sweep without timing.
pub fn run_fer(cfg: &SimConfig) -> Result<FerTable> {
    run_fer_with(cfg, &RunOptions::default(), |_| {})
}

/// FER sweep. `progress` is called once per finished row.
///
/// Frame `i` of every point uses stream id `i`, so points share channels,
/// bits and noise shapes. Frames run in parallel batches; the early stop
/// scans outcomes in frame order, which keeps results independent of
/// scheduling and batch size.
pub fn run_fer_with(cfg: &SimConfig, opts: &RunOptions, mut progress: impl FnMut(&FerRow)) -> Result<FerTable> {
    let setup = Setup::new(cfg)?;
    let nd = cfg.detectors.len();
    let batch = opts.batch.max(1);
    let mut table = FerTable::default();
    for &ebn0 in &cfg.ebn0_db {
        let mut tallies = vec![Tally::default(); nd];
        let mut next = 0usize;
        while next < cfg.frames && tallies.iter().any(|t| !t.done) {
            let end = (next + batch).min(cfg.frames);
            let active: Vec<bool> = tallies.iter().map(|t| !t.done).collect();
            let outcomes = (next..end)
                .into_par_iter()
                .map(|i| setup.frame(i as u64, ebn0, &active, opts.timing))
                .collect::<Result<Vec<_>>>()?;
            for frame in &outcomes {
                for (t, o) in tallies.iter_mut().zip(frame) {
                    t.push(o, cfg.stop_errors);
                }
            }
            next = end;
        }
        for (&det, t) in cfg.detectors.iter().zip(tallies) {
            let row = FerRow {
                detector: det,
                ebn0_db: ebn0,
                frames: t.frames,
                errors: t.errors,
                fer: if t.frames == 0 { f64::NAN } else { t.errors as f64 / t.frames as f64 },
                mean_ops: if t.frames == 0 { 0.0 } else { t.ops / t.frames as f64 },
                seconds: t.seconds,
                skipped: t.skipped,
                skip_reason: t.reason,
            };
            progress(&row);
            table.rows.push(row);
        }
    }
    Ok(table)
}
