//! Diagnostics behind the `select`, `estimate` and `oracle-check` subcommands.

use std::io::Write;

use anyhow::Result;
use sparseq_core::chanest::{estimation_nmse, gen_pilots, ls_estimate, PilotNorm};
use sparseq_core::channel::{propagate, ChannelSnapshot};
use sparseq_core::coding::{Constellation, Modulation};
use sparseq_core::detect::{bruteforce_llrs, build_trellis, qbcjr_llrs, qbp_llrs, LlrFrame};
use sparseq_core::sparsify::{select_dominant_taps, TapSelection};
use sparseq_core::{eb_n0_to_sigma2, Channel, Cplx, Mat, Model, Quant, RngStream};

use crate::config::SimConfig;
use crate::run::Setup;

/// Tap selection on the receiver channel of one frame.
pub struct SelectReport {
    pub channel: Channel,
    pub sigma2: f64,
    pub selection: TapSelection<f64>,
}

pub fn select_report(cfg: &SimConfig, ebn0_db: f64, frame: u64) -> Result<SelectReport> {
    let setup = Setup::new(cfg)?;
    let root = RngStream::new(cfg.seed, frame);
    let truth = setup.channel(&root)?;
    let channel = setup.receiver_channel(&truth, &root, ebn0_db)?;
    let sigma2 = eb_n0_to_sigma2(ebn0_db, cfg.n_tx, setup.cst.m());
    let selection = select_dominant_taps(&channel, sigma2, &setup.quant, cfg.eps_th, cfg.d_max)?;
    Ok(SelectReport { channel, sigma2, selection })
}

impl SelectReport {
    /// `step,delay,nmse`; step 0 is the empty set.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "delay", "nmse"])?;
        w.write_record(["0", "", &self.selection.initial_nmse.to_string()])?;
        for (i, s) in self.selection.steps.iter().enumerate() {
            w.write_record([(i + 1).to_string(), s.delay.to_string(), s.nmse.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn snapshot(&self) -> ChannelSnapshot {
        ChannelSnapshot::from_channel(&self.channel)
    }
}

/// Mean LS-estimation NMSE at one pilot Eb/N0.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub ebn0_db: f64,
    pub t_p: usize,
    pub trials: usize,
    pub nmse: f64,
}

/// LS estimates from quantized pilots on `trials` channel draws per point.
pub fn estimate_report(cfg: &SimConfig, t_p: usize, norm: PilotNorm, ebn0_db: &[f64], trials: usize) -> Result<Vec<EstimateRow>> {
    let setup = Setup::new(cfg)?;
    let mut rows = Vec::with_capacity(ebn0_db.len());
    for &db in ebn0_db {
        let sigma2 = eb_n0_to_sigma2(db, cfg.n_tx, setup.cst.m());
        let mut acc = 0.0;
        for i in 0..trials {
            let root = RngStream::new(cfg.seed, i as u64);
            let truth = setup.channel(&root)?;
            let pilots = gen_pilots::<f64>(t_p, cfg.n_tx, truth.len(), norm, &mut root.fork(4))?;
            let r = propagate(&truth, &pilots.symbols(), None, sigma2, &mut root.fork(5))?;
            let est = ls_estimate(&setup.quant.quantize_seq(&r), &pilots, &setup.quant)?;
            acc += estimation_nmse(&est, &truth);
        }
        rows.push(EstimateRow { ebn0_db: db, t_p, trials, nmse: acc / trials.max(1) as f64 });
    }
    Ok(rows)
}

pub fn write_estimate_csv<W: Write>(rows: &[EstimateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ebn0_db", "t_p", "trials", "nmse"])?;
    for r in rows {
        w.write_record([r.ebn0_db.to_string(), r.t_p.to_string(), r.trials.to_string(), r.nmse.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One family of tiny-instance equivalence checks.
#[derive(Clone, Debug)]
pub struct OracleCase {
    pub name: String,
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl OracleCase {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// `max_i |a_i − b_i| / max(1, |b_i|)`.
pub fn llr_deviation(a: &LlrFrame, b: &LlrFrame) -> f64 {
    assert_eq!(a.len(), b.len(), "LLR frames differ in length");
    a.llrs.iter().zip(&b.llrs).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
}

/// Random channel with `CN(0, 1)` entries on the given delays.
pub fn random_channel(rng: &mut RngStream, n_rx: usize, n_tx: usize, delays: &[usize]) -> Channel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let taps = delays.iter().map(|&d| (d, Mat::from_fn(n_rx, n_tx, |_, _| Cplx::new(rng.normal() * s, rng.normal() * s))));
    Channel::new(n_rx, n_tx, taps).expect("valid random channel")
}

/// Quantized observations of a uniformly random BPSK/QAM frame.
pub fn random_observation(
    rng: &mut RngStream,
    ch: &Channel,
    cst: &Constellation,
    quant: &Quant,
    sigma2: f64,
    n_d: usize,
) -> Result<Vec<Vec<Cplx>>> {
    use rand::Rng;
    let x: Vec<Vec<Cplx>> = (0..n_d).map(|_| cst.symbol(rng.gen_range(0..cst.size())).to_vec()).collect();
    let r = propagate(ch, &x, None, sigma2, rng)?;
    Ok(quant.quantize_seq(&r))
}

/// Q-BCJR against exhaustive marginalization on dense tiny instances, and
/// Q-BP against the exact posterior on tree-shaped factor graphs.
pub fn oracle_check(seed: u64, instances: usize) -> Result<Vec<OracleCase>> {
    let cst = Constellation::new(Modulation::Bpsk, 1)?;
    let mut cases = Vec::new();

    let mut dense = 0.0f64;
    for i in 0..instances {
        let mut rng = RngStream::new(seed, i as u64);
        let bits = 1 + (i % 2) as u32;
        let quant = Quant::uniform(bits)?;
        let ch = random_channel(&mut rng, 2, 1, &[0, 1, 2]);
        let sigma2 = 0.1 + 0.9 * rand::Rng::gen::<f64>(&mut rng);
        let n_d = 6;
        let y = random_observation(&mut rng, &ch, &cst, &quant, sigma2, n_d)?;
        let model = Model::new(&ch, &[0, 1, 2], sigma2)?;
        let tr = build_trellis(model.dominant(), cst.size(), n_d, 1 << 16)?;
        let a = qbcjr_llrs(&y, &model, &tr, &quant, &cst)?;
        let b = bruteforce_llrs(&y, &ch, &quant, sigma2, &cst, n_d)?;
        dense = dense.max(llr_deviation(&a, &b));
    }
    cases.push(OracleCase {
        name: "qbcjr vs exhaustive (N_rx=2, BPSK, N_d=6, D={0,1,2}, B in {1,2})".into(),
        instances,
        max_deviation: dense,
        tolerance: 1e-8,
    });

    for (label, delays, n_d) in [("D={0}, N_d=5", vec![0usize], 5usize), ("D={0,1}, N_d=2", vec![0, 1], 2)] {
        let mut worst = 0.0f64;
        for i in 0..instances {
            let mut rng = RngStream::new(seed ^ 0x5eed, i as u64);
            let quant = Quant::uniform(1 + (i % 2) as u32)?;
            let ch = random_channel(&mut rng, 2, 1, &delays);
            let sigma2 = 0.1 + 0.9 * rand::Rng::gen::<f64>(&mut rng);
            let y = random_observation(&mut rng, &ch, &cst, &quant, sigma2, n_d)?;
            let model = Model::new(&ch, &delays, sigma2)?;
            let a = qbp_llrs(&y, &model, &quant, &cst, n_d, 3)?;
            let b = bruteforce_llrs(&y, &ch, &quant, sigma2, &cst, n_d)?;
            worst = worst.max(llr_deviation(&a, &b));
        }
        cases.push(OracleCase {
            name: format!("qbp (3 iterations) vs exhaustive on a tree, {label}"),
            instances,
            max_deviation: worst,
            tolerance: 1e-8,
        });
    }
    Ok(cases)
}
