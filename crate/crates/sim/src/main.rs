use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sparseq_core::chanest::PilotNorm;
use sparseq_sim::diag::{estimate_report, oracle_check, select_report, write_estimate_csv};
use sparseq_sim::{parse_detectors, parse_ebn0, run_fer_with, write_csv, CsirSpec, RunOptions, SimConfig};

#[derive(Parser)]
#[command(name = "sparseq", version, about = "Soft-output detection for sparse ISI channels with low-precision ADCs")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// FER sweep over Eb/N0 for the configured detectors.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated detector list (qbcjr,qbp,bcjr,ofdm_mmse,ofdm_bussgang,oracle).
        #[arg(long)]
        detectors: Option<String>,
        /// Frames per point.
        #[arg(long)]
        frames: Option<usize>,
        /// Frame errors after which a point stops.
        #[arg(long)]
        stop_errors: Option<usize>,
        /// Fill the seconds column with detector wall time.
        #[arg(long)]
        timing: bool,
    },
    /// Tap-selection trace for one frame's receiver channel.
    Select {
        #[command(flatten)]
        common: Common,
        /// Frame index whose channel is used.
        #[arg(long, default_value_t = 0)]
        frame: u64,
        /// Also write the channel as a snapshot JSON file.
        #[arg(long)]
        save_channel: Option<PathBuf>,
    },
    /// Tiny-instance equivalence suite (Q-BCJR and Q-BP vs exhaustive marginalization).
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
    /// LS channel-estimation NMSE from quantized pilots.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Pilot length; defaults to the config's LS setting or 2L.
        #[arg(long)]
        t_p: Option<usize>,
        /// Channel draws per point.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Eb/N0 list "0,2,4" or range "start:step:stop" in dB.
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
}

impl Common {
    fn load(&self) -> Result<SimConfig> {
        let mut cfg = SimConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = &self.ebn0 {
            cfg.ebn0_db = parse_ebn0(e)?;
        }
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Command::Sweep { common, detectors, frames, stop_errors, timing } => {
            let mut cfg = common.load()?;
            if let Some(d) = detectors {
                cfg.detectors = parse_detectors(&d)?;
            }
            if let Some(f) = frames {
                cfg.frames = f;
            }
            if let Some(s) = stop_errors {
                cfg.stop_errors = s;
            }
            cfg.validate()?;
            let opts = RunOptions { timing, ..Default::default() };
            let table = run_fer_with(&cfg, &opts, |r| {
                eprintln!("{:>14} {:>7.2} dB  frames {:>6}  errors {:>5}  fer {:.4}", r.detector, r.ebn0_db, r.frames, r.errors, r.fer);
                if let Some(why) = &r.skip_reason {
                    eprintln!("{:>14} skipped on {} frames: {why}", r.detector, r.skipped);
                }
            })?;
            write_csv(&table, common.output()?)?;
        }
        Command::Select { common, frame, save_channel } => {
            let cfg = common.load()?;
            let db = *cfg.ebn0_db.first().context("config has no Eb/N0 point")?;
            let rep = select_report(&cfg, db, frame)?;
            eprintln!("sigma2 = {}  dominant = {:?}  weak = {:?}", rep.sigma2, rep.selection.dominant, rep.selection.weak);
            if let Some(p) = save_channel {
                rep.snapshot().save(&p)?;
            }
            rep.write_csv(common.output()?)?;
        }
        Command::OracleCheck { seed, instances } => {
            let mut ok = true;
            for c in oracle_check(seed, instances)? {
                let tag = if c.passed() { "PASS" } else { "FAIL" };
                println!("{tag} {} instances={} max_dev={:.3e} tol={:.0e}", c.name, c.instances, c.max_deviation, c.tolerance);
                ok &= c.passed();
            }
            return Ok(ok);
        }
        Command::Estimate { common, t_p, trials } => {
            let cfg = common.load()?;
            let (cfg_tp, norm) = match &cfg.csir {
                CsirSpec::Ls { t_p, normalization, .. } => (Some(*t_p), *normalization),
                CsirSpec::Perfect => (None, PilotNorm::default()),
            };
            let l = sparseq_sim::Setup::new(&cfg)?.channel(&sparseq_core::RngStream::new(cfg.seed, 0))?.len();
            let t_p = t_p.or(cfg_tp).unwrap_or(2 * l);
            let rows = estimate_report(&cfg, t_p, norm, &cfg.ebn0_db, trials)?;
            write_estimate_csv(&rows, common.output()?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
