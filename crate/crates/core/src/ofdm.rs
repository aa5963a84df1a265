//! OFDM baselines: CP-OFDM transmission, per-subcarrier LMMSE ignoring the
//! quantizer, and LMMSE on the Bussgang-linearized quantizer.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftNum, FftPlanner};

use crate::channel::ChannelTaps;
use crate::coding::{Constellation, Modulation};
use crate::detect::{LlrFrame, OpCounts, LLR_CLAMP};
use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::{normal_interval, Real};
use crate::quantizer::Quantizer;

/// Scalar usable by the OFDM code.
pub trait OfdmReal: Real + FftNum {}
impl<T: Real + FftNum> OfdmReal for T {}

/// Noise variance per received sample that charges the CP overhead to the
/// data: `σ²·(N_d + L − 1)/N_d`.
pub fn cp_noise_variance<T: Real>(sigma2: T, n_sc: usize, l: usize) -> T {
    sigma2 * T::lit((n_sc + l.max(1) - 1) as f64) / T::lit(n_sc as f64)
}

fn plan<T: OfdmReal>(n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    let mut p = FftPlanner::new();
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Unitary transform of each antenna stream of `seq` (slot-major).
fn transform<T: OfdmReal>(seq: &[Vec<Complex<T>>], inverse: bool) -> Vec<Vec<Complex<T>>> {
    let n = seq.len();
    let dims = seq.first().map_or(0, Vec::len);
    let fft = plan::<T>(n, inverse);
    let scale = T::one() / T::lit(n as f64).sqrt();
    let mut out = vec![vec![Complex::zero(); dims]; n];
    let mut buf = vec![Complex::zero(); n];
    for a in 0..dims {
        for (b, s) in buf.iter_mut().zip(seq) {
            *b = s[a];
        }
        fft.process(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            o[a] = b * scale;
        }
    }
    out
}

/// Frequency-domain symbols → time-domain samples with a CP of `cp_len` slots.
pub fn ofdm_modulate<T: OfdmReal>(x_freq: &[Vec<Complex<T>>], cp_len: usize) -> Vec<Vec<Complex<T>>> {
    let n = x_freq.len();
    let t = transform(x_freq, true);
    (0..n + cp_len).map(|i| t[(i + n - cp_len % n.max(1)) % n].clone()).collect()
}

/// Drops the CP and returns the `n_sc` frequency-domain observations.
pub fn ofdm_demodulate<T: OfdmReal>(y_time: &[Vec<Complex<T>>], n_sc: usize, cp_len: usize) -> Result<Vec<Vec<Complex<T>>>> {
    if y_time.len() < n_sc + cp_len || n_sc == 0 {
        return param(format!("need {} time samples, got {}", n_sc + cp_len, y_time.len()));
    }
    Ok(transform(&y_time[cp_len..cp_len + n_sc], false))
}

/// Per-subcarrier channel matrices `H_k = Σ_ℓ H[ℓ] e^{−j2πkℓ/N}`.
pub fn subcarrier_channels<T: Real>(ch: &ChannelTaps<T>, n_sc: usize) -> Vec<CMat<T>> {
    (0..n_sc)
        .map(|k| {
            let mut h = CMat::zeros(ch.n_rx(), ch.n_tx());
            for (l, tap) in ch.taps() {
                let ang = -T::TAU() * T::lit(((k * l) % n_sc) as f64) / T::lit(n_sc as f64);
                h = h.add(&tap.scale(Complex::from_polar(T::one(), ang)));
            }
            h
        })
        .collect()
}

/// Per-antenna second-order quantities of one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct BussgangStats<T> {
    pub gain: Vec<T>,
    pub distortion: Vec<T>,
}

fn gauss_density<T: Real>(x: T, s: T) -> T {
    if x.is_infinite() {
        return T::zero();
    }
    let z = x / s;
    (-(z * z) / T::lit(2.0)).exp() / (s * T::TAU().sqrt())
}

/// Bussgang gain `E[Q(u)u]/s²` for `u ~ N(0, s²)`, `s² = part_var`.
pub fn bussgang_gain<T: Real>(quant: &Quantizer<T>, part_var: T) -> Result<T> {
    if !(part_var > T::zero()) {
        return param("Bussgang statistics need a positive input variance");
    }
    let s = part_var.sqrt();
    let e = quant.edges();
    Ok(quant
        .levels()
        .iter()
        .enumerate()
        .map(|(p, &q)| q * (gauss_density(e[p], s) - gauss_density(e[p + 1], s)))
        .sum())
}

/// `E[Q(u)²] − G²s²` per real dimension.
pub fn bussgang_distortion<T: Real>(quant: &Quantizer<T>, part_var: T) -> Result<T> {
    let g = bussgang_gain(quant, part_var)?;
    let s = part_var.sqrt();
    let e = quant.edges();
    let second: T = quant
        .levels()
        .iter()
        .enumerate()
        .map(|(p, &q)| q * q * normal_interval(e[p] / s, e[p + 1] / s))
        .sum();
    Ok((second - g * g * part_var).max(T::zero()))
}

/// Gain and complex distortion variance per receive antenna for unit-power
/// symbols through `ch` with noise `sigma2`.
pub fn bussgang_stats<T: Real>(ch: &ChannelTaps<T>, sigma2: T, quant: &Quantizer<T>) -> Result<BussgangStats<T>> {
    let mut gain = Vec::with_capacity(ch.n_rx());
    let mut distortion = Vec::with_capacity(ch.n_rx());
    for r in 0..ch.n_rx() {
        let p: T = ch.taps().map(|(_, h)| h.row_norm_sqr(r)).sum();
        let part = (p + sigma2) / T::lit(2.0);
        if !(part > T::zero()) {
            return param(format!("receive antenna {r} has zero signal and noise variance"));
        }
        gain.push(bussgang_gain(quant, part)?);
        distortion.push(T::lit(2.0) * bussgang_distortion(quant, part)?);
    }
    Ok(BussgangStats { gain, distortion })
}

/// LMMSE with diagonal noise covariance, unbiased per stream, followed by
/// per-bit Gaussian demapping. Appends `M` LLRs to `out`.
fn lmmse_demap<T: Real>(y: &[Complex<T>], h: &CMat<T>, noise: &[T], cst: &Constellation, out: &mut Vec<f64>, clamped: &mut usize) -> Result<()> {
    let n_tx = h.cols();
    let w_rows: Vec<T> = noise.iter().map(|&v| T::one() / v.sqrt()).collect();
    let hw = CMat::from_fn(h.rows(), n_tx, |r, c| h[(r, c)] * w_rows[r]);
    let yw: Vec<Complex<T>> = y.iter().zip(&w_rows).map(|(a, &s)| a * s).collect();
    let gram = hw.adjoint().matmul(&hw).add(&CMat::identity(n_tx));
    let inv = gram.inverse()?;
    let w = inv.matmul(&hw.adjoint());
    let est = w.mul_vec(&yw);
    let bias = w.matmul(&hw);
    let push = |v: f64, out: &mut Vec<f64>, clamped: &mut usize| {
        if v.abs() > LLR_CLAMP {
            *clamped += 1;
        }
        out.push(v.clamp(-LLR_CLAMP, LLR_CLAMP));
    };
    for t in 0..n_tx {
        let mu = bias[(t, t)].re.as_f64().clamp(1e-300, 1.0 - 1e-15);
        let z = est[t] / T::lit(mu);
        let nu = (1.0 - mu) / mu;
        let (re, im) = (z.re.as_f64(), z.im.as_f64());
        match cst.modulation() {
            Modulation::Bpsk => push(4.0 * re / nu, out, clamped),
            Modulation::Qam4 => {
                let c = 2.0 * 2f64.sqrt() / nu;
                push(c * re, out, clamped);
                push(c * im, out, clamped);
            }
        }
    }
    Ok(())
}

fn linear_ops(n_rx: usize, n_tx: usize, n_sc: usize) -> u64 {
    let log = (usize::BITS - n_sc.leading_zeros()) as usize;
    (n_rx * n_sc * log + n_sc * (n_tx * n_tx * n_rx + n_tx * n_tx * n_tx + n_tx * n_rx)) as u64
}

fn check_frame<T>(ch: &ChannelTaps<T>, cst: &Constellation, n_sc: usize) -> Result<()>
where
    T: Real,
{
    if ch.n_tx() != cst.n_tx() {
        return param("constellation and channel disagree on N_tx");
    }
    if ch.is_empty() || n_sc == 0 {
        return param("OFDM needs a nonempty channel and at least one subcarrier");
    }
    Ok(())
}

/// Per-subcarrier LMMSE that treats the samples as unquantized.
/// `noise_var` is the per-sample noise variance (see [`cp_noise_variance`]).
pub fn ofdm_mmse_llrs<T: OfdmReal>(
    y_time: &[Vec<Complex<T>>],
    ch: &ChannelTaps<T>,
    noise_var: T,
    cst: &Constellation,
    n_sc: usize,
) -> Result<LlrFrame> {
    check_frame(ch, cst, n_sc)?;
    let yf = ofdm_demodulate(y_time, n_sc, ch.len() - 1)?;
    let hk = subcarrier_channels(ch, n_sc);
    let noise = vec![noise_var.max(T::lit(1e-300)); ch.n_rx()];
    let mut f = LlrFrame { bits_per_symbol: cst.m(), ..Default::default() };
    for (y, h) in yf.iter().zip(&hk) {
        lmmse_demap(y, h, &noise, cst, &mut f.llrs, &mut f.clamped)?;
    }
    f.ops = OpCounts { linear: linear_ops(ch.n_rx(), ch.n_tx(), n_sc), ..Default::default() };
    Ok(f)
}

/// Per-subcarrier LMMSE on the Bussgang-linearized model `y = G·r + d`.
/// Statistics come from `ch` (true or estimated) and `noise_var`.
pub fn ofdm_bussgang_llrs<T: OfdmReal>(
    y_time: &[Vec<Complex<T>>],
    ch: &ChannelTaps<T>,
    noise_var: T,
    quant: &Quantizer<T>,
    cst: &Constellation,
    n_sc: usize,
) -> Result<LlrFrame> {
    check_frame(ch, cst, n_sc)?;
    let stats = bussgang_stats(ch, noise_var, quant)?;
    let yf = ofdm_demodulate(y_time, n_sc, ch.len() - 1)?;
    let hk = subcarrier_channels(ch, n_sc);
    let noise: Vec<T> = stats
        .gain
        .iter()
        .zip(&stats.distortion)
        .map(|(&g, &d)| (g * g * noise_var + d).max(T::lit(1e-300)))
        .collect();
    let mut f = LlrFrame { bits_per_symbol: cst.m(), ..Default::default() };
    for (y, h) in yf.iter().zip(&hk) {
        let heff = CMat::from_fn(h.rows(), h.cols(), |r, c| h[(r, c)] * stats.gain[r]);
        lmmse_demap(y, &heff, &noise, cst, &mut f.llrs, &mut f.clamped)?;
    }
    f.ops = OpCounts { linear: linear_ops(ch.n_rx(), ch.n_tx(), n_sc), ..Default::default() };
    Ok(f)
}
