use num_complex::Complex;
use num_traits::Zero;

use super::llr::{LlrFrame, OpCounts};
use crate::channel::ChannelTaps;
use crate::coding::Constellation;
use crate::error::{param, Error, Result};
use crate::numeric::Real;
use crate::quantizer::Quantizer;
use crate::sparsify::{inv_part_scale, SlotBins};

/// Largest number of sequences the oracle will enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 1_000_000;

/// Exact `P(x[n] = x_k, Y)` by enumerating every symbol sequence with the full channel.
pub fn bruteforce_marginals<T: Real>(
    y: &[Vec<Complex<T>>],
    ch: &ChannelTaps<T>,
    quant: &Quantizer<T>,
    sigma2: T,
    cst: &Constellation,
    n_d: usize,
) -> Result<(Vec<Vec<T>>, OpCounts)> {
    let q = cst.size();
    let count = (q as u128).checked_pow(n_d as u32).unwrap_or(u128::MAX);
    if count > BRUTEFORCE_LIMIT {
        return Err(Error::Budget { needed: count, budget: BRUTEFORCE_LIMIT });
    }
    if ch.is_empty() || n_d == 0 || !(sigma2 > T::zero()) {
        return param("oracle needs a nonempty channel, N_d ≥ 1 and positive noise variance");
    }
    let slots = n_d + ch.len() - 1;
    if y.len() < slots {
        return param(format!("need {slots} observation slots, got {}", y.len()));
    }
    let bins = y[..slots].iter().map(|v| SlotBins::new(v, quant)).collect::<Result<Vec<_>>>()?;
    let inv = inv_part_scale(&vec![sigma2; ch.n_rx()]);
    let alphabet = cst.alphabet::<T>();
    let zero = vec![Complex::<T>::zero(); ch.n_tx()];
    let mut marg = vec![vec![T::zero(); q]; n_d];
    let mut seq = vec![0usize; n_d];
    let mut ops = OpCounts::default();
    for idx in 0..count as usize {
        let mut rest = idx;
        for s in seq.iter_mut() {
            *s = rest % q;
            rest /= q;
        }
        let x: Vec<Vec<Complex<T>>> = seq.iter().map(|&k| alphabet[k].clone()).collect();
        let mut joint = T::one();
        for (n0, b) in bins.iter().enumerate() {
            let mut mean = vec![Complex::<T>::zero(); ch.n_rx()];
            for (l, h) in ch.taps() {
                let xs = if n0 >= l && n0 - l < n_d { &x[n0 - l] } else { &zero };
                for (m, v) in mean.iter_mut().zip(h.mul_vec(xs)) {
                    *m += v;
                }
            }
            joint *= b.pmf(&mean, &inv);
            ops.pmf_evals += 1;
        }
        for (n, &k) in seq.iter().enumerate() {
            marg[n][k] += joint;
        }
    }
    Ok((marg, ops))
}

/// Exhaustive-marginalization LLRs (uniform prior, full channel, no model reduction).
pub fn bruteforce_llrs<T: Real>(
    y: &[Vec<Complex<T>>],
    ch: &ChannelTaps<T>,
    quant: &Quantizer<T>,
    sigma2: T,
    cst: &Constellation,
    n_d: usize,
) -> Result<LlrFrame> {
    let (marg, ops) = bruteforce_marginals(y, ch, quant, sigma2, cst, n_d)?;
    let mut f = LlrFrame::from_marginals(&marg, cst);
    f.ops = ops;
    Ok(f)
}
