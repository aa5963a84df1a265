use num_complex::Complex;

use super::llr::{LlrFrame, OpCounts};
use super::tables::{sparse_tables, SlotTable};
use super::trellis::Trellis;
use crate::coding::Constellation;
use crate::error::{param, Result};
use crate::numeric::Real;
use crate::quantizer::Quantizer;
use crate::sparsify::SparseIsiModel;

/// Per-state hypothesis offsets into a slot table.
struct SlotIndex {
    k_weight: usize,
    base: Vec<usize>,
}

fn slot_index<T>(tr: &Trellis, table: &SlotTable<T>, prev_states: &[usize]) -> SlotIndex {
    let q = tr.alphabet_size();
    let mut k_weight = 0;
    let mut shifted = Vec::new();
    for (j, &d) in table.delays.iter().enumerate() {
        let w = q.pow(j as u32);
        if d == 0 {
            k_weight = w;
        } else {
            shifted.push((d - 1, w));
        }
    }
    let base = prev_states.iter().map(|&sp| shifted.iter().map(|&(i, w)| tr.digit(sp, i) * w).sum()).collect();
    SlotIndex { k_weight, base }
}

fn normalize_in_place<T: Real>(v: &mut [T]) {
    let s: T = v.iter().copied().sum();
    if s > T::zero() && s.is_finite() {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Forward-backward over `tr` with slot likelihood `tables` (slots `1..=N_d+L_D−1`).
/// Returns unnormalized symbol marginals for slots `1..=N_d`.
pub(crate) fn forward_backward<T: Real>(tr: &Trellis, tables: &[SlotTable<T>], normalize: bool, ops: &mut OpCounts) -> Vec<Vec<T>> {
    let n_d = tr.n_d();
    let last = tr.n_slots();
    let space = tr.state_space();
    let q = tr.alphabet_size();
    let prior = |n: usize| if tr.is_data_slot(n) { T::one() / T::lit(q as f64) } else { T::one() };
    let states: Vec<Vec<usize>> = (0..=last).map(|n| tr.states(n)).collect();
    let index: Vec<SlotIndex> = (1..=last).map(|n| slot_index(tr, &tables[n - 1], &states[n - 1])).collect();

    let mut alpha = vec![vec![T::zero(); space]; n_d];
    alpha[0][0] = T::one();
    for n in 1..n_d {
        let (done, rest) = alpha.split_at_mut(n);
        let (prev, cur) = (&done[n - 1], &mut rest[0]);
        let idx = &index[n - 1];
        let probs = &tables[n - 1].probs;
        let pr = prior(n);
        for (i, &sp) in states[n - 1].iter().enumerate() {
            let a = prev[sp];
            for k in 0..tr.slot_symbols(n) {
                cur[tr.next_state(sp, k)] += a * pr * probs[idx.base[i] + k * idx.k_weight];
            }
        }
        ops.forward += tr.transition_count(n) as u64;
        if normalize {
            normalize_in_place(cur);
        }
    }

    let mut beta = vec![vec![T::zero(); space]; n_d];
    let mut cur = vec![T::zero(); space];
    cur[0] = T::one();
    if last <= n_d {
        beta[last - 1] = cur.clone();
    }
    for n in (2..=last).rev() {
        let mut prev = vec![T::zero(); space];
        let idx = &index[n - 1];
        let probs = &tables[n - 1].probs;
        let pr = prior(n);
        for (i, &sp) in states[n - 1].iter().enumerate() {
            let mut acc = T::zero();
            for k in 0..tr.slot_symbols(n) {
                acc += pr * probs[idx.base[i] + k * idx.k_weight] * cur[tr.next_state(sp, k)];
            }
            prev[sp] = acc;
        }
        ops.backward += tr.transition_count(n) as u64;
        if normalize {
            normalize_in_place(&mut prev);
        }
        cur = prev;
        if n - 1 <= n_d {
            beta[n - 2] = cur.clone();
        }
    }

    let mut marginals = vec![vec![T::zero(); q]; n_d];
    for n in 1..=n_d {
        let idx = &index[n - 1];
        let probs = &tables[n - 1].probs;
        let pr = prior(n);
        for (i, &sp) in states[n - 1].iter().enumerate() {
            let a = alpha[n - 1][sp];
            for (k, m) in marginals[n - 1].iter_mut().enumerate() {
                *m += a * pr * probs[idx.base[i] + k * idx.k_weight] * beta[n - 1][tr.next_state(sp, k)];
            }
        }
        ops.marginal += tr.transition_count(n) as u64;
    }
    marginals
}

fn check_setup<T: Real>(model: &SparseIsiModel<T>, tr: &Trellis, q: usize) -> Result<()> {
    if model.dominant() != tr.dominant() {
        return param("trellis and model disagree on the dominant set");
    }
    if q != tr.alphabet_size() {
        return param("trellis alphabet size differs from the constellation");
    }
    Ok(())
}

/// Symbol marginals `P(x[n] = x_k, Ỹ)` for `n = 1..=N_d` (scaled per slot when `normalize`).
pub fn qbcjr_marginals<T: Real>(
    y: &[Vec<Complex<T>>],
    model: &SparseIsiModel<T>,
    trellis: &Trellis,
    quant: &Quantizer<T>,
    cst: &Constellation,
    normalize: bool,
) -> Result<(Vec<Vec<T>>, OpCounts)> {
    check_setup(model, trellis, cst.size())?;
    let alphabet = cst.alphabet::<T>();
    let (tables, evals) = sparse_tables(y, model, quant, &alphabet, trellis.n_d(), trellis.n_slots())?;
    let mut ops = OpCounts { pmf_evals: evals, ..Default::default() };
    let marg = forward_backward(trellis, &tables, normalize, &mut ops);
    Ok((marg, ops))
}

/// Q-BCJR soft output for one frame of `trellis.n_d()` symbol vectors.
pub fn qbcjr_llrs<T: Real>(
    y: &[Vec<Complex<T>>],
    model: &SparseIsiModel<T>,
    trellis: &Trellis,
    quant: &Quantizer<T>,
    cst: &Constellation,
) -> Result<LlrFrame> {
    let (marg, ops) = qbcjr_marginals(y, model, trellis, quant, cst, true)?;
    let mut frame = LlrFrame::from_marginals(&marg, cst);
    frame.ops = ops;
    Ok(frame)
}
