use num_complex::Complex;

use super::llr::{LlrFrame, OpCounts};
use super::tables::sparse_tables;
use crate::coding::Constellation;
use crate::error::{param, Result};
use crate::numeric::Real;
use crate::quantizer::Quantizer;
use crate::sparsify::SparseIsiModel;

pub const DEFAULT_BP_ITERATIONS: usize = 3;

/// Messages on the sparse factor graph. Variable `v` (1-based slot) has one
/// edge per dominant delay `D[p]`, connecting it to check `v + D[p]`.
#[derive(Clone, Debug)]
pub struct BpMessages<T> {
    q: usize,
    edges: usize,
    /// Variable-to-check tables `T_v^{v+ℓ}`.
    t: Vec<T>,
    /// Check-to-variable tables `R_v^{v+ℓ}`.
    r: Vec<T>,
    /// Edges whose incoming product vanished and were reset to uniform.
    pub underflows: usize,
}

impl<T: Real> BpMessages<T> {
    fn new(n_d: usize, edges: usize, q: usize) -> Self {
        let u = T::one() / T::lit(q as f64);
        Self { q, edges, t: vec![u; n_d * edges * q], r: vec![u; n_d * edges * q], underflows: 0 }
    }

    #[inline]
    fn at(&self, v: usize, p: usize) -> usize {
        ((v - 1) * self.edges + p) * self.q
    }

    /// `T` on the edge of variable `v` through dominant position `p`.
    pub fn t(&self, v: usize, p: usize) -> &[T] {
        let i = self.at(v, p);
        &self.t[i..i + self.q]
    }

    pub fn r(&self, v: usize, p: usize) -> &[T] {
        let i = self.at(v, p);
        &self.r[i..i + self.q]
    }
}

/// Scales to unit sum; an all-zero (or non-finite) vector becomes uniform.
fn normalize_or_uniform<T: Real>(v: &mut [T]) -> bool {
    let s: T = v.iter().copied().sum();
    if s > T::zero() && s.is_finite() {
        v.iter_mut().for_each(|x| *x /= s);
        true
    } else {
        let u = T::one() / T::lit(v.len() as f64);
        v.iter_mut().for_each(|x| *x = u);
        false
    }
}

/// Runs `n_it` flooding iterations, calling `observe(iteration, messages)`
/// after each one, and returns the final messages with operation counts.
pub fn qbp_run<T: Real>(
    y: &[Vec<Complex<T>>],
    model: &SparseIsiModel<T>,
    quant: &Quantizer<T>,
    cst: &Constellation,
    n_d: usize,
    n_it: usize,
    mut observe: impl FnMut(usize, &BpMessages<T>),
) -> Result<(BpMessages<T>, OpCounts)> {
    if n_it == 0 {
        return param("Q-BP needs at least one iteration");
    }
    if model.dominant().is_empty() {
        return param("the dominant set must be nonempty");
    }
    if n_d == 0 {
        return param("N_d must be at least 1");
    }
    let q = cst.size();
    let alphabet = cst.alphabet::<T>();
    let slots = n_d + model.l_d() - 1;
    let (tables, evals) = sparse_tables(y, model, quant, &alphabet, n_d, slots)?;
    let edges = model.dominant().len();
    let mut ops = OpCounts { pmf_evals: evals, ..Default::default() };
    let mut msg = BpMessages::<T>::new(n_d, edges, q);
    let mut new_r = vec![T::zero(); msg.r.len()];
    let mut digits = Vec::new();
    let mut weights = Vec::new();
    for it in 1..=n_it {
        new_r.iter_mut().for_each(|x| *x = T::zero());
        for (n0, table) in tables.iter().enumerate() {
            let n = n0 + 1;
            let deg = table.delays.len();
            if deg == 0 {
                continue;
            }
            let offsets: Vec<usize> = table.delays.iter().zip(&table.positions).map(|(&d, &p)| msg.at(n - d, p)).collect();
            for (h, &p) in table.probs.iter().enumerate() {
                digits.clear();
                let mut rest = h;
                for _ in 0..deg {
                    digits.push(rest % q);
                    rest /= q;
                }
                weights.clear();
                weights.extend(offsets.iter().zip(&digits).map(|(&o, &k)| msg.t[o + k]));
                for j in 0..deg {
                    let mut term = p;
                    for (i, &w) in weights.iter().enumerate() {
                        if i != j {
                            term *= w;
                        }
                    }
                    new_r[offsets[j] + digits[j]] += term;
                }
            }
            ops.bp_terms += (deg * table.probs.len()) as u64;
        }
        for chunk in new_r.chunks_mut(q) {
            if !normalize_or_uniform(chunk) {
                msg.underflows += 1;
            }
        }
        std::mem::swap(&mut msg.r, &mut new_r);
        for v in 1..=n_d {
            for p in 0..edges {
                let o = msg.at(v, p);
                for k in 0..q {
                    let mut prod = T::one();
                    for p2 in (0..edges).filter(|&p2| p2 != p) {
                        prod *= msg.r[msg.at(v, p2) + k];
                    }
                    msg.t[o + k] = prod;
                }
                if !normalize_or_uniform(&mut msg.t[o..o + q]) {
                    msg.underflows += 1;
                }
            }
        }
        observe(it, &msg);
    }
    Ok((msg, ops))
}

/// Q-BP soft output after `n_it` flooding iterations.
pub fn qbp_llrs<T: Real>(
    y: &[Vec<Complex<T>>],
    model: &SparseIsiModel<T>,
    quant: &Quantizer<T>,
    cst: &Constellation,
    n_d: usize,
    n_it: usize,
) -> Result<LlrFrame> {
    let (msg, ops) = qbp_run(y, model, quant, cst, n_d, n_it, |_, _| {})?;
    let q = cst.size();
    let marg: Vec<Vec<T>> = (1..=n_d)
        .map(|v| (0..q).map(|k| (0..msg.edges).map(|p| msg.r(v, p)[k]).fold(T::one(), |a, b| a * b)).collect())
        .collect();
    let mut frame = LlrFrame::from_marginals(&marg, cst);
    frame.ops = ops;
    frame.underflows += msg.underflows;
    Ok(frame)
}
