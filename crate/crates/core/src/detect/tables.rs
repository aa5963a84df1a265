use num_complex::Complex;
use num_traits::Zero;

use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::Real;
use crate::quantizer::Quantizer;
use crate::sparsify::{inv_part_scale, SlotBins, SparseIsiModel};

/// Observation likelihoods of one slot, indexed by the hypothesis over the
/// slot's valid delays: `h = Σ_j k_j·|X|^j` with `j` running over `delays`.
#[derive(Clone, Debug)]
pub(crate) struct SlotTable<T> {
    pub delays: Vec<usize>,
    /// Index of each delay in the model's dominant set.
    pub positions: Vec<usize>,
    pub probs: Vec<T>,
}

/// `H[d]·x_k` for every tap and symbol.
fn contributions<T: Real>(taps: &[&CMat<T>], alphabet: &[Vec<Complex<T>>]) -> Vec<Vec<Vec<Complex<T>>>> {
    taps.iter().map(|h| alphabet.iter().map(|x| h.mul_vec(x)).collect()).collect()
}

/// Calls `f(h, mean)` for every hypothesis over the given contributions.
fn for_each_hypothesis<T: Real>(contrib: &[Vec<Vec<Complex<T>>>], q: usize, n_rx: usize, mut f: impl FnMut(usize, &[Complex<T>])) {
    let count = q.pow(contrib.len() as u32);
    let mut mean = vec![Complex::<T>::zero(); n_rx];
    for h in 0..count {
        mean.iter_mut().for_each(|m| *m = Complex::zero());
        let mut rest = h;
        for c in contrib {
            let k = rest % q;
            rest /= q;
            for (m, v) in mean.iter_mut().zip(&c[k]) {
                *m += v;
            }
        }
        f(h, &mean);
    }
}

pub(crate) fn check_observations<T>(y: &[Vec<Complex<T>>], slots: usize, n_rx: usize) -> Result<()> {
    if y.len() < slots {
        return param(format!("need {slots} observation slots, got {}", y.len()));
    }
    if y[..slots].iter().any(|v| v.len() != n_rx) {
        return param("observation vector length differs from N_rx");
    }
    Ok(())
}

/// Quantized-observation PMF tables under the sparse model for slots `1..=slots`.
pub(crate) fn sparse_tables<T: Real>(
    y: &[Vec<Complex<T>>],
    model: &SparseIsiModel<T>,
    quant: &Quantizer<T>,
    alphabet: &[Vec<Complex<T>>],
    n_d: usize,
    slots: usize,
) -> Result<(Vec<SlotTable<T>>, u64)> {
    check_observations(y, slots, model.n_rx())?;
    let q = alphabet.len();
    let mut evals = 0u64;
    let mut tables = Vec::with_capacity(slots);
    for n in 1..=slots {
        let w = model.window(n, n_d);
        let bins = SlotBins::new(&y[n - 1], quant)?;
        let vars: Vec<T> = w.weak_power.iter().map(|&p| p + model.sigma2()).collect();
        let inv = inv_part_scale(&vars);
        let taps: Vec<&CMat<T>> = w.positions.iter().map(|&p| &model.dominant_taps()[p]).collect();
        let contrib = contributions(&taps, alphabet);
        let mut probs = vec![T::zero(); q.pow(taps.len() as u32)];
        for_each_hypothesis(&contrib, q, model.n_rx(), |h, mean| probs[h] = bins.pmf(mean, &inv));
        evals += probs.len() as u64;
        tables.push(SlotTable { delays: w.delays, positions: w.positions, probs });
    }
    Ok((tables, evals))
}

/// Gaussian-density tables for unquantized observations with all taps dominant.
/// Each slot is scaled by its largest entry.
pub(crate) fn gaussian_tables<T: Real>(
    r: &[Vec<Complex<T>>],
    taps: &[(usize, &CMat<T>)],
    sigma2: T,
    alphabet: &[Vec<Complex<T>>],
    n_d: usize,
    slots: usize,
) -> Result<(Vec<SlotTable<T>>, u64)> {
    let n_rx = taps.first().map_or(0, |(_, h)| h.rows());
    check_observations(r, slots, n_rx)?;
    let q = alphabet.len();
    let mut evals = 0u64;
    let mut tables = Vec::with_capacity(slots);
    for n in 1..=slots {
        let (positions, active): (Vec<usize>, Vec<(usize, &CMat<T>)>) =
            taps.iter().enumerate().filter(|(_, (d, _))| n > *d && n - d <= n_d).map(|(i, &t)| (i, t)).unzip();
        let contrib = contributions(&active.iter().map(|(_, h)| *h).collect::<Vec<_>>(), alphabet);
        let mut logs = vec![T::zero(); q.pow(active.len() as u32)];
        for_each_hypothesis(&contrib, q, n_rx, |h, mean| {
            logs[h] = -r[n - 1].iter().zip(mean).map(|(a, b)| (a - b).norm_sqr()).sum::<T>() / sigma2;
        });
        let peak = logs.iter().copied().fold(T::neg_infinity(), T::max);
        let probs = logs.into_iter().map(|l| (l - peak).exp()).collect::<Vec<_>>();
        evals += probs.len() as u64;
        tables.push(SlotTable { delays: active.iter().map(|(d, _)| *d).collect(), positions, probs });
    }
    Ok((tables, evals))
}
