//! Dominant/weak tap partition, conditional PMFs of quantized observations,
//! and greedy dominant-tap selection by the closed-form NMSE criterion.
//!
//! Time slots are 1-based here and in the detectors: data occupies slots
//! `1..=N_d` and any symbol outside that range is the zero vector.

use num_complex::Complex;
use num_traits::Zero;

use crate::channel::ChannelTaps;
use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::{normal_interval, Real};
use crate::quantizer::Quantizer;

/// Channel split into dominant taps `D` (modelled) and weak taps `W` (folded into noise).
#[derive(Clone, Debug)]
pub struct SparseIsiModel<T> {
    n_rx: usize,
    n_tx: usize,
    dominant: Vec<usize>,
    weak: Vec<usize>,
    dominant_taps: Vec<CMat<T>>,
    weak_taps: Vec<CMat<T>>,
    sigma2: T,
}

/// Per-slot view of the model: which dominant delays touch a data symbol and
/// the weak-tap power that does.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWindow<T> {
    pub slot: usize,
    /// Valid dominant delays `D_n`, ascending.
    pub delays: Vec<usize>,
    /// Positions of `delays` inside the model's dominant set.
    pub positions: Vec<usize>,
    /// `‖h_{W,r}^{(n)}‖²` per receive antenna.
    pub weak_power: Vec<T>,
}

impl<T: Real> SparseIsiModel<T> {
    /// Splits the support of `ch` into `dominant` and the remaining weak taps.
    ///
    /// `ch` is the effective channel (digital precoder already applied).
    pub fn new(ch: &ChannelTaps<T>, dominant: &[usize], sigma2: T) -> Result<Self> {
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return param(format!("noise variance must be positive and finite, got {sigma2}"));
        }
        let support = ch.support();
        let mut dom: Vec<usize> = dominant.to_vec();
        dom.sort_unstable();
        dom.dedup();
        if let Some(bad) = dom.iter().find(|d| !support.contains(d)) {
            return param(format!("dominant delay {bad} is not in the channel support"));
        }
        let weak: Vec<usize> = support.iter().copied().filter(|l| !dom.contains(l)).collect();
        Ok(Self {
            n_rx: ch.n_rx(),
            n_tx: ch.n_tx(),
            dominant_taps: dom.iter().map(|&d| ch.tap_or_zero(d)).collect(),
            weak_taps: weak.iter().map(|&w| ch.tap_or_zero(w)).collect(),
            dominant: dom,
            weak,
            sigma2,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn dominant(&self) -> &[usize] {
        &self.dominant
    }

    pub fn weak(&self) -> &[usize] {
        &self.weak
    }

    pub fn dominant_taps(&self) -> &[CMat<T>] {
        &self.dominant_taps
    }

    pub fn weak_taps(&self) -> &[CMat<T>] {
        &self.weak_taps
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    /// `L_D = max D + 1` (0 when `D` is empty).
    pub fn l_d(&self) -> usize {
        self.dominant.last().map_or(0, |&d| d + 1)
    }

    /// Stacked `H_D = [H[d_1], …, H[d_|D|]]`.
    pub fn h_d(&self) -> CMat<T> {
        CMat::hcat(&self.dominant_taps.iter().collect::<Vec<_>>(), self.n_rx)
    }

    /// Stacked `H_W`.
    pub fn h_w(&self) -> CMat<T> {
        CMat::hcat(&self.weak_taps.iter().collect::<Vec<_>>(), self.n_rx)
    }

    /// Unwindowed `P_{W,r} = ‖h_{W,r}‖²`.
    pub fn weak_power(&self) -> Vec<T> {
        (0..self.n_rx).map(|r| self.weak_taps.iter().map(|h| h.row_norm_sqr(r)).sum()).collect()
    }

    /// `P_{D,r} = ‖h_{D,r}‖²`.
    pub fn dominant_power(&self) -> Vec<T> {
        (0..self.n_rx).map(|r| self.dominant_taps.iter().map(|h| h.row_norm_sqr(r)).sum()).collect()
    }

    /// Window at 1-based slot `n` for a frame of `n_d` data slots.
    pub fn window(&self, n: usize, n_d: usize) -> EdgeWindow<T> {
        let valid = |l: usize| n > l && n - l <= n_d;
        let (positions, delays): (Vec<usize>, Vec<usize>) =
            self.dominant.iter().enumerate().filter(|(_, &d)| valid(d)).map(|(i, &d)| (i, d)).unzip();
        let weak_power = (0..self.n_rx)
            .map(|r| {
                self.weak
                    .iter()
                    .zip(&self.weak_taps)
                    .filter(|(&w, _)| valid(w))
                    .map(|(_, h)| h.row_norm_sqr(r))
                    .sum()
            })
            .collect();
        EdgeWindow { slot: n, delays, positions, weak_power }
    }

    /// `σ̃_r²[n] = σ² + ‖h_{W,r}^{(n)}‖²`.
    pub fn effective_noise_vars(&self, n: usize, n_d: usize) -> Vec<T> {
        self.window(n, n_d).weak_power.into_iter().map(|p| p + self.sigma2).collect()
    }
}

/// Quantization bins `(l_re, u_re, l_im, u_im)` of one received vector.
#[derive(Clone, Debug)]
pub struct SlotBins<T> {
    bins: Vec<[T; 4]>,
}

impl<T: Real> SlotBins<T> {
    pub fn new(y: &[Complex<T>], quant: &Quantizer<T>) -> Result<Self> {
        let bins = y
            .iter()
            .map(|z| {
                let (lr, ur) = quant.bounds(z.re)?;
                let (li, ui) = quant.bounds(z.im)?;
                Ok([lr, ur, li, ui])
            })
            .collect::<Result<_>>()?;
        Ok(Self { bins })
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// `Π_r P(bin_re) P(bin_im)` for Gaussian parts with the given means and
    /// per-part standard deviations `1 / inv_scale[r]`.
    #[inline]
    pub fn pmf(&self, mean: &[Complex<T>], inv_scale: &[T]) -> T {
        let mut p = T::one();
        for ((b, m), &s) in self.bins.iter().zip(mean).zip(inv_scale) {
            p *= normal_interval((b[0] - m.re) * s, (b[1] - m.re) * s);
            p *= normal_interval((b[2] - m.im) * s, (b[3] - m.im) * s);
        }
        p
    }
}

/// `1 / sqrt(v / 2)` per antenna.
pub(crate) fn inv_part_scale<T: Real>(vars: &[T]) -> Vec<T> {
    vars.iter().map(|&v| T::one() / (v / T::lit(2.0)).sqrt()).collect()
}

fn accumulate_mean<T: Real>(mean: &mut [Complex<T>], h: &CMat<T>, x: &[Complex<T>]) {
    for (r, m) in mean.iter_mut().enumerate() {
        for (a, b) in h.row(r).iter().zip(x) {
            *m += a * b;
        }
    }
}

/// Approximate PMF `P(y[n] | x_D[n])` treating weak-tap ISI as Gaussian noise.
///
/// `x_d` stacks the symbol vectors of the window's valid delays in ascending
/// delay order (`|D_n|·N_tx` entries).
pub fn cond_pmf_sparse<T: Real>(
    y_n: &[Complex<T>],
    x_d: &[Complex<T>],
    model: &SparseIsiModel<T>,
    window: &EdgeWindow<T>,
    quant: &Quantizer<T>,
) -> Result<T> {
    let n_tx = model.n_tx;
    if x_d.len() != window.delays.len() * n_tx {
        return param(format!("x_D has {} entries, window needs {}", x_d.len(), window.delays.len() * n_tx));
    }
    if y_n.len() != model.n_rx || window.weak_power.len() != model.n_rx {
        return param("observation dimension mismatch");
    }
    let mut mean = vec![Complex::zero(); model.n_rx];
    for (j, &pos) in window.positions.iter().enumerate() {
        accumulate_mean(&mut mean, &model.dominant_taps[pos], &x_d[j * n_tx..(j + 1) * n_tx]);
    }
    let vars: Vec<T> = window.weak_power.iter().map(|&p| p + model.sigma2).collect();
    Ok(SlotBins::new(y_n, quant)?.pmf(&mean, &inv_part_scale(&vars)))
}

/// True PMF `P(y[n] | x_D[n], x_W[n])` with the weak taps kept in the mean.
///
/// `x_d` and `x_w` stack one symbol vector per dominant / weak delay of the
/// model (zero vectors for symbols outside the frame).
pub fn cond_pmf_true<T: Real>(
    y_n: &[Complex<T>],
    x_d: &[Complex<T>],
    x_w: &[Complex<T>],
    model: &SparseIsiModel<T>,
    quant: &Quantizer<T>,
) -> Result<T> {
    let n_tx = model.n_tx;
    if x_d.len() != model.dominant.len() * n_tx || x_w.len() != model.weak.len() * n_tx {
        return param("x_D / x_W dimension mismatch");
    }
    if y_n.len() != model.n_rx {
        return param("observation dimension mismatch");
    }
    let mut mean = vec![Complex::zero(); model.n_rx];
    for (j, h) in model.dominant_taps.iter().enumerate() {
        accumulate_mean(&mut mean, h, &x_d[j * n_tx..(j + 1) * n_tx]);
    }
    for (j, h) in model.weak_taps.iter().enumerate() {
        accumulate_mean(&mut mean, h, &x_w[j * n_tx..(j + 1) * n_tx]);
    }
    let vars = vec![model.sigma2; model.n_rx];
    Ok(SlotBins::new(y_n, quant)?.pmf(&mean, &inv_part_scale(&vars)))
}

fn row_powers<T: Real>(ch: &ChannelTaps<T>, delays: &[usize]) -> Vec<T> {
    (0..ch.n_rx())
        .map(|r| delays.iter().filter_map(|&l| ch.tap(l)).map(|h| h.row_norm_sqr(r)).sum())
        .collect()
}

/// Closed-form NMSE between the PMF arguments of the true and approximate
/// models when `candidate` is taken as the dominant set.
pub fn nmse<T: Real>(candidate: &[usize], ch: &ChannelTaps<T>, sigma2: T, quant: &Quantizer<T>) -> Result<T> {
    let support = ch.support();
    if let Some(bad) = candidate.iter().find(|d| !support.contains(d)) {
        return param(format!("candidate delay {bad} is not in the channel support"));
    }
    if !(sigma2 > T::zero()) {
        return param("noise variance must be positive");
    }
    let weak: Vec<usize> = support.iter().copied().filter(|l| !candidate.contains(l)).collect();
    let p_d = row_powers(ch, candidate);
    let p_w = row_powers(ch, &weak);
    let two = T::lit(2.0);
    let mut total = T::zero();
    for (&pd, &pw) in p_d.iter().zip(&p_w) {
        if pw == T::zero() {
            continue;
        }
        let ratio = (sigma2 + pw) / sigma2;
        let shrink = (T::one() - (sigma2 / (sigma2 + pw)).sqrt()).powi(2);
        for &b in quant.finite_edges() {
            total += ratio * (shrink + pw / (two * b * b + pd));
        }
    }
    Ok(total)
}

/// One accepted greedy step.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionStep<T> {
    pub delay: usize,
    pub nmse: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TapSelection<T> {
    pub dominant: Vec<usize>,
    pub weak: Vec<usize>,
    /// NMSE of the empty dominant set.
    pub initial_nmse: T,
    pub steps: Vec<SelectionStep<T>>,
}

impl<T: Real> TapSelection<T> {
    pub fn final_nmse(&self) -> T {
        self.steps.last().map_or(self.initial_nmse, |s| s.nmse)
    }
}

/// Greedy dominant-tap selection.
///
/// Starting from `D = ∅`, repeatedly moves the weak tap whose addition gives
/// the smallest NMSE into `D` while `NMSE(D) > eps_th`, `|D| < d_max` and
/// `W ≠ ∅`. Ties go to the smaller delay.
pub fn select_dominant_taps<T: Real>(
    ch: &ChannelTaps<T>,
    sigma2: T,
    quant: &Quantizer<T>,
    eps_th: T,
    d_max: usize,
) -> Result<TapSelection<T>> {
    if ch.is_empty() {
        return param("cannot select taps of an empty channel");
    }
    if !(eps_th >= T::zero()) {
        return param("eps_th must be nonnegative");
    }
    if d_max == 0 {
        return param("D_max must be at least 1");
    }
    let mut dominant: Vec<usize> = Vec::new();
    let mut weak = ch.support();
    let initial_nmse = nmse(&dominant, ch, sigma2, quant)?;
    let mut current = initial_nmse;
    let mut steps = Vec::new();
    while current > eps_th && dominant.len() < d_max && !weak.is_empty() {
        let mut best: Option<(usize, T)> = None;
        for (i, &l) in weak.iter().enumerate() {
            let mut cand = dominant.clone();
            cand.push(l);
            let v = nmse(&cand, ch, sigma2, quant)?;
            if best.map_or(true, |(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        let (i, v) = best.expect("weak set is nonempty");
        let l = weak.remove(i);
        dominant.push(l);
        dominant.sort_unstable();
        current = v;
        steps.push(SelectionStep { delay: l, nmse: v });
    }
    Ok(TapSelection { dominant, weak, initial_nmse, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RngStream;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_channel(rng: &mut RngStream, n_rx: usize, n_tx: usize, delays: &[usize], scale: f64) -> ChannelTaps<f64> {
        ChannelTaps::new(
            n_rx,
            n_tx,
            delays.iter().map(|&d| (d, CMat::from_fn(n_rx, n_tx, |_, _| c(rng.normal() * scale, rng.normal() * scale)))),
        )
        .unwrap()
    }

    fn scalar_channel(powers: &[f64]) -> ChannelTaps<f64> {
        ChannelTaps::new(1, 1, powers.iter().enumerate().map(|(l, &p)| (l, CMat::from_vec(1, 1, vec![c(p.sqrt(), 0.0)]).unwrap())))
            .unwrap()
    }

    /// Every complex observation vector for `n_rx` antennas.
    fn all_observations(quant: &Quantizer<f64>, n_rx: usize) -> Vec<Vec<Complex<f64>>> {
        let lv = quant.levels();
        let per = lv.len() * lv.len();
        let total = per.pow(n_rx as u32);
        (0..total)
            .map(|mut idx| {
                (0..n_rx)
                    .map(|_| {
                        let e = idx % per;
                        idx /= per;
                        c(lv[e % lv.len()], lv[e / lv.len()])
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn effective_noise_windowing() {
        let mut rng = RngStream::new(4, 0);
        let ch = random_channel(&mut rng, 2, 1, &[0, 1, 3], 1.0);
        let m = SparseIsiModel::new(&ch, &[0], 0.3).unwrap();
        let full = m.weak_power();
        let n_d = 10;
        // mid-frame: all weak taps active
        let v = m.effective_noise_vars(5, n_d);
        for r in 0..2 {
            assert!((v[r] - 0.3 - full[r]).abs() < 1e-15);
        }
        // slot 1 sees only delay 0, so no weak taps yet
        assert_eq!(m.effective_noise_vars(1, n_d), vec![0.3, 0.3]);
        for n in 1..=n_d + 3 {
            let w = m.window(n, n_d);
            for r in 0..2 {
                assert!(w.weak_power[r] <= full[r] + 1e-15);
            }
        }
        let none = SparseIsiModel::new(&ch, &[0, 1, 3], 0.3).unwrap();
        assert_eq!(none.effective_noise_vars(5, n_d), vec![0.3, 0.3]);
        assert!(none.weak_power().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn effective_noise_matches_sample_variance() {
        let mut rng = RngStream::new(8, 2);
        let ch = random_channel(&mut rng, 2, 2, &[0, 2, 5], 0.5);
        let m = SparseIsiModel::new(&ch, &[0], 0.2).unwrap();
        let hw = m.h_w();
        let expect = m.effective_noise_vars(20, 40);
        let draws = 100_000;
        let qpsk = [c(1.0, 1.0), c(-1.0, 1.0), c(1.0, -1.0), c(-1.0, -1.0)].map(|z| z / 2f64.sqrt());
        let mut acc = [0.0; 2];
        for _ in 0..draws {
            let x: Vec<Complex<f64>> = (0..hw.cols()).map(|_| qpsk[(rng.next_u32() % 4) as usize]).collect();
            let noise = crate::numeric::draw_cgauss(&mut rng, 2, 0.2).unwrap();
            let v = hw.mul_vec(&x);
            for r in 0..2 {
                acc[r] += (v[r] + noise[r]).norm_sqr();
            }
        }
        for r in 0..2 {
            let s = acc[r] / draws as f64;
            assert!((s - expect[r]).abs() / expect[r] < 0.02, "{s} vs {}", expect[r]);
        }
    }

    use rand::RngCore;

    #[test]
    fn one_bit_zero_mean_pmf_is_quarter() {
        let ch = scalar_channel(&[1.0]);
        let m = SparseIsiModel::new(&ch, &[0], 0.5).unwrap();
        let q = Quantizer::uniform(1).unwrap();
        let w = m.window(1, 4);
        for y in all_observations(&q, 1) {
            let p = cond_pmf_sparse(&y, &[c(0.0, 0.0)], &m, &w, &q).unwrap();
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn pmfs_normalize_and_coincide_without_weak_taps() {
        let mut rng = RngStream::new(12, 0);
        for bits in [1, 2] {
            let q = Quantizer::uniform(bits).unwrap();
            let ch = random_channel(&mut rng, 2, 1, &[0, 1, 2], 0.6);
            let sparse = SparseIsiModel::new(&ch, &[0, 2], 0.4).unwrap();
            let full = SparseIsiModel::new(&ch, &[0, 1, 2], 0.4).unwrap();
            let x_d = vec![c(1.0, 0.0), c(-1.0, 0.0)];
            let x_w = vec![c(-1.0, 0.0)];
            let w = sparse.window(5, 10);
            let (mut s_sparse, mut s_true) = (0.0, 0.0);
            for y in all_observations(&q, 2) {
                s_sparse += cond_pmf_sparse(&y, &x_d, &sparse, &w, &q).unwrap();
                s_true += cond_pmf_true(&y, &x_d, &x_w, &sparse, &q).unwrap();
                let a = cond_pmf_sparse(&y, &[x_d[0], x_w[0], x_d[1]], &full, &full.window(5, 10), &q).unwrap();
                let b = cond_pmf_true(&y, &[x_d[0], x_w[0], x_d[1]], &[], &full, &q).unwrap();
                assert!((a - b).abs() <= 1e-15);
            }
            assert!((s_sparse - 1.0).abs() < 1e-12);
            assert!((s_true - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weak_symbols_match_sparse_pmf_without_weak_power() {
        let mut rng = RngStream::new(13, 0);
        let q = Quantizer::uniform(2).unwrap();
        let ch = random_channel(&mut rng, 1, 1, &[0, 2], 0.8);
        let m = SparseIsiModel::new(&ch, &[0], 0.3).unwrap();
        let mut w = m.window(1, 5);
        assert!(w.weak_power.iter().all(|&p| p == 0.0));
        w.weak_power = vec![0.0];
        for y in all_observations(&q, 1) {
            let a = cond_pmf_true(&y, &[c(1.0, 0.0)], &[c(0.0, 0.0)], &m, &q).unwrap();
            let b = cond_pmf_sparse(&y, &[c(1.0, 0.0)], &m, &w, &q).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn noise_dominated_pmf_is_uniform() {
        let ch = scalar_channel(&[1.0]);
        let m = SparseIsiModel::new(&ch, &[0], 1e12).unwrap();
        let q = Quantizer::uniform(2).unwrap();
        // outer bins take half the mass per part, inner bins vanish
        let outer = cond_pmf_true(&[c(1.125, -1.125)], &[c(1.0, 0.0)], &[], &m, &q).unwrap();
        assert!((outer - 0.25).abs() < 1e-5);
        let inner = cond_pmf_true(&[c(0.375, -1.125)], &[c(1.0, 0.0)], &[], &m, &q).unwrap();
        assert!(inner < 1e-5);
    }

    #[test]
    fn pmf_dimension_errors() {
        let ch = scalar_channel(&[1.0, 0.5]);
        let m = SparseIsiModel::new(&ch, &[0], 0.1).unwrap();
        let q = Quantizer::uniform(1).unwrap();
        let w = m.window(3, 5);
        assert!(cond_pmf_sparse(&[c(1.0, 1.0)], &[], &m, &w, &q).is_err());
        assert!(cond_pmf_true(&[c(1.0, 1.0)], &[c(1.0, 0.0)], &[], &m, &q).is_err());
        assert!(SparseIsiModel::new(&ch, &[4], 0.1).is_err());
        assert!(SparseIsiModel::new(&ch, &[0], 0.0).is_err());
    }

    #[test]
    fn nmse_limits() {
        let mut rng = RngStream::new(21, 0);
        let ch = random_channel(&mut rng, 2, 2, &[0, 1, 4], 1.0);
        let q = Quantizer::uniform(2).unwrap();
        assert_eq!(nmse(&[0, 1, 4], &ch, 0.5, &q).unwrap(), 0.0);
        assert!(nmse(&[7], &ch, 0.5, &q).is_err());

        // one-bit: single edge at zero
        let q1 = Quantizer::uniform(1).unwrap();
        let s2 = 0.5;
        let got = nmse(&[0], &ch, s2, &q1).unwrap();
        let mut expect = 0.0;
        for r in 0..2 {
            let pd = ch.tap(0).unwrap().row_norm_sqr(r);
            let pw = ch.tap(1).unwrap().row_norm_sqr(r) + ch.tap(4).unwrap().row_norm_sqr(r);
            expect += (s2 + pw) / s2 * ((1.0 - (s2 / (s2 + pw)).sqrt()).powi(2) + pw / pd);
        }
        assert!((got - expect).abs() < 1e-12 * expect);

        // empty set: all power weak, middle edge 0 makes the 2-bit criterion infinite
        assert!(nmse(&[], &ch, s2, &q).unwrap().is_infinite());
    }

    #[test]
    fn selection_edge_cases() {
        let ch = scalar_channel(&[1.0, 0.5, 1e-4, 1e-4]);
        let q = Quantizer::uniform(2).unwrap();
        let none = select_dominant_taps(&ch, 0.1, &q, f64::INFINITY, 4).unwrap();
        assert!(none.dominant.is_empty());
        assert_eq!(none.weak, vec![0, 1, 2, 3]);
        let all = select_dominant_taps(&ch, 0.1, &q, 0.0, 4).unwrap();
        assert_eq!(all.dominant, vec![0, 1, 2, 3]);
        assert_eq!(all.final_nmse(), 0.0);
        assert!(all.steps.windows(2).all(|w| w[1].nmse < w[0].nmse));
        assert!(select_dominant_taps(&ch, 0.1, &q, 0.1, 0).is_err());
        let empty = ChannelTaps::<f64>::new(1, 1, []).unwrap();
        assert!(select_dominant_taps(&empty, 0.1, &q, 0.1, 2).is_err());
    }

    #[test]
    fn strong_tap_beats_weak_tap() {
        // both singleton candidates evaluated by hand with B = 1:
        // D={0}: P_W = 1e-4 -> ratio·[(1-sqrt(σ²/(σ²+P_W)))² + P_W/1]
        // D={1}: P_W = 1    -> ratio·[... + 1/1e-4]
        let ch = scalar_channel(&[1.0, 1e-4]);
        let q = Quantizer::uniform(1).unwrap();
        let s2: f64 = 0.1;
        let f = |pw: f64, pd: f64| (s2 + pw) / s2 * ((1.0 - (s2 / (s2 + pw)).sqrt()).powi(2) + pw / pd);
        assert!(f(1e-4, 1.0) < f(1.0, 1e-4));
        let sel = select_dominant_taps(&ch, s2, &q, 0.0, 1).unwrap();
        assert_eq!(sel.dominant, vec![0]);
        assert!((sel.final_nmse() - f(1e-4, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_smaller_delay() {
        let ch = scalar_channel(&[0.5, 0.5]);
        let q = Quantizer::uniform(2).unwrap();
        let sel = select_dominant_taps(&ch, 0.1, &q, 0.0, 1).unwrap();
        assert_eq!(sel.dominant, vec![0]);
    }
}
