//! Sparse frequency-selective MIMO channels and signal propagation.

mod geometric;
mod snapshot;

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

pub use geometric::{gen_geometric, raised_cosine, BfMatrix, ClusterSpec, Subpath, UpaGeometry, PULSE_TAIL};
pub use snapshot::ChannelSnapshot;

use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::{draw_cgauss, Real, RngStream};

/// Channel impulse response `ℓ ↦ H[ℓ]` with only nonzero taps stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTaps<T> {
    n_rx: usize,
    n_tx: usize,
    taps: BTreeMap<usize, CMat<T>>,
}

impl<T: Real> ChannelTaps<T> {
    /// Collects taps, dropping all-zero matrices. Later duplicates replace earlier ones.
    pub fn new(n_rx: usize, n_tx: usize, taps: impl IntoIterator<Item = (usize, CMat<T>)>) -> Result<Self> {
        if n_rx == 0 || n_tx == 0 {
            return param("channel needs at least one rx and one tx chain");
        }
        let mut map = BTreeMap::new();
        for (delay, h) in taps {
            if h.rows() != n_rx || h.cols() != n_tx {
                return param(format!(
                    "tap {delay} is {}x{}, expected {n_rx}x{n_tx}",
                    h.rows(),
                    h.cols()
                ));
            }
            if h.as_slice().iter().any(|z| !z.is_zero()) {
                map.insert(delay, h);
            } else {
                map.remove(&delay);
            }
        }
        Ok(Self { n_rx, n_tx, taps: map })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Ascending delays of the nonzero taps.
    pub fn support(&self) -> Vec<usize> {
        self.taps.keys().copied().collect()
    }

    /// `max ℓ + 1`, or 0 for an empty channel.
    pub fn len(&self) -> usize {
        self.taps.keys().next_back().map_or(0, |&l| l + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn tap(&self, delay: usize) -> Option<&CMat<T>> {
        self.taps.get(&delay)
    }

    pub fn taps(&self) -> impl Iterator<Item = (usize, &CMat<T>)> {
        self.taps.iter().map(|(&l, h)| (l, h))
    }

    /// Tap matrix or zeros when the delay is not in the support.
    pub fn tap_or_zero(&self, delay: usize) -> CMat<T> {
        self.taps.get(&delay).cloned().unwrap_or_else(|| CMat::zeros(self.n_rx, self.n_tx))
    }

    /// `Σ_ℓ ‖H[ℓ]‖_F²`.
    pub fn total_power(&self) -> T {
        self.taps.values().map(|h| h.frob_sqr()).sum()
    }

    /// Right-multiplies every tap by a digital precoder.
    pub fn precoded(&self, f_bb: &CMat<T>) -> Result<Self> {
        if f_bb.rows() != self.n_tx || f_bb.cols() != self.n_tx {
            return param("precoder must be n_tx x n_tx");
        }
        Self::new(self.n_rx, self.n_tx, self.taps.iter().map(|(&l, h)| (l, h * f_bb)))
    }

    /// Keeps only the listed delays.
    pub fn restricted(&self, delays: &[usize]) -> Self {
        let taps = self.taps.iter().filter(|(l, _)| delays.contains(l)).map(|(&l, h)| (l, h.clone())).collect();
        Self { n_rx: self.n_rx, n_tx: self.n_tx, taps }
    }

    pub fn cast<U: Real>(&self) -> ChannelTaps<U> {
        let taps = self
            .taps
            .iter()
            .map(|(&l, h)| (l, h.map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))))
            .collect();
        ChannelTaps { n_rx: self.n_rx, n_tx: self.n_tx, taps }
    }

    /// Noiseless response `Σ_ℓ H[ℓ] x[n-ℓ]` for `n = 0..len(x)+L-1`.
    pub fn convolve(&self, x_seq: &[Vec<Complex<T>>]) -> Result<Vec<Vec<Complex<T>>>> {
        if let Some(bad) = x_seq.iter().position(|x| x.len() != self.n_tx) {
            return param(format!("symbol vector {bad} has wrong dimension"));
        }
        let l = self.len().max(1);
        let n_out = x_seq.len() + l - 1;
        let mut out = vec![vec![Complex::zero(); self.n_rx]; n_out];
        for (&delay, h) in &self.taps {
            for (i, x) in x_seq.iter().enumerate() {
                let y = h.mul_vec(x);
                for (o, v) in out[i + delay].iter_mut().zip(y) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }
}

/// Rayleigh taps with an exponentially decaying power-delay profile.
///
/// Tap `ℓ` has i.i.d. `CN(0, p_ℓ)` entries with `p_ℓ ∝ e^{-ℓ·decay}` normalized
/// so the profile sums to one.
pub fn gen_exp_pdp<T: Real>(
    n_taps: usize,
    decay: f64,
    n_rx: usize,
    n_tx: usize,
    rng: &mut RngStream,
) -> Result<ChannelTaps<T>> {
    if n_taps == 0 {
        return param("exp-PDP needs at least one tap");
    }
    if !(decay > 0.0) {
        return param("exp-PDP decay must be positive");
    }
    let profile = exp_pdp_profile(n_taps, decay);
    let mut taps = Vec::with_capacity(n_taps);
    for (l, &p) in profile.iter().enumerate() {
        let entries = draw_cgauss(rng, n_rx * n_tx, T::lit(p))?;
        taps.push((l, CMat::from_vec(n_rx, n_tx, entries)?));
    }
    ChannelTaps::new(n_rx, n_tx, taps)
}

/// Normalized per-entry tap powers of the exponential profile.
pub fn exp_pdp_profile(n_taps: usize, decay: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_taps).map(|l| (-(l as f64) * decay).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// `r[n] = Σ_ℓ H[ℓ] F x[n-ℓ] + v[n]` for `n = 0..N_d+L-1`, `v ~ CN(0, σ² I)`.
///
/// One noise vector is drawn per output slot even when `sigma2 = 0`, so the
/// random stream advances identically at every noise level.
pub fn propagate<T: Real>(
    ch: &ChannelTaps<T>,
    x_seq: &[Vec<Complex<T>>],
    f_tx_bb: Option<&CMat<T>>,
    sigma2: T,
    rng: &mut RngStream,
) -> Result<Vec<Vec<Complex<T>>>> {
    let precoded;
    let ch = match f_tx_bb {
        Some(f) => {
            precoded = ch.precoded(f)?;
            &precoded
        }
        None => ch,
    };
    let mut out = ch.convolve(x_seq)?;
    for r in out.iter_mut() {
        let v = draw_cgauss(rng, ch.n_rx(), sigma2)?;
        for (o, n) in r.iter_mut().zip(v) {
            *o += n;
        }
    }
    Ok(out)
}
