//! Orthogonal pilot generation and LS channel estimation from (quantized)
//! pilot observations.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelTaps;
use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::{Real, RngStream};
use crate::quantizer::Quantizer;

/// Row normalization of the pilot matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotNorm {
    /// `X_p X_pᴴ = √T_p·I`.
    #[default]
    SqrtTp,
    /// `X_p X_pᴴ = T_p·I` (unit average pilot power per antenna).
    Tp,
}

#[derive(Clone, Debug)]
pub struct PilotBlock<T> {
    xp: CMat<T>,
    xbar: CMat<T>,
    pinv: CMat<T>,
    l: usize,
}

const MAX_ATTEMPTS: usize = 32;

/// Random unit-modulus pilots with orthogonal rows of the requested norm.
pub fn gen_pilots<T: Real>(t_p: usize, n_tx: usize, l: usize, norm: PilotNorm, rng: &mut RngStream) -> Result<PilotBlock<T>> {
    if n_tx == 0 || l == 0 {
        return param("N_tx and L must be at least 1");
    }
    let need = (l * (n_tx - 1) + 1).max(n_tx);
    if t_p < need {
        return param(format!("T_p = {t_p} is below the minimum {need} for N_tx = {n_tx}, L = {l}"));
    }
    let target = match norm {
        PilotNorm::SqrtTp => (t_p as f64).sqrt(),
        PilotNorm::Tp => t_p as f64,
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..MAX_ATTEMPTS {
        let mut rows: Vec<Vec<Complex<f64>>> = (0..n_tx)
            .map(|_| (0..t_p).map(|_| Complex::new(if rng.gen() { h } else { -h }, if rng.gen() { h } else { -h })).collect())
            .collect();
        let mut ok = true;
        for i in 0..n_tx {
            for j in 0..i {
                let dot: Complex<f64> = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b.conj()).sum();
                let (head, tail) = rows.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= dot * b;
                }
            }
            let nrm: f64 = rows[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                ok = false;
                break;
            }
            rows[i].iter_mut().for_each(|z| *z /= nrm);
        }
        if !ok {
            continue;
        }
        let s = target.sqrt();
        let xp = CMat::from_fn(n_tx, t_p, |t, n| {
            let z = rows[t][n] * s;
            Complex::new(T::lit(z.re), T::lit(z.im))
        });
        if let Ok(block) = PilotBlock::from_matrix(xp, l) {
            return Ok(block);
        }
    }
    param("could not draw a pilot matrix with invertible Gram matrix")
}

impl<T: Real> PilotBlock<T> {
    /// Wraps an explicit `N_tx × T_p` pilot matrix for channels of length `l`.
    pub fn from_matrix(xp: CMat<T>, l: usize) -> Result<Self> {
        let (n_tx, t_p) = (xp.rows(), xp.cols());
        let xbar = CMat::from_fn(t_p + l - 1, l * n_tx, |n, c| {
            let (ell, t) = (c / n_tx, c % n_tx);
            if n >= ell && n - ell < t_p {
                xp[(t, n - ell)]
            } else {
                Complex::zero()
            }
        });
        let gram = xbar.adjoint().matmul(&xbar);
        let pinv = gram.solve(&xbar.adjoint())?;
        Ok(Self { xp, xbar, pinv, l })
    }

    pub fn xp(&self) -> &CMat<T> {
        &self.xp
    }

    /// Block-Toeplitz convolution matrix, `(T_p+L−1) × (L·N_tx)`.
    pub fn xbar(&self) -> &CMat<T> {
        &self.xbar
    }

    pub fn t_p(&self) -> usize {
        self.xp.cols()
    }

    pub fn n_tx(&self) -> usize {
        self.xp.rows()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Pilot slots as symbol vectors for transmission.
    pub fn symbols(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.t_p()).map(|n| (0..self.n_tx()).map(|t| self.xp[(t, n)]).collect()).collect()
    }

    /// Observation slots the estimator reads.
    pub fn observation_len(&self) -> usize {
        self.t_p() + self.l - 1
    }
}

/// LS estimate from arbitrary (unquantized or synthetic) observations.
pub fn ls_estimate_raw<T: Real>(y_p: &[Vec<Complex<T>>], pilots: &PilotBlock<T>) -> Result<ChannelTaps<T>> {
    let len = pilots.observation_len();
    if y_p.len() < len {
        return param(format!("need {len} pilot observation slots, got {}", y_p.len()));
    }
    let n_rx = y_p[0].len();
    if n_rx == 0 || y_p[..len].iter().any(|v| v.len() != n_rx) {
        return param("inconsistent pilot observation dimensions");
    }
    let n_tx = pilots.n_tx();
    let mut taps = vec![CMat::zeros(n_rx, n_tx); pilots.l];
    for r in 0..n_rx {
        let col: Vec<Complex<T>> = y_p[..len].iter().map(|v| v[r]).collect();
        let h = pilots.pinv.mul_vec(&col);
        for (c, v) in h.into_iter().enumerate() {
            taps[c / n_tx][(r, c % n_tx)] = v;
        }
    }
    ChannelTaps::new(n_rx, n_tx, taps.into_iter().enumerate())
}

/// LS estimate from quantized pilot observations `Q(Re r) + jQ(Im r)`.
pub fn ls_estimate<T: Real>(y_p: &[Vec<Complex<T>>], pilots: &PilotBlock<T>, quant: &Quantizer<T>) -> Result<ChannelTaps<T>> {
    for z in y_p.iter().flatten() {
        quant.level_index(z.re)?;
        quant.level_index(z.im)?;
    }
    ls_estimate_raw(y_p, pilots)
}

/// `Σ_ℓ ‖Ĥ[ℓ] − H[ℓ]‖²_F / Σ_ℓ ‖H[ℓ]‖²_F`.
pub fn estimation_nmse<T: Real>(est: &ChannelTaps<T>, truth: &ChannelTaps<T>) -> T {
    let l = est.len().max(truth.len());
    let err: T = (0..l).map(|d| est.tap_or_zero(d).sub(&truth.tap_or_zero(d)).frob_sqr()).sum();
    err / truth.total_power()
}
