//! Clustered multipath channel sampled through a raised-cosine pulse.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ChannelTaps;
use crate::error::{param, Result};
use crate::linalg::CMat;
use crate::numeric::Real;

/// Pulse truncation half-width, in symbol periods.
pub const PULSE_TAIL: usize = 8;

/// Uniform planar array with `rows × cols` elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpaGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Element spacing in wavelengths.
    #[serde(default = "half_wavelength")]
    pub spacing: f64,
}

fn half_wavelength() -> f64 {
    0.5
}

impl UpaGeometry {
    pub fn elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Unit-norm response toward azimuth `phi`, elevation `theta`.
    ///
    /// Element `(m, n)` carries phase `2π·d·(m·sinφ·sinθ + n·cosθ)`, so
    /// `θ = π/2, φ = 0` is broadside.
    pub fn response(&self, phi: f64, theta: f64) -> Vec<Complex<f64>> {
        let norm = 1.0 / (self.elements() as f64).sqrt();
        let mut a = Vec::with_capacity(self.elements());
        for m in 0..self.rows {
            for n in 0..self.cols {
                let ph = 2.0 * PI * self.spacing * (m as f64 * phi.sin() * theta.sin() + n as f64 * theta.cos());
                a.push(Complex::from_polar(norm, ph));
            }
        }
        a
    }
}

/// One multipath component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    /// Complex gain as `[re, im]`.
    pub gain: [f64; 2],
    /// Propagation delay in seconds.
    pub delay: f64,
    pub phi_tx: f64,
    pub theta_tx: f64,
    pub phi_rx: f64,
    pub theta_rx: f64,
}

/// Complex matrix in the JSON layout `{rows, cols, entries: [[re, im], …]}` (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl BfMatrix {
    pub fn to_cmat(&self) -> Result<CMat<f64>> {
        CMat::from_vec(self.rows, self.cols, self.entries.iter().map(|e| Complex::new(e[0], e[1])).collect())
    }
}

/// Explicit cluster parameters for [`gen_geometric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    /// All subpaths of all clusters.
    pub subpaths: Vec<Subpath>,
    /// Symbol duration in seconds.
    pub symbol_period: f64,
    /// Raised-cosine roll-off in `[0, 1]`.
    #[serde(default)]
    pub rolloff: f64,
    pub tx_array: UpaGeometry,
    pub rx_array: UpaGeometry,
    /// RF chains; used for the default truncated-identity beamformers.
    pub n_tx: usize,
    pub n_rx: usize,
    #[serde(default)]
    pub f_tx_rf: Option<BfMatrix>,
    #[serde(default)]
    pub f_rx_rf: Option<BfMatrix>,
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else if u.fract() == 0.0 {
        0.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// Raised-cosine pulse at `u = t / T_s`, zero beyond ±[`PULSE_TAIL`] periods.
pub fn raised_cosine(u: f64, rolloff: f64) -> f64 {
    if u.abs() > PULSE_TAIL as f64 {
        return 0.0;
    }
    let x = 2.0 * rolloff * u;
    if rolloff > 0.0 && (x.abs() - 1.0).abs() < 1e-12 {
        return PI / 4.0 * sinc(1.0 / (2.0 * rolloff));
    }
    sinc(u) * (PI * rolloff * u).cos() / (1.0 - x * x)
}

/// Effective taps `H[ℓ] = F_rxᴴ A[ℓ] F_tx` of a clustered channel.
///
/// Taps are evaluated for `ℓ ∈ 0..=⌊τ_max/T_s + 1/2⌋ + PULSE_TAIL`; taps below
/// `1e-12` of the strongest tap (Frobenius norm) are dropped.
pub fn gen_geometric<T: Real>(spec: &ClusterSpec, max_l: usize) -> Result<ChannelTaps<T>> {
    if spec.subpaths.is_empty() {
        return param("geometric channel needs at least one subpath");
    }
    if !(spec.symbol_period > 0.0) {
        return param("symbol period must be positive");
    }
    if !(0.0..=1.0).contains(&spec.rolloff) {
        return param("roll-off must lie in [0, 1]");
    }
    let ts = spec.symbol_period;
    let mut tau_max = 0.0f64;
    for sp in &spec.subpaths {
        if !(sp.delay >= 0.0) {
            return param("subpath delays must be nonnegative");
        }
        if sp.delay > max_l as f64 * ts {
            return param(format!("subpath delay {} exceeds max_L·T_s = {}", sp.delay, max_l as f64 * ts));
        }
        tau_max = tau_max.max(sp.delay);
    }
    let f_tx = match &spec.f_tx_rf {
        Some(m) => m.to_cmat()?,
        None => CMat::eye(spec.tx_array.elements(), spec.n_tx),
    };
    let f_rx = match &spec.f_rx_rf {
        Some(m) => m.to_cmat()?,
        None => CMat::eye(spec.rx_array.elements(), spec.n_rx),
    };
    if f_tx.rows() != spec.tx_array.elements() || f_tx.cols() != spec.n_tx {
        return param("F_tx^RF must be (tx elements) x n_tx");
    }
    if f_rx.rows() != spec.rx_array.elements() || f_rx.cols() != spec.n_rx {
        return param("F_rx^RF must be (rx elements) x n_rx");
    }

    // Project each subpath onto the RF chains once: F_rxᴴ a_rx a_txᴴ F_tx.
    let f_rx_h = f_rx.adjoint();
    let projected: Vec<CMat<f64>> = spec
        .subpaths
        .iter()
        .map(|sp| {
            let a_rx = f_rx_h.mul_vec(&spec.rx_array.response(sp.phi_rx, sp.theta_rx));
            let a_tx: Vec<_> = spec.tx_array.response(sp.phi_tx, sp.theta_tx).iter().map(|z| z.conj()).collect();
            let a_tx = CMat::from_vec(1, a_tx.len(), a_tx).expect("row vector");
            let b_tx = &a_tx * &f_tx;
            let g = Complex::new(sp.gain[0], sp.gain[1]);
            CMat::from_fn(spec.n_rx, spec.n_tx, |r, t| g * a_rx[r] * b_tx[(0, t)])
        })
        .collect();

    let l_nominal = (tau_max / ts + 0.5).floor() as usize;
    let mut taps = Vec::new();
    for l in 0..=l_nominal + PULSE_TAIL {
        let mut h = CMat::zeros(spec.n_rx, spec.n_tx);
        for (sp, m) in spec.subpaths.iter().zip(&projected) {
            let p = raised_cosine(l as f64 - sp.delay / ts, spec.rolloff);
            if p != 0.0 {
                h = h.add(&m.scale(Complex::new(p, 0.0)));
            }
        }
        taps.push((l, h));
    }
    let max_norm = taps.iter().map(|(_, h)| h.frob_sqr().sqrt()).fold(0.0, f64::max);
    let kept = taps
        .into_iter()
        .filter(|(_, h)| h.frob_sqr().sqrt() >= 1e-12 * max_norm && max_norm > 0.0)
        .map(|(l, h)| (l, h.map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))));
    ChannelTaps::new(spec.n_rx, spec.n_tx, kept)
}
