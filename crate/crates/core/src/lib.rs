//! Soft-output detection for sparse frequency-selective MIMO channels seen
//! through low-resolution ADCs.
//!
//! Numerical code is generic over [`numeric::Real`] (`f32`/`f64`); the
//! aliases below fix it to `f64`.

pub mod chanest;
pub mod channel;
pub mod coding;
pub mod detect;
pub mod error;
pub mod linalg;
pub mod numeric;
pub mod ofdm;
pub mod quantizer;
pub mod sparsify;

pub use error::{Error, Result};
pub use numeric::{Real, RngStream};

pub type Cplx = num_complex::Complex<f64>;
pub type Mat = linalg::CMat<f64>;
pub type Channel = channel::ChannelTaps<f64>;
pub type Quant = quantizer::Quantizer<f64>;
pub type Model = sparsify::SparseIsiModel<f64>;
pub type Pilots = chanest::PilotBlock<f64>;

pub type Cplx32 = num_complex::Complex<f32>;
pub type Channel32 = channel::ChannelTaps<f32>;
pub type Quant32 = quantizer::Quantizer<f32>;
pub type Model32 = sparsify::SparseIsiModel<f32>;

/// `σ² = N_tx / (M·10^{Eb/N0 / 10})` for unit-power symbols per antenna.
pub fn eb_n0_to_sigma2(eb_n0_db: f64, n_tx: usize, m: usize) -> f64 {
    n_tx as f64 / (m as f64 * 10f64.powf(eb_n0_db / 10.0))
}
