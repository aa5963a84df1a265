use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::numeric::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qam4,
}

impl Modulation {
    pub fn bits_per_antenna(self) -> usize {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qam4 => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "qam4" | "4qam" | "4-qam" | "qpsk" => Ok(Modulation::Qam4),
            _ => param(format!("unknown modulation '{s}'")),
        }
    }
}

/// Symbol-vector alphabet `X` over `n_tx` antennas.
///
/// Symbol index `k` carries the `M` coded bits MSB first: bit `m` (1-based)
/// of symbol `k` is `(k >> (M - m)) & 1`. Antenna `t` takes bits
/// `t·b + 1 ..= (t+1)·b` with `b` bits per antenna, Gray labelled
/// (BPSK: 0 → +1; 4-QAM: (b0, b1) → ((1 - 2b0) + j(1 - 2b1))/√2).
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    modulation: Modulation,
    n_tx: usize,
    symbols: Vec<Vec<Complex<f64>>>,
}

impl Constellation {
    pub fn new(modulation: Modulation, n_tx: usize) -> Result<Self> {
        if n_tx == 0 {
            return param("n_tx must be at least 1");
        }
        let b = modulation.bits_per_antenna();
        let m = b * n_tx;
        if m > 20 {
            return param(format!("{m} bits per symbol vector is too many"));
        }
        let bit = |k: usize, pos: usize| ((k >> (m - 1 - pos)) & 1) as f64;
        let symbols = (0..1usize << m)
            .map(|k| {
                (0..n_tx)
                    .map(|t| match modulation {
                        Modulation::Bpsk => Complex::new(1.0 - 2.0 * bit(k, t), 0.0),
                        Modulation::Qam4 => {
                            Complex::new(1.0 - 2.0 * bit(k, 2 * t), 1.0 - 2.0 * bit(k, 2 * t + 1)) * std::f64::consts::FRAC_1_SQRT_2
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { modulation, n_tx, symbols })
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Bits per symbol vector `M`.
    pub fn m(&self) -> usize {
        self.modulation.bits_per_antenna() * self.n_tx
    }

    /// `|X| = 2^M`.
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Vec<Complex<f64>>] {
        &self.symbols
    }

    pub fn symbol(&self, k: usize) -> &[Complex<f64>] {
        &self.symbols[k]
    }

    pub fn alphabet<T: Real>(&self) -> Vec<Vec<Complex<T>>> {
        self.symbols
            .iter()
            .map(|s| s.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect())
            .collect()
    }

    /// `Demap_m(x_k)` with 1-based `m`.
    pub fn demap_bit(&self, k: usize, m: usize) -> Result<u8> {
        if k >= self.size() || m == 0 || m > self.m() {
            return param(format!("symbol {k} / bit {m} out of range"));
        }
        Ok(self.bit(k, m))
    }

    #[inline]
    pub(crate) fn bit(&self, k: usize, m: usize) -> u8 {
        ((k >> (self.m() - m)) & 1) as u8
    }

    /// `K_m(u)`: symbol indices whose bit `m` equals `u`.
    pub fn k_set(&self, m: usize, u: u8) -> Result<Vec<usize>> {
        if m == 0 || m > self.m() || u > 1 {
            return param(format!("bit position {m} / value {u} out of range"));
        }
        Ok((0..self.size()).filter(|&k| self.bit(k, m) == u).collect())
    }

    /// Groups `M` bits per slot into symbol indices.
    pub fn symbol_indices(&self, bits: &[u8]) -> Result<Vec<usize>> {
        let m = self.m();
        if bits.len() % m != 0 {
            return param(format!("{} bits do not divide into groups of {m}", bits.len()));
        }
        Ok(bits.chunks(m).map(|g| g.iter().fold(0usize, |k, &b| (k << 1) | (b & 1) as usize)).collect())
    }

    pub fn map_symbols(&self, bits: &[u8]) -> Result<Vec<Vec<Complex<f64>>>> {
        Ok(self.symbol_indices(bits)?.into_iter().map(|k| self.symbols[k].clone()).collect())
    }

    /// Coded bits of a symbol-index sequence.
    pub fn demap_indices(&self, indices: &[usize]) -> Vec<u8> {
        indices.iter().flat_map(|&k| (1..=self.m()).map(move |m| self.bit(k, m))).collect()
    }
}
