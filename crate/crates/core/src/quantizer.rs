//! B-bit scalar quantizer applied separately to real and imaginary parts.

use num_complex::Complex;

use crate::error::{param, Result};
use crate::numeric::Real;

/// Largest resolution accepted by [`Quantizer::uniform`].
pub const MAX_BITS: u32 = 16;

/// Scalar quantizer with levels `q_1 < … < q_{2^B}` and bin edges
/// `b_0 = -∞ < b_1 < … < b_{2^B} = +∞`, where `Q(r) = q_p` iff `b_{p-1} < r ≤ b_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantizer<T> {
    bits: u32,
    levels: Vec<T>,
    edges: Vec<T>,
}

impl<T: Real> Quantizer<T> {
    /// Builds a quantizer from ascending levels; edges sit at level midpoints.
    pub fn from_levels(levels: Vec<T>) -> Result<Self> {
        let n = levels.len();
        if n < 2 || !n.is_power_of_two() {
            return param(format!("quantizer needs 2^B >= 2 levels, got {n}"));
        }
        if levels.windows(2).any(|w| !(w[0] < w[1])) {
            return param("quantizer levels must be strictly increasing");
        }
        let mut edges = Vec::with_capacity(n + 1);
        edges.push(T::neg_infinity());
        edges.extend(levels.windows(2).map(|w| (w[0] + w[1]) / T::lit(2.0)));
        edges.push(T::infinity());
        Ok(Self { bits: n.trailing_zeros(), levels, edges })
    }

    /// Symmetric uniform quantizer.
    ///
    /// `B = 1` uses levels `{-1, +1}`. For `B >= 2` the step is `0.75·2^(2-B)`
    /// with levels at odd multiples of half a step, so `B = 2` gives
    /// `{-1.125, -0.375, 0.375, 1.125}` and finer quantizers keep the ±1.5 span.
    pub fn uniform(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return param(format!("adc bits must be in 1..={MAX_BITS}, got {bits}"));
        }
        if bits == 1 {
            return Self::from_levels(vec![-T::one(), T::one()]);
        }
        let n = 1usize << bits;
        let step = 0.75 * 2f64.powi(2 - bits as i32);
        let centre = (n as f64 + 1.0) / 2.0;
        let levels = (1..=n).map(|p| T::lit((p as f64 - centre) * step)).collect();
        Self::from_levels(levels)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// All edges `b_0..b_{2^B}` including the infinite ends.
    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    /// Finite edges `b_1..b_{2^B-1}`.
    pub fn finite_edges(&self) -> &[T] {
        &self.edges[1..self.edges.len() - 1]
    }

    /// Index `p-1` of the bin containing `r`.
    #[inline]
    pub fn bin_index(&self, r: T) -> usize {
        self.finite_edges().partition_point(|&b| b < r)
    }

    #[inline]
    pub fn quantize(&self, r: T) -> T {
        self.levels[self.bin_index(r)]
    }

    pub fn quantize_cplx(&self, z: Complex<T>) -> Complex<T> {
        Complex::new(self.quantize(z.re), self.quantize(z.im))
    }

    /// Elementwise quantization of a sequence of received vectors.
    pub fn quantize_seq(&self, seq: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
        seq.iter().map(|v| v.iter().map(|&z| self.quantize_cplx(z)).collect()).collect()
    }

    /// Position of `level` in the alphabet.
    pub fn level_index(&self, level: T) -> Result<usize> {
        let i = self.levels.partition_point(|&q| q < level);
        if i < self.levels.len() && self.levels[i] == level {
            Ok(i)
        } else {
            param(format!("{level} is not a quantizer level"))
        }
    }

    /// The bin `(l(q), u(q)]` of a level.
    pub fn bounds(&self, level: T) -> Result<(T, T)> {
        let i = self.level_index(level)?;
        Ok((self.edges[i], self.edges[i + 1]))
    }
}
