use crate::coding::Constellation;
use crate::numeric::{Real, PROB_FLOOR};

pub const LLR_CLAMP: f64 = 50.0;

/// Instrumented operation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Conditional-PMF (or density) evaluations.
    pub pmf_evals: u64,
    /// Transitions visited by the forward recursion.
    pub forward: u64,
    /// Transitions visited by the backward recursion.
    pub backward: u64,
    /// Transitions visited while forming symbol marginals.
    pub marginal: u64,
    /// Check-to-variable product terms accumulated by BP.
    pub bp_terms: u64,
    /// Complex multiply-accumulates of linear (FFT/LMMSE) receivers.
    pub linear: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.pmf_evals + self.forward + self.backward + self.marginal + self.bp_terms + self.linear
    }

    pub fn trellis(&self) -> u64 {
        self.forward + self.backward + self.marginal
    }
}

/// Per-bit LLRs of one frame. Bit `i` (1-based) sits in slot
/// `n_i = ⌈i/M⌉` at position `m_i = i − M(n_i − 1)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LlrFrame {
    pub llrs: Vec<f64>,
    pub bits_per_symbol: usize,
    pub ops: OpCounts,
    /// Degenerate-probability events: all-zero bit marginals (LLR set to 0)
    /// and BP messages reset to uniform.
    pub underflows: usize,
    /// LLRs that hit the ±50 clamp.
    pub clamped: usize,
}

impl LlrFrame {
    pub fn len(&self) -> usize {
        self.llrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llrs.is_empty()
    }

    pub fn n_d(&self) -> usize {
        self.llrs.len() / self.bits_per_symbol.max(1)
    }

    /// `(n_i, m_i)` for 1-based bit index `i`.
    pub fn slot_of(&self, i: usize) -> (usize, usize) {
        let m = self.bits_per_symbol;
        let n = i.div_ceil(m);
        (n, i - m * (n - 1))
    }

    /// Builds LLRs from per-slot symbol marginals (`marginals[n-1][k]`, any scale).
    pub fn from_marginals<T: Real>(marginals: &[Vec<T>], cst: &Constellation) -> Self {
        let m = cst.m();
        let mut out = LlrFrame { llrs: Vec::with_capacity(marginals.len() * m), bits_per_symbol: m, ..Default::default() };
        for slot in marginals {
            for bit in 1..=m {
                let (mut p0, mut p1) = (0.0, 0.0);
                for (k, p) in slot.iter().enumerate() {
                    if cst.bit(k, bit) == 0 {
                        p0 += p.as_f64();
                    } else {
                        p1 += p.as_f64();
                    }
                }
                let l = if p0 <= 0.0 && p1 <= 0.0 || !(p0 + p1).is_finite() {
                    out.underflows += 1;
                    0.0
                } else {
                    let raw = p0.max(PROB_FLOOR).ln() - p1.max(PROB_FLOOR).ln();
                    if raw.abs() > LLR_CLAMP {
                        out.clamped += 1;
                    }
                    raw.clamp(-LLR_CLAMP, LLR_CLAMP)
                };
                out.llrs.push(l);
            }
        }
        out
    }

    /// Hard decisions (negative LLR → 1).
    pub fn hard_bits(&self) -> Vec<u8> {
        self.llrs.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}
