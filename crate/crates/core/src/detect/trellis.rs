use crate::error::{param, Error, Result};

/// Default cap on `|X|^{L_D}` (transitions per mid-frame slot).
pub const DEFAULT_TRELLIS_BUDGET: u128 = 1 << 16;

/// Reduced trellis over the dominant taps.
///
/// A state at slot `n` encodes the symbol indices of `x[n], …, x[n−L_D+2]`
/// in base `|X|` with `x[n]` as the most significant digit. Symbols outside
/// `1..=N_d` are the zero vector and their digit is forced to 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trellis {
    q: usize,
    dominant: Vec<usize>,
    n_d: usize,
    memory: usize,
    pow: Vec<usize>,
}

pub fn build_trellis(dominant: &[usize], alphabet_size: usize, n_d: usize, budget: u128) -> Result<Trellis> {
    if dominant.is_empty() {
        return param("the dominant set must be nonempty");
    }
    if alphabet_size < 2 || n_d == 0 {
        return param("alphabet size must be at least 2 and N_d at least 1");
    }
    let mut dom = dominant.to_vec();
    dom.sort_unstable();
    dom.dedup();
    let l_d = dom[dom.len() - 1] + 1;
    let needed = (alphabet_size as u128).checked_pow(l_d as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let memory = l_d - 1;
    let pow = (0..=memory).map(|i| alphabet_size.pow(i as u32)).collect();
    Ok(Trellis { q: alphabet_size, dominant: dom, n_d, memory, pow })
}

impl Trellis {
    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn dominant(&self) -> &[usize] {
        &self.dominant
    }

    pub fn l_d(&self) -> usize {
        self.memory + 1
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    /// Last slot carrying a dominant-tap contribution, `N_d + L_D − 1`.
    pub fn n_slots(&self) -> usize {
        self.n_d + self.memory
    }

    /// `|X|^{L_D−1}`, the size of the state index space.
    pub fn state_space(&self) -> usize {
        self.pow[self.memory]
    }

    pub fn is_data_slot(&self, n: usize) -> bool {
        (1..=self.n_d).contains(&n)
    }

    /// Number of symbol hypotheses entering slot `n`.
    pub fn slot_symbols(&self, n: usize) -> usize {
        if self.is_data_slot(n) {
            self.q
        } else {
            1
        }
    }

    /// Symbol index of `x[n−i]` held by state `s` at slot `n`.
    #[inline]
    pub fn digit(&self, s: usize, i: usize) -> usize {
        (s / self.pow[self.memory - 1 - i]) % self.q
    }

    #[inline]
    pub fn next_state(&self, s_prev: usize, k: usize) -> usize {
        if self.memory == 0 {
            0
        } else {
            k * self.pow[self.memory - 1] + s_prev / self.q
        }
    }

    /// Valid states `S_n`, ascending.
    pub fn states(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0usize];
        for i in 0..self.memory {
            let valid = n > i && self.is_data_slot(n - i);
            if valid {
                let w = self.pow[self.memory - 1 - i];
                out = out.iter().flat_map(|&s| (0..self.q).map(move |k| s + k * w)).collect();
            }
        }
        out.sort_unstable();
        out
    }

    /// `|∪_k V_{n,k}| = |S_{n−1}|·(symbols entering slot n)`.
    pub fn transition_count(&self, n: usize) -> usize {
        self.states(n - 1).len() * self.slot_symbols(n)
    }

    /// All transitions `(s', s, k)` into slot `n`.
    pub fn transitions(&self, n: usize) -> Vec<(usize, usize, usize)> {
        let ks = self.slot_symbols(n);
        self.states(n - 1).into_iter().flat_map(|sp| (0..ks).map(move |k| (sp, self.next_state(sp, k), k))).collect()
    }
}
