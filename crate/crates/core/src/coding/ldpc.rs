use crate::error::{param, Error, Result};

const BASE_MATRIX: &str = include_str!("../../data/ieee80211ad_rate12.txt");

/// Sparse GF(2) matrix stored as row and column adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    row_cols: Vec<Vec<usize>>,
    col_rows: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds from the column index list of every row.
    pub fn from_rows(cols: usize, row_cols: Vec<Vec<usize>>) -> Result<Self> {
        let mut col_rows = vec![Vec::new(); cols];
        let mut row_cols = row_cols;
        for (r, cs) in row_cols.iter_mut().enumerate() {
            cs.sort_unstable();
            if cs.windows(2).any(|w| w[0] == w[1]) {
                return param(format!("row {r} lists a column twice"));
            }
            for &c in cs.iter() {
                if c >= cols {
                    return param(format!("row {r} references column {c} of {cols}"));
                }
                col_rows[c].push(r);
            }
        }
        Ok(Self { rows: row_cols.len(), cols, row_cols, col_rows })
    }

    /// Expands a quasi-cyclic prototype (`-1` = zero block, `s` = identity shifted by `s`).
    pub fn from_prototype(proto: &[Vec<i32>], z: usize) -> Result<Self> {
        let n_blocks = proto.first().map_or(0, Vec::len);
        if z == 0 || proto.iter().any(|r| r.len() != n_blocks) {
            return param("ragged prototype matrix or zero lift size");
        }
        let mut rows = Vec::with_capacity(proto.len() * z);
        for brow in proto {
            for i in 0..z {
                let mut cs = Vec::new();
                for (bc, &s) in brow.iter().enumerate() {
                    if s < 0 {
                        continue;
                    }
                    if s as usize >= z {
                        return param(format!("shift {s} not below lift size {z}"));
                    }
                    cs.push(bc * z + (i + s as usize) % z);
                }
                rows.push(cs);
            }
        }
        Self::from_rows(n_blocks * z, rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_cols[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_rows[c]
    }

    pub fn nnz(&self) -> usize {
        self.row_cols.iter().map(Vec::len).sum()
    }

    /// `H·c` over GF(2).
    pub fn syndrome(&self, word: &[u8]) -> Vec<u8> {
        self.row_cols.iter().map(|cs| cs.iter().fold(0u8, |a, &c| a ^ (word[c] & 1))).collect()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.cols && self.syndrome(word).iter().all(|&s| s == 0)
    }

    fn dense_rows(&self) -> Vec<Vec<u64>> {
        let words = self.cols.div_ceil(64);
        self.row_cols
            .iter()
            .map(|cs| {
                let mut v = vec![0u64; words];
                for &c in cs {
                    v[c / 64] |= 1 << (c % 64);
                }
                v
            })
            .collect()
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        rref(self.dense_rows(), &order).1.len()
    }
}

#[inline]
fn get(v: &[u64], c: usize) -> bool {
    (v[c / 64] >> (c % 64)) & 1 == 1
}

/// Gauss-Jordan elimination trying pivot columns in `order`.
/// Returns the reduced nonzero rows and their pivot columns.
fn rref(mut m: Vec<Vec<u64>>, order: &[usize]) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut top = 0;
    for &c in order {
        if top == m.len() {
            break;
        }
        let Some(p) = (top..m.len()).find(|&r| get(&m[r], c)) else { continue };
        m.swap(top, p);
        let pivot_row = m[top].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != top && get(row, c) {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        top += 1;
    }
    m.truncate(top);
    (m, pivots)
}

/// Outcome of sum-product decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub info: Vec<u8>,
    pub codeword: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

/// Binary LDPC code with a systematic encoder derived from its parity-check matrix.
#[derive(Clone, Debug)]
pub struct LdpcCode {
    h: SparseBinaryMatrix,
    info_pos: Vec<usize>,
    pivot_cols: Vec<usize>,
    reduced: Vec<Vec<u64>>,
}

impl LdpcCode {
    pub fn new(h: SparseBinaryMatrix) -> Result<Self> {
        // prefer pivots in the trailing (parity) columns so info bits come first
        let split = h.cols - h.rows.min(h.cols);
        let order: Vec<usize> = (split..h.cols).chain(0..split).collect();
        let (reduced, pivot_cols) = rref(h.dense_rows(), &order);
        let info_pos: Vec<usize> = (0..h.cols).filter(|c| !pivot_cols.contains(c)).collect();
        if info_pos.is_empty() {
            return param("parity-check matrix has full column rank; code is empty");
        }
        Ok(Self { h, info_pos, pivot_cols, reduced })
    }

    /// The rate-1/2, length-672 code of IEEE 802.11ad.
    pub fn ieee80211ad_rate12() -> Self {
        let (proto, z) = parse_prototype(BASE_MATRIX).expect("vendored prototype matrix parses");
        let h = SparseBinaryMatrix::from_prototype(&proto, z).expect("vendored prototype matrix is valid");
        Self::new(h).expect("vendored code is nonempty")
    }

    pub fn h(&self) -> &SparseBinaryMatrix {
        &self.h
    }

    pub fn n(&self) -> usize {
        self.h.cols
    }

    pub fn k(&self) -> usize {
        self.info_pos.len()
    }

    /// Codeword positions holding the information bits.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_pos
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return param(format!("expected {} info bits, got {}", self.k(), info.len()));
        }
        let mut word = vec![0u8; self.n()];
        let mut packed = vec![0u64; self.n().div_ceil(64)];
        for (&p, &b) in self.info_pos.iter().zip(info) {
            word[p] = b & 1;
            if b & 1 == 1 {
                packed[p / 64] |= 1 << (p % 64);
            }
        }
        for (row, &c) in self.reduced.iter().zip(&self.pivot_cols) {
            let ones: u32 = row.iter().zip(&packed).map(|(a, b)| (a & b).count_ones()).sum();
            word[c] = (ones & 1) as u8;
        }
        Ok(word)
    }

    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_pos.iter().map(|&p| word[p]).collect()
    }

    /// Sum-product decoding. Positive LLR favours bit 0.
    pub fn decode(&self, llrs: &[f64], max_iters: usize) -> Result<DecodeResult> {
        let n = self.n();
        if llrs.len() != n {
            return param(format!("expected {n} LLRs, got {}", llrs.len()));
        }
        if llrs.iter().any(|l| l.is_nan()) {
            return Err(Error::Param("NaN LLR".into()));
        }
        let m = self.h.rows;
        let mut start = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::with_capacity(self.h.nnz());
        start.push(0);
        for r in 0..m {
            edge_var.extend_from_slice(self.h.row(r));
            start.push(edge_var.len());
        }
        let mut var_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[v].push(e);
        }
        let mut v2c: Vec<f64> = edge_var.iter().map(|&v| llrs[v]).collect();
        let mut c2v = vec![0.0; edge_var.len()];
        let mut hard: Vec<u8> = llrs.iter().map(|&l| u8::from(l < 0.0)).collect();
        let mut t = Vec::new();
        let limit = 1.0 - 1e-15;
        for it in 1..=max_iters {
            for r in 0..m {
                let es = start[r]..start[r + 1];
                t.clear();
                t.extend(v2c[es.clone()].iter().map(|&x| (x / 2.0).tanh()));
                let d = t.len();
                // leave-one-out products via prefix/suffix
                let mut prefix = 1.0;
                for j in 0..d {
                    c2v[es.start + j] = prefix;
                    prefix *= t[j];
                }
                let mut suffix = 1.0;
                for j in (0..d).rev() {
                    let p = (c2v[es.start + j] * suffix).clamp(-limit, limit);
                    c2v[es.start + j] = 2.0 * p.atanh();
                    suffix *= t[j];
                }
            }
            for v in 0..n {
                let total = llrs[v] + var_edges[v].iter().map(|&e| c2v[e]).sum::<f64>();
                hard[v] = u8::from(total < 0.0);
                for &e in &var_edges[v] {
                    v2c[e] = total - c2v[e];
                }
            }
            if self.h.is_codeword(&hard) {
                return Ok(DecodeResult { info: self.extract_info(&hard), codeword: hard, converged: true, iterations: it });
            }
        }
        Ok(DecodeResult { info: self.extract_info(&hard), codeword: hard, converged: false, iterations: max_iters })
    }
}

/// Parses the prototype text format: `#` comments, the lift size, then one
/// whitespace-separated row per line.
pub fn parse_prototype(text: &str) -> Result<(Vec<Vec<i32>>, usize)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let z: usize = lines
        .next()
        .ok_or_else(|| Error::Format("missing lift size".into()))?
        .parse()
        .map_err(|e| Error::Format(format!("lift size: {e}")))?;
    let rows = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<i32>().map_err(|e| Error::Format(format!("entry '{t}': {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, z))
}
