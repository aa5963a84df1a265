//! alist text format for sparse GF(2) matrices (1-based indices, zero padding).

use std::fmt::Write as _;
use std::path::Path;

use super::ldpc::SparseBinaryMatrix;
use crate::error::{Error, Result};

pub fn to_alist(h: &SparseBinaryMatrix) -> String {
    let n = h.cols();
    let m = h.rows();
    let col_deg: Vec<usize> = (0..n).map(|c| h.col(c).len()).collect();
    let row_deg: Vec<usize> = (0..m).map(|r| h.row(r).len()).collect();
    let max_c = col_deg.iter().copied().max().unwrap_or(0);
    let max_r = row_deg.iter().copied().max().unwrap_or(0);
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let padded = |v: &[usize], w: usize| {
        let mut out: Vec<usize> = v.iter().map(|i| i + 1).collect();
        out.resize(w, 0);
        join(&out)
    };
    let mut s = String::new();
    let _ = writeln!(s, "{n} {m}");
    let _ = writeln!(s, "{max_c} {max_r}");
    let _ = writeln!(s, "{}", join(&col_deg));
    let _ = writeln!(s, "{}", join(&row_deg));
    for c in 0..n {
        let _ = writeln!(s, "{}", padded(h.col(c), max_c));
    }
    for r in 0..m {
        let _ = writeln!(s, "{}", padded(h.row(r), max_r));
    }
    s
}

pub fn from_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut tok = text.split_whitespace().map(|t| t.parse::<usize>().map_err(|e| Error::Format(format!("alist token '{t}': {e}"))));
    let mut next = || tok.next().unwrap_or_else(|| Err(Error::Format("alist ended early".into())));
    let n = next()?;
    let m = next()?;
    let max_c = next()?;
    let max_r = next()?;
    let col_deg = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let row_deg = (0..m).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let mut col_lists = Vec::with_capacity(n);
    for &d in &col_deg {
        let entries = (0..max_c).map(|_| next()).collect::<Result<Vec<_>>>()?;
        col_lists.push(entries.into_iter().take(d).collect::<Vec<_>>());
    }
    let mut rows = Vec::with_capacity(m);
    for &d in &row_deg {
        let entries = (0..max_r).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let cols: Vec<usize> = entries
            .into_iter()
            .take(d)
            .map(|c| c.checked_sub(1).ok_or_else(|| Error::Format("zero index inside alist row".into())))
            .collect::<Result<_>>()?;
        rows.push(cols);
    }
    let h = SparseBinaryMatrix::from_rows(n, rows)?;
    for (c, list) in col_lists.iter().enumerate() {
        let mut l: Vec<usize> = list.iter().map(|r| r.wrapping_sub(1)).collect();
        l.sort_unstable();
        if l != h.col(c) {
            return Err(Error::Format(format!("alist column {} disagrees with row lists", c + 1)));
        }
    }
    Ok(h)
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<SparseBinaryMatrix> {
    from_alist(&std::fs::read_to_string(path)?)
}

pub fn write_alist(h: &SparseBinaryMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}
