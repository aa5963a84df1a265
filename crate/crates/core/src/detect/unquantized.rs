use num_complex::Complex;

use super::llr::{LlrFrame, OpCounts};
use super::qbcjr::forward_backward;
use super::tables::gaussian_tables;
use super::trellis::build_trellis;
use crate::channel::ChannelTaps;
use crate::coding::Constellation;
use crate::error::{param, Result};
use crate::numeric::Real;

/// BCJR on unquantized observations with every tap in the trellis.
pub fn bcjr_unquantized_llrs<T: Real>(
    r: &[Vec<Complex<T>>],
    ch: &ChannelTaps<T>,
    sigma2: T,
    cst: &Constellation,
    n_d: usize,
    budget: u128,
) -> Result<LlrFrame> {
    if !(sigma2 > T::zero()) {
        return param("noise variance must be positive");
    }
    let support = ch.support();
    let trellis = build_trellis(&support, cst.size(), n_d, budget)?;
    let taps: Vec<_> = ch.taps().collect();
    let alphabet = cst.alphabet::<T>();
    let (tables, evals) = gaussian_tables(r, &taps, sigma2, &alphabet, n_d, trellis.n_slots())?;
    let mut ops = OpCounts { pmf_evals: evals, ..Default::default() };
    let marg = forward_backward(&trellis, &tables, true, &mut ops);
    let mut f = LlrFrame::from_marginals(&marg, cst);
    f.ops = ops;
    Ok(f)
}
