use num_complex::Complex;
use rand::Rng;
use sparseq_core::channel::{propagate, ChannelTaps};
use sparseq_core::coding::{Constellation, Modulation};
use sparseq_core::detect::*;
use sparseq_core::linalg::CMat;
use sparseq_core::numeric::RngStream;
use sparseq_core::quantizer::Quantizer;
use sparseq_core::sparsify::{cond_pmf_sparse, SparseIsiModel};

type C = Complex<f64>;

struct Instance {
    ch: ChannelTaps<f64>,
    cst: Constellation,
    sigma2: f64,
    y: Vec<Vec<C>>,
    r: Vec<Vec<C>>,
}

fn instance(rng: &mut RngStream, n_rx: usize, n_tx: usize, delays: &[usize], n_d: usize, sigma2: f64, quant: &Quantizer<f64>, scale: f64) -> Instance {
    let ch = ChannelTaps::new(
        n_rx,
        n_tx,
        delays.iter().map(|&d| (d, CMat::from_fn(n_rx, n_tx, |_, _| C::new(rng.normal(), rng.normal()) * scale))),
    )
    .unwrap();
    let cst = Constellation::new(Modulation::Bpsk, n_tx).unwrap();
    let x: Vec<Vec<C>> = (0..n_d).map(|_| cst.symbol(rng.gen_range(0..cst.size())).to_vec()).collect();
    let r = propagate(&ch, &x, None, sigma2, rng).unwrap();
    let y = quant.quantize_seq(&r);
    Instance { ch, cst, sigma2, y, r }
}

fn close(a: &[f64], b: &[f64], rel: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs() / y.abs().max(1.0);
        worst = worst.max(d);
    }
    assert!(worst <= rel, "max deviation {worst}");
    worst
}

#[test]
fn qbcjr_matches_exhaustive_oracle_without_weak_taps() {
    let mut rng = RngStream::new(100, 0);
    for bits in [1, 2] {
        let q = Quantizer::uniform(bits).unwrap();
        for _ in 0..20 {
            let inst = instance(&mut rng, 2, 1, &[0, 1], 4, 0.3, &q, 0.6);
            let model = SparseIsiModel::new(&inst.ch, &[0, 1], inst.sigma2).unwrap();
            let tr = build_trellis(&[0, 1], 2, 4, DEFAULT_TRELLIS_BUDGET).unwrap();
            let a = qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).unwrap();
            let b = bruteforce_llrs(&inst.y, &inst.ch, &q, inst.sigma2, &inst.cst, 4).unwrap();
            close(&a.llrs, &b.llrs, 1e-8);
        }
    }
}

#[test]
fn qbcjr_sparse_delays_match_oracle() {
    let mut rng = RngStream::new(101, 0);
    let q = Quantizer::uniform(2).unwrap();
    for _ in 0..10 {
        let inst = instance(&mut rng, 2, 2, &[0, 2], 4, 0.5, &q, 0.4);
        let model = SparseIsiModel::new(&inst.ch, &[0, 2], inst.sigma2).unwrap();
        let tr = build_trellis(&[0, 2], 4, 4, DEFAULT_TRELLIS_BUDGET).unwrap();
        let a = qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).unwrap();
        let b = bruteforce_llrs(&inst.y, &inst.ch, &q, inst.sigma2, &inst.cst, 4).unwrap();
        close(&a.llrs, &b.llrs, 1e-8);
    }
}

#[test]
fn negated_observations_negate_llrs() {
    let mut rng = RngStream::new(102, 0);
    let q = Quantizer::uniform(2).unwrap();
    let inst = instance(&mut rng, 2, 1, &[0, 1, 3], 6, 0.4, &q, 0.5);
    let model = SparseIsiModel::new(&inst.ch, &[0, 1], inst.sigma2).unwrap();
    let tr = build_trellis(&[0, 1], 2, 6, DEFAULT_TRELLIS_BUDGET).unwrap();
    let neg: Vec<Vec<C>> = inst.y.iter().map(|v| v.iter().map(|z| -z).collect()).collect();
    let a = qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).unwrap();
    let b = qbcjr_llrs(&neg, &model, &tr, &q, &inst.cst).unwrap();
    for (x, y) in a.llrs.iter().zip(&b.llrs) {
        assert!((x + y).abs() < 1e-9);
    }
}

#[test]
fn unnormalized_marginals_share_the_evidence() {
    let mut rng = RngStream::new(103, 0);
    let q = Quantizer::uniform(1).unwrap();
    let inst = instance(&mut rng, 2, 1, &[0, 1, 2], 5, 0.5, &q, 0.6);
    let model = SparseIsiModel::new(&inst.ch, &[0, 2], inst.sigma2).unwrap();
    let tr = build_trellis(&[0, 2], 2, 5, DEFAULT_TRELLIS_BUDGET).unwrap();
    let (marg, _) = qbcjr_marginals(&inst.y, &model, &tr, &q, &inst.cst, false).unwrap();
    let totals: Vec<f64> = marg.iter().map(|m| m.iter().sum()).collect();
    for t in &totals {
        assert!((t - totals[0]).abs() <= 1e-12 * totals[0], "{totals:?}");
    }
    let (norm, _) = qbcjr_marginals(&inst.y, &model, &tr, &q, &inst.cst, true).unwrap();
    let a = LlrFrame::from_marginals(&marg, &inst.cst);
    let b = LlrFrame::from_marginals(&norm, &inst.cst);
    for (x, y) in a.llrs.iter().zip(&b.llrs) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn qbp_memoryless_equals_per_slot_posterior() {
    let mut rng = RngStream::new(104, 0);
    let q = Quantizer::uniform(2).unwrap();
    let inst = instance(&mut rng, 2, 2, &[0, 1], 8, 0.3, &q, 0.5);
    let model = SparseIsiModel::new(&inst.ch, &[0], inst.sigma2).unwrap();
    let f = qbp_llrs(&inst.y, &model, &q, &inst.cst, 8, 1).unwrap();
    for n in 1..=8 {
        let w = model.window(n, 8);
        let p: Vec<f64> = inst
            .cst
            .symbols()
            .iter()
            .map(|x| cond_pmf_sparse(&inst.y[n - 1], x, &model, &w, &q).unwrap())
            .collect();
        // bit 1: antenna 0 sign, bit 2: antenna 1 sign
        let l1 = ((p[0] + p[1]) / (p[2] + p[3])).ln();
        let l2 = ((p[0] + p[2]) / (p[1] + p[3])).ln();
        assert!((f.llrs[2 * (n - 1)] - l1).abs() < 1e-10);
        assert!((f.llrs[2 * (n - 1) + 1] - l2).abs() < 1e-10);
    }
}

#[test]
fn qbp_on_tree_is_exact() {
    let mut rng = RngStream::new(105, 0);
    for bits in [1, 2] {
        let q = Quantizer::uniform(bits).unwrap();
        for _ in 0..10 {
            let inst = instance(&mut rng, 2, 1, &[0, 1], 2, 0.4, &q, 0.6);
            let model = SparseIsiModel::new(&inst.ch, &[0, 1], inst.sigma2).unwrap();
            let tr = build_trellis(&[0, 1], 2, 2, DEFAULT_TRELLIS_BUDGET).unwrap();
            let bp = qbp_llrs(&inst.y, &model, &q, &inst.cst, 2, 3).unwrap();
            let bcjr = qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).unwrap();
            close(&bp.llrs, &bcjr.llrs, 1e-8);
        }
    }
}

#[test]
fn qbp_variable_messages_are_distributions() {
    let mut rng = RngStream::new(106, 0);
    let q = Quantizer::uniform(1).unwrap();
    let inst = instance(&mut rng, 2, 1, &[0, 1, 3, 4], 12, 0.2, &q, 0.7);
    let model = SparseIsiModel::new(&inst.ch, &[0, 1, 3], inst.sigma2).unwrap();
    let mut checked = 0;
    qbp_run(&inst.y, &model, &q, &inst.cst, 12, 4, |_, msg| {
        for v in 1..=12 {
            for p in 0..3 {
                let s: f64 = msg.t(v, p).iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(msg.r(v, p).iter().all(|&x| x >= 0.0));
                checked += 1;
            }
        }
    })
    .unwrap();
    assert_eq!(checked, 4 * 12 * 3);
    assert!(qbp_llrs(&inst.y, &model, &q, &inst.cst, 12, 0).is_err());
}

/// Number of in-frame positions among slots `n, n-1, …, n-len+1`.
fn valid_positions(n: usize, len: usize, n_d: usize) -> u32 {
    (0..len).filter(|&i| n > i && n - i <= n_d).count() as u32
}

#[test]
fn operation_counts_follow_combinatorics() {
    let mut rng = RngStream::new(107, 0);
    let q_adc = Quantizer::uniform(1).unwrap();
    let n_d = 9;
    let cases: &[&[usize]] = &[&[0, 1], &[0, 2], &[1, 3], &[0, 1, 3], &[2], &[0]];
    for &dom in cases {
        let inst = instance(&mut rng, 1, 2, &[0, 1, 2, 3], n_d, 0.5, &q_adc, 0.5);
        let q = inst.cst.size() as u64;
        let model = SparseIsiModel::new(&inst.ch, dom, inst.sigma2).unwrap();
        let l_d = dom.last().unwrap() + 1;
        let slots = n_d + l_d - 1;
        let d_n = |n: usize| dom.iter().filter(|&&d| n > d && n - d <= n_d).count() as u32;
        let pmf: u64 = (1..=slots).map(|n| q.pow(d_n(n))).sum();
        let tc = |n: usize| q.pow(valid_positions(n - 1, l_d - 1, n_d)) * if n <= n_d { q } else { 1 };

        let tr = build_trellis(dom, q as usize, n_d, DEFAULT_TRELLIS_BUDGET).unwrap();
        let f = qbcjr_llrs(&inst.y, &model, &tr, &q_adc, &inst.cst).unwrap();
        assert_eq!(f.ops.pmf_evals, pmf);
        assert_eq!(f.ops.forward, (1..n_d).map(tc).sum::<u64>());
        assert_eq!(f.ops.backward, (2..=slots).map(tc).sum::<u64>());
        assert_eq!(f.ops.marginal, (1..=n_d).map(tc).sum::<u64>());
        if l_d <= n_d {
            assert_eq!(tr.transition_count(l_d) as u64, q.pow(l_d as u32));
        }

        let n_it = 3;
        let g = qbp_llrs(&inst.y, &model, &q_adc, &inst.cst, n_d, n_it).unwrap();
        assert_eq!(g.ops.pmf_evals, pmf);
        let per_it: u64 = (1..=slots).map(|n| d_n(n) as u64 * q.pow(d_n(n))).sum();
        assert_eq!(g.ops.bp_terms, n_it as u64 * per_it);
    }
}

#[test]
fn bruteforce_single_slot_likelihood_ratio() {
    let q = Quantizer::uniform(2).unwrap();
    let ch = ChannelTaps::new(1, 1, [(0, CMat::from_vec(1, 1, vec![C::new(0.8, 0.0)]).unwrap())]).unwrap();
    let cst = Constellation::new(Modulation::Bpsk, 1).unwrap();
    let y = vec![vec![C::new(0.375, -0.375)]];
    let s2 = 0.5;
    let f = bruteforce_llrs(&y, &ch, &q, s2, &cst, 1).unwrap();
    let s = (s2 / 2.0f64).sqrt();
    let phi = |x: f64| sparseq_core::numeric::stdnormal_cdf(x).unwrap();
    // real part bin (0, 0.75], imaginary bin (-0.75, 0]; imaginary factor cancels
    let p = |m: f64| phi((0.75 - m) / s) - phi((0.0 - m) / s);
    assert!((f.llrs[0] - (p(0.8) / p(-0.8)).ln()).abs() < 1e-12);

    let mut rng = RngStream::new(108, 0);
    let inst = instance(&mut rng, 1, 1, &[0, 1], 3, 0.5, &q, 0.7);
    let (marg, _) = bruteforce_marginals(&inst.y, &inst.ch, &q, 0.5, &inst.cst, 3).unwrap();
    let g = LlrFrame::from_marginals(&marg, &inst.cst);
    for n in 0..3 {
        assert!((g.llrs[n].exp() * marg[n][1] - marg[n][0]).abs() <= 1e-12 * marg[n][0]);
    }
    let big = Constellation::new(Modulation::Qam4, 2).unwrap();
    assert!(bruteforce_llrs(&inst.y, &inst.ch, &q, 0.5, &big, 6).is_err());
}

#[test]
fn unquantized_matched_filter() {
    let ch = ChannelTaps::new(1, 1, [(0, CMat::identity(1))]).unwrap();
    let cst = Constellation::new(Modulation::Bpsk, 1).unwrap();
    let r = vec![vec![C::new(0.3, 0.1)], vec![C::new(-1.2, 0.4)]];
    let s2 = 0.7;
    let f = bcjr_unquantized_llrs(&r, &ch, s2, &cst, 2, DEFAULT_TRELLIS_BUDGET).unwrap();
    for n in 0..2 {
        assert!((f.llrs[n] - 4.0 * r[n][0].re / s2).abs() < 1e-12);
    }
}

#[test]
fn unquantized_equal_taps_are_symmetric() {
    let one = CMat::identity(1);
    let ch = ChannelTaps::new(1, 1, [(0, one.clone()), (1, one)]).unwrap();
    let cst = Constellation::new(Modulation::Bpsk, 1).unwrap();
    let r = vec![vec![C::new(1.1, 0.0)], vec![C::new(1.7, 0.0)], vec![C::new(1.1, 0.0)]];
    let f = bcjr_unquantized_llrs(&r, &ch, 0.8, &cst, 2, DEFAULT_TRELLIS_BUDGET).unwrap();
    assert!((f.llrs[0] - f.llrs[1]).abs() < 1e-12);
    assert!(f.llrs[0] > 0.0);
}

#[test]
fn fine_quantization_approaches_unquantized_bcjr() {
    let mut rng = RngStream::new(109, 0);
    let q = Quantizer::uniform(8).unwrap();
    for _ in 0..10 {
        // small amplitudes keep the 8-bit quantizer away from its ±1.5 saturation
        let inst = instance(&mut rng, 2, 1, &[0, 1], 5, 0.3, &q, 0.1);
        let model = SparseIsiModel::new(&inst.ch, &[0, 1], inst.sigma2).unwrap();
        let tr = build_trellis(&[0, 1], 2, 5, DEFAULT_TRELLIS_BUDGET).unwrap();
        let a = qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).unwrap();
        let b = bcjr_unquantized_llrs(&inst.r, &inst.ch, inst.sigma2, &inst.cst, 5, DEFAULT_TRELLIS_BUDGET).unwrap();
        for (x, y) in a.llrs.iter().zip(&b.llrs) {
            assert!((x - y).abs() < 0.05, "{x} vs {y}");
        }
    }
}

#[test]
fn mismatched_setup_is_rejected() {
    let mut rng = RngStream::new(110, 0);
    let q = Quantizer::uniform(1).unwrap();
    let inst = instance(&mut rng, 1, 1, &[0, 1], 4, 0.5, &q, 0.5);
    let model = SparseIsiModel::new(&inst.ch, &[0, 1], 0.5).unwrap();
    let tr = build_trellis(&[0], 2, 4, DEFAULT_TRELLIS_BUDGET).unwrap();
    assert!(qbcjr_llrs(&inst.y, &model, &tr, &q, &inst.cst).is_err());
    let tr = build_trellis(&[0, 1], 2, 4, DEFAULT_TRELLIS_BUDGET).unwrap();
    assert!(qbcjr_llrs(&inst.y[..3], &model, &tr, &q, &inst.cst).is_err());
}

