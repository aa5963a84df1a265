use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use sparseq_core::channel::ChannelTaps;
use sparseq_core::linalg::CMat;
use sparseq_core::numeric::RngStream;
use sparseq_core::quantizer::Quantizer;
use sparseq_core::sparsify::{nmse, select_dominant_taps};

type C = Complex<f64>;

/// Sample-average estimate of the argument NMSE with Gaussian `x_D`, `x_W`.
fn nmse_monte_carlo(ch: &ChannelTaps<f64>, dominant: &[usize], sigma2: f64, q: &Quantizer<f64>, samples: usize, rng: &mut RngStream) -> f64 {
    let weak: Vec<usize> = ch.support().into_iter().filter(|l| !dominant.contains(l)).collect();
    let stack = |ds: &[usize]| -> Vec<CMat<f64>> { ds.iter().map(|&d| ch.tap(d).unwrap().clone()).collect() };
    let (hd, hw) = (stack(dominant), stack(&weak));
    let n_rx = ch.n_rx();
    let n_tx = ch.n_tx();
    let edges = q.finite_edges().to_vec();
    let pw: Vec<f64> = (0..n_rx).map(|r| hw.iter().map(|h| h.row_norm_sqr(r)).sum()).collect();
    let s_true = (sigma2 / 2.0).sqrt();
    let s_hat: Vec<f64> = pw.iter().map(|p| ((sigma2 + p) / 2.0).sqrt()).collect();
    // [r][p][re/im] sums of squared differences and squared approximations
    let mut num = vec![vec![[0.0; 2]; edges.len()]; n_rx];
    let mut den = vec![vec![[0.0; 2]; edges.len()]; n_rx];
    let cg = |rng: &mut RngStream| C::new(rng.normal(), rng.normal()) * std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..samples {
        let xd: Vec<Vec<C>> = hd.iter().map(|_| (0..n_tx).map(|_| cg(rng)).collect()).collect();
        let xw: Vec<Vec<C>> = hw.iter().map(|_| (0..n_tx).map(|_| cg(rng)).collect()).collect();
        for r in 0..n_rx {
            let mut d = C::new(0.0, 0.0);
            for (h, x) in hd.iter().zip(&xd) {
                d += h.row(r).iter().zip(x).map(|(a, b)| a * b).sum::<C>();
            }
            let mut w = C::new(0.0, 0.0);
            for (h, x) in hw.iter().zip(&xw) {
                w += h.row(r).iter().zip(x).map(|(a, b)| a * b).sum::<C>();
            }
            for (p, &b) in edges.iter().enumerate() {
                for (part, (dv, wv)) in [(d.re, w.re), (d.im, w.im)].into_iter().enumerate() {
                    let phi = (b - dv - wv) / s_true;
                    let phi_hat = (b - dv) / s_hat[r];
                    num[r][p][part] += (phi - phi_hat).powi(2);
                    den[r][p][part] += phi_hat.powi(2);
                }
            }
        }
    }
    let mut total = 0.0;
    for r in 0..n_rx {
        for p in 0..edges.len() {
            for part in 0..2 {
                total += 0.5 * num[r][p][part] / den[r][p][part];
            }
        }
    }
    total
}

fn random_instance(rng: &mut RngStream) -> (ChannelTaps<f64>, Vec<usize>, f64, Quantizer<f64>) {
    let n_rx = rng.gen_range(1..=2);
    let n_tx = rng.gen_range(1..=2);
    let n_taps = rng.gen_range(2..=4);
    let ch = ChannelTaps::new(
        n_rx,
        n_tx,
        (0..n_taps).map(|l| {
            let s = (-(l as f64) * 0.7).exp().sqrt() * 0.7;
            (l, CMat::from_fn(n_rx, n_tx, |_, _| C::new(rng.normal(), rng.normal()) * s))
        }),
    )
    .unwrap();
    let mut support = ch.support();
    support.shuffle(rng);
    let k = rng.gen_range(1..support.len());
    let mut dominant = support[..k].to_vec();
    dominant.sort_unstable();
    let sigma2 = 10f64.powf(rng.gen_range(-1.0..0.5));
    let q = Quantizer::uniform(rng.gen_range(1..=3)).unwrap();
    (ch, dominant, sigma2, q)
}

#[test]
fn closed_form_matches_sampled_definition() {
    let mut rng = RngStream::new(300, 0);
    for i in 0..5 {
        let (ch, dom, s2, q) = random_instance(&mut rng);
        let closed = nmse(&dom, &ch, s2, &q).unwrap();
        let mut mc_rng = RngStream::new(301, i);
        let mc = nmse_monte_carlo(&ch, &dom, s2, &q, 200_000, &mut mc_rng);
        assert!((closed - mc).abs() <= 0.02 * closed, "closed {closed} vs sampled {mc}");
    }
}

fn scalar_channel(powers: &[f64]) -> ChannelTaps<f64> {
    ChannelTaps::new(1, 1, powers.iter().enumerate().map(|(l, &p)| (l, CMat::from_vec(1, 1, vec![C::new(p.sqrt(), 0.0)]).unwrap()))).unwrap()
}

#[test]
fn two_strong_taps_are_selected() {
    let ch = scalar_channel(&[1.0, 0.5, 1e-4, 1e-4]);
    for bits in [1, 2, 3] {
        let q = Quantizer::uniform(bits).unwrap();
        let sel = select_dominant_taps(&ch, 0.1, &q, 0.1, 2).unwrap();
        assert_eq!(sel.dominant, vec![0, 1]);
        assert_eq!(sel.weak, vec![2, 3]);
        let none = select_dominant_taps(&ch, 0.1, &q, f64::INFINITY, 2).unwrap();
        assert!(none.dominant.is_empty());
        for d_max in [4, 7] {
            let all = select_dominant_taps(&ch, 0.1, &q, 0.0, d_max).unwrap();
            assert_eq!(all.dominant, vec![0, 1, 2, 3]);
        }
    }
}

#[test]
fn greedy_nmse_strictly_decreases() {
    let mut rng = RngStream::new(302, 0);
    for _ in 0..30 {
        let (ch, _, s2, q) = random_instance(&mut rng);
        let sel = select_dominant_taps(&ch, s2, &q, 0.0, 10).unwrap();
        let mut prev = sel.initial_nmse;
        for step in &sel.steps {
            assert!(step.nmse < prev, "{} !< {prev}", step.nmse);
            prev = step.nmse;
        }
        assert_eq!(sel.final_nmse(), 0.0);
    }
}
