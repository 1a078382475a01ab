//! Independent re-implementations used as oracles. Nothing here calls the
//! library's numeric code.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

pub fn ncfsk_ber(gamma_db: f64) -> f64 {
    0.5 * (-(10f64.powf(gamma_db / 10.0)) / 2.0).exp()
}

/// Fraction of `frames` frames of `f` bits with no bit error, each bit
/// failing independently with the NCFSK bit error rate.
pub fn bit_level_prr(gamma_db: f64, f: u32, frames: usize, seed: u64) -> (f64, f64) {
    let beta = ncfsk_ber(gamma_db);
    let mut r = rng(seed);
    let mut ok = 0usize;
    for _ in 0..frames {
        if (0..f).all(|_| !r.random_bool(beta)) {
            ok += 1;
        }
    }
    let p = ok as f64 / frames as f64;
    (p, (p * (1.0 - p) / frames as f64).sqrt())
}

/// Brute-force mean PRR at distance `d` by sampling the total SNR spread.
#[allow(clippy::too_many_arguments)]
pub fn mc_expected_prr(
    d: f64,
    pl_d0: f64,
    eta: f64,
    pt: f64,
    pn: f64,
    sigma_t: f64,
    f: u32,
    n: usize,
    seed: u64,
) -> (f64, f64) {
    let mu = pt - (pl_d0 + 10.0 * eta * d.log10()) - pn;
    let dist = Normal::new(mu, sigma_t).unwrap();
    let mut r = rng(seed);
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            let g = dist.sample(&mut r);
            (1.0 - ncfsk_ber(g)).powf(f as f64)
        })
        .collect();
    mean_se(&xs)
}

pub fn shannon(p: &[f64], base: f64) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h -= x * x.log(base);
        }
    }
    h
}

pub fn node_entropy(a: &[f64]) -> f64 {
    if a.len() == 1 {
        return 0.0;
    }
    let s: f64 = a.iter().sum();
    let p: Vec<f64> = a.iter().map(|x| x / s).collect();
    shannon(&p, std::f64::consts::E) / (a.len() as f64).ln()
}

pub fn rs1(h: &[f64]) -> f64 {
    h.iter().fold(1.0, |acc, x| acc * x)
}

pub fn rs2(h: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in h {
        s -= x.ln();
    }
    s
}

/// `(1/N)·Σ k·p·ln p`.
pub fn spatiotemporal(pk: &[(f64, f64)]) -> f64 {
    let mut s = 0.0;
    for &(p, k) in pk {
        if p > 0.0 {
            s += k * p * p.ln();
        }
    }
    s / pk.len() as f64
}

/// Mean Euclidean norm of `v_m − v_n`.
pub fn speed(vm: &[[f64; 2]], vn: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for i in 0..vm.len() {
        let dx = vm[i][0] - vn[i][0];
        let dy = vm[i][1] - vn[i][1];
        s += (dx * dx + dy * dy).sqrt();
    }
    s / vm.len() as f64
}

/// `(1/(N·R))·Σ |Δp + Δv·dt|`.
pub fn mobility(pm: &[[f64; 2]], pn: &[[f64; 2]], vm: &[[f64; 2]], vn: &[[f64; 2]], dt: &[f64], range: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..pm.len() {
        let x = (pm[i][0] - pn[i][0]) + (vm[i][0] - vn[i][0]) * dt[i];
        let y = (pm[i][1] - pn[i][1]) + (vm[i][1] - vn[i][1]) * dt[i];
        s += (x * x + y * y).sqrt();
    }
    s / (pm.len() as f64 * range)
}

/// Random probability vector of length `n` with occasional exact zeros.
pub fn random_simplex<R: Rng>(r: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.15) { 0.0 } else { r.random::<f64>() })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Unbiased sample covariance of paired values.
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0)
}

/// Truncated-geometric mean by direct summation over outcomes.
pub fn truncated_geometric_mean(p: f64, max_retx: u32, fail: u32) -> f64 {
    let q = 1.0 - p;
    let mut m = 0.0;
    for k in 1..=max_retx {
        m += k as f64 * p * q.powi(k as i32 - 1);
    }
    m + fail as f64 * q.powi(max_retx as i32)
}
