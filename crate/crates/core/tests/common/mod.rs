#![allow(dead_code)]

use qdeconv_core::rng::{stream_rng, ChaCha8Rng};
use qdeconv_core::Pmf;
use rand::Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0xfeed)
}

/// Random PMF with entries bounded away from zero.
pub fn interior_pmf(rng: &mut ChaCha8Rng, len: usize) -> Pmf {
    let w: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..1.0)).collect();
    Pmf::from_weights(w).unwrap()
}

/// Random PMF that may contain exact zeros.
pub fn sparse_pmf(rng: &mut ChaCha8Rng, len: usize) -> Pmf {
    loop {
        let w: Vec<f64> = (0..len)
            .map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random::<f64>() })
            .collect();
        if w.iter().any(|&x| x > 0.0) {
            return Pmf::from_weights(w).unwrap();
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Brute-force double loop over all index pairs.
pub fn brute_convolve(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for i in 0..out.len() {
        for u in 0..p.len() {
            if i >= u && i - u < q.len() {
                out[i] += p[u] * q[i - u];
            }
        }
    }
    out
}
