// SPDX-License-Identifier: MIT

pub mod algebra;
pub mod converge;
pub mod maxnet;
pub mod mlfp_equiv;
pub mod size_report;
pub mod stability;

use qnet::mlfp::{stream, ThetaKey};
use qnet::{Activation, Ann, Csr, Layer};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// Independent stream for case `case` of suite `tag`, derived from the master seed.
pub(crate) fn case_rng(seed: u64, tag: i64, case: usize) -> ChaCha20Rng {
    stream(seed, &ThetaKey::new(vec![tag, case as i64]))
}

pub(crate) fn rand_net<R: Rng>(rng: &mut R, dims: &[usize]) -> Ann {
    let layers = dims
        .windows(2)
        .map(|w| {
            let scale = 1.0 / (w[0] as f64).sqrt();
            let v: Vec<f64> = (0..w[0] * w[1]).map(|_| rng.random_range(-scale..scale)).collect();
            let b = (0..w[1]).map(|_| rng.random_range(-0.5..0.5)).collect();
            Layer::new(Csr::from_dense(w[1], w[0], &v), b).expect("dimensions match")
        })
        .collect();
    Ann::new(layers).expect("consecutive layers match")
}

/// Descriptor with the given ends, `depth` layers and hidden widths in `1..=max_width`.
pub(crate) fn rand_dims<R: Rng>(
    rng: &mut R,
    input: usize,
    output: usize,
    depth: usize,
    max_width: usize,
) -> Vec<usize> {
    let mut d = vec![input];
    d.extend((1..depth).map(|_| rng.random_range(1..=max_width)));
    d.push(output);
    d
}

pub(crate) fn rand_act<R: Rng>(rng: &mut R) -> Activation {
    match rng.random_range(0..3) {
        0 => Activation::Softplus,
        1 => Activation::LeakyRelu { beta: rng.random_range(0.0..0.9) },
        _ => Activation::LeakyRelu { beta: rng.random_range(1.1..2.0) },
    }
}

pub(crate) fn rand_vec<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

/// `max_i |a_i − b_i| / max(1, ‖b‖∞)`.
pub(crate) fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
