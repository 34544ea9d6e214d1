// SPDX-License-Identifier: MIT

//! Randomized small instances and nonlinearities with known constants.

use rand::Rng;

use super::kernel::{DiscreteKernelInstance, Nonlinearity};

fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut row: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random::<f64>() }).collect();
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|v| *v /= s);
            let fix: f64 = 1.0 - row.iter().sum::<f64>();
            let k = row.iter().position(|v| *v > 0.0).unwrap();
            row[k] += fix;
            return row;
        }
    }
}

/// Instance with 2..=6 states in `[0, 3]^d`, 1..=3 actions and weights in `[0.5, 2]`.
pub fn random_instance<R: Rng>(rng: &mut R, d: usize) -> DiscreteKernelInstance {
    let n = rng.random_range(2..=6);
    let actions = rng.random_range(1..=3);
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(n);
    while states.len() < n {
        let s: Vec<f64> = (0..d).map(|_| (rng.random_range(0.0..3.0f64) * 8.0).round() / 8.0).collect();
        if !states.contains(&s) {
            states.push(s);
        }
    }
    let transition = (0..actions).map(|_| (0..n).map(|_| random_row(rng, n)).collect()).collect();
    let weight = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    DiscreteKernelInstance::new(states, transition, weight).expect("generated instance is valid")
}

/// Same states and weights, each row mixed with a fresh random row by weight `eps`.
pub fn perturb_kernels<R: Rng>(rng: &mut R, inst: &DiscreteKernelInstance, eps: f64) -> DiscreteKernelInstance {
    let n = inst.n_states();
    let transition = inst
        .transition()
        .iter()
        .map(|p| {
            p.iter()
                .map(|row| {
                    let other = random_row(rng, n);
                    let mut mixed: Vec<f64> = row.iter().zip(&other).map(|(a, b)| (1.0 - eps) * a + eps * b).collect();
                    let fix = 1.0 - mixed.iter().sum::<f64>();
                    let k = mixed.iter().position(|v| *v > 0.0).unwrap();
                    mixed[k] += fix;
                    mixed
                })
                .collect()
        })
        .collect();
    DiscreteKernelInstance::new(inst.states().to_vec(), transition, inst.weight().to_vec())
        .expect("perturbed instance is valid")
}

/// Parameters of `f(x, r) = h_0 + h_1 sin(b·x) + λ (θ max_a r_a + (1 − θ) Σ_a π_a r_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableParams {
    pub h0: f64,
    pub h1: f64,
    pub b: Vec<f64>,
    pub lambda: f64,
    pub theta: f64,
    pub pi: Vec<f64>,
}

impl SeparableParams {
    pub fn random<R: Rng>(rng: &mut R, d: usize, actions: usize, lambda: f64) -> Self {
        let pi = random_row(rng, actions);
        SeparableParams {
            h0: rng.random_range(-1.0..1.0),
            h1: rng.random_range(-1.0..1.0),
            b: (0..d).map(|_| rng.random_range(-1.5..1.5)).collect(),
            lambda,
            theta: rng.random::<f64>(),
            pi,
        }
    }

    /// Small perturbation of every parameter; `lambda` is replaced.
    pub fn nudge<R: Rng>(&self, rng: &mut R, scale: f64, lambda: f64) -> Self {
        let mut p = self.clone();
        p.h0 += scale * rng.random_range(-1.0..1.0);
        p.h1 += scale * rng.random_range(-1.0..1.0);
        p.b.iter_mut().for_each(|v| *v += scale * rng.random_range(-1.0..1.0));
        p.theta = (p.theta + scale * rng.random_range(-1.0..1.0)).clamp(0.0, 1.0);
        p.lambda = lambda;
        p
    }

    /// The nonlinearity with claimed constants `L = λ` and `K = |h_1| ‖b‖`.
    pub fn build(&self) -> Nonlinearity {
        let p = self.clone();
        let k = p.h1.abs() * p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        Nonlinearity::new(p.lambda, k, move |x, r| {
            let bx: f64 = p.b.iter().zip(x).map(|(a, b)| a * b).sum();
            let mx = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let avg: f64 = p.pi.iter().zip(r).map(|(a, b)| a * b).sum();
            p.h0 + p.h1 * bx.sin() + p.lambda * (p.theta * mx + (1.0 - p.theta) * avg)
        })
    }
}
