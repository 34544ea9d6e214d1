// SPDX-License-Identifier: MIT

use qnet::maxnet::max_net;
use qnet::Activation;
use rayon::prelude::*;

use super::{case_rng, rand_vec};
use crate::suite::{fmt_f, RunConfig, Suite, Table};

pub const TOL: f64 = 1e-9;

pub struct MaxnetSuite;

pub struct MaxRow {
    pub m: usize,
    pub depth: usize,
    pub width: usize,
    pub samples: usize,
    pub max_err: f64,
}

impl MaxRow {
    pub fn depth_expected(&self) -> usize {
        self.m.next_power_of_two().trailing_zeros() as usize + 1
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.depth == self.depth_expected() && self.width <= 2 * self.m && self.max_err <= tol
    }
}

/// Architecture of `Ψ_m` and, when `samples > 0`, its worst error against `max` on random inputs.
pub fn check_m(seed: u64, m: usize, beta: f64, samples: usize) -> anyhow::Result<MaxRow> {
    let net = max_net(m, beta)?;
    let act = Activation::LeakyRelu { beta };
    let mut rng = case_rng(seed, 200, m);
    let mut max_err: f64 = 0.0;
    for _ in 0..samples {
        let x = rand_vec(&mut rng, m, 10.0);
        let want = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max_err = max_err.max((net.realize(&act, &x)?[0] - want).abs());
    }
    Ok(MaxRow { m, depth: net.depth(), width: net.describe().max_width(), samples, max_err })
}

impl Suite for MaxnetSuite {
    fn name(&self) -> &'static str {
        "maxnet-suite"
    }

    fn about(&self) -> &'static str {
        "exactness, depth and width of the maximum networks"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let samples = cfg.cases.unwrap_or(10_000);
        let tol = cfg.tol.unwrap_or(TOL);
        let rows = (2..=256usize)
            .into_par_iter()
            .map(|m| check_m(cfg.seed, m, cfg.beta, if m <= 64 { samples } else { 0 }))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let mut t =
            Table::new(&["m", "beta", "depth", "depth_expected", "width", "width_bound", "samples", "max_err", "pass"]);
        for r in &rows {
            t.push(
                vec![
                    r.m.to_string(),
                    fmt_f(cfg.beta),
                    r.depth.to_string(),
                    r.depth_expected().to_string(),
                    r.width.to_string(),
                    (2 * r.m).to_string(),
                    r.samples.to_string(),
                    fmt_f(r.max_err),
                ],
                r.pass(tol),
            );
        }
        Ok(t)
    }
}
