// SPDX-License-Identifier: MIT

//! Stability inequalities on random finite instances, and Wasserstein-1 checks.

use qnet::fixed_point::random::{perturb_kernels, random_instance, SeparableParams};
use qnet::fixed_point::{
    check_combined, check_kernel_stability, check_nonlinearity_stability, check_solution_lipschitz, w1_1d, w1_discrete,
    w1_lp, BoundReport, DiscreteMeasure, SLACK,
};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::case_rng;
use crate::suite::{fmt_f, RunConfig, Suite, Table};

pub const W1_TOL: f64 = 1e-9;

pub struct StabilitySuite;

/// The four stability reports for random instance `case`.
pub fn instance_reports(seed: u64, case: usize) -> anyhow::Result<[(&'static str, BoundReport); 4]> {
    let mut rng = case_rng(seed, 300, case);
    let d = rng.random_range(1..=2);
    let inst1 = random_instance(&mut rng, d);
    let eps = rng.random_range(0.01..0.3);
    let inst2 = perturb_kernels(&mut rng, &inst1, eps);
    let spread =
        [inst1.contraction_c(), inst2.contraction_c(), inst1.kernel_lipschitz()?, inst2.kernel_lipschitz()?, 1.0]
            .into_iter()
            .fold(0.0, f64::max);
    let lam = rng.random_range(0.1..0.8) / spread;
    let p1 = SeparableParams::random(&mut rng, d, inst1.n_actions(), lam);
    let lam2 = lam * rng.random_range(0.5..1.0);
    let p2 = p1.nudge(&mut rng, 0.1, lam2);
    let (f1, f2) = (p1.build(), p2.build());
    Ok([
        ("nonlinearity", check_nonlinearity_stability(&inst1, &f1, &f2)?),
        ("kernel", check_kernel_stability(&inst1, &inst2, &f1)?.kernel),
        ("combined", check_combined(&inst1, &inst2, &f1, &f2)?),
        ("solution-lipschitz", check_solution_lipschitz(&inst1, &f1)?),
    ])
}

fn rand_measure(rng: &mut ChaCha20Rng, dim: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=8);
    // Grid points make atoms shared between measures likely, which exercises degenerate transport.
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
    while pts.len() < n {
        let x: Vec<f64> = (0..dim)
            .map(|_| if rng.random_bool(0.5) { rng.random_range(-4..=4) as f64 } else { rng.random_range(-4.0..4.0) })
            .collect();
        if !pts.contains(&x) {
            pts.push(x);
        }
    }
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / s).collect();
    let fix = 1.0 - p.iter().sum::<f64>();
    p[0] += fix;
    DiscreteMeasure::from_weights(&pts, &p).expect("weights are positive and normalized")
}

/// `|W1_fast − W1_lp|` for a random pair of 1-D measures.
pub fn w1_fastpath_gap(seed: u64, case: usize) -> anyhow::Result<f64> {
    let mut rng = case_rng(seed, 301, case);
    let (mu, nu) = (rand_measure(&mut rng, 1), rand_measure(&mut rng, 1));
    Ok((w1_1d(&mu, &nu)? - w1_lp(&mu, &nu)?).abs())
}

/// Largest violation of the metric axioms on a random triple.
pub fn w1_metric_violation(seed: u64, case: usize) -> anyhow::Result<f64> {
    let mut rng = case_rng(seed, 302, case);
    let dim = rng.random_range(1..=3);
    let (a, b, c) = (rand_measure(&mut rng, dim), rand_measure(&mut rng, dim), rand_measure(&mut rng, dim));
    let w = |p: &DiscreteMeasure, q: &DiscreteMeasure| w1_discrete(p, q);
    let (ab, ba, bc, ac, aa) = (w(&a, &b)?, w(&b, &a)?, w(&b, &c)?, w(&a, &c)?, w(&a, &a)?);
    let v = [aa.abs(), (ab - ba).abs(), ac - ab - bc, -ab, -ac, -bc].into_iter().fold(0.0, f64::max);
    Ok(v)
}

impl Suite for StabilitySuite {
    fn name(&self) -> &'static str {
        "stability-suite"
    }

    fn about(&self) -> &'static str {
        "stability and Lipschitz inequalities on random instances, and W1 correctness"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let n = cfg.cases.unwrap_or(50);
        let mut t = Table::new(&["check", "case", "lhs", "rhs", "slack", "c", "l", "k", "eta", "pass"]);
        let reports =
            (0..n).into_par_iter().map(|c| instance_reports(cfg.seed, c)).collect::<anyhow::Result<Vec<_>>>()?;
        for kind in 0..4 {
            for (case, r) in reports.iter().enumerate() {
                let (name, rep) = r[kind];
                let k = rep.constants;
                t.push(
                    vec![
                        name.to_string(),
                        case.to_string(),
                        fmt_f(rep.lhs),
                        fmt_f(rep.rhs),
                        fmt_f(rep.slack()),
                        fmt_f(k.c),
                        fmt_f(k.l),
                        fmt_f(k.k),
                        fmt_f(k.eta),
                    ],
                    rep.slack() >= -SLACK,
                );
            }
        }
        let tol = cfg.tol.unwrap_or(W1_TOL);
        let gaps =
            (0..500).into_par_iter().map(|c| w1_fastpath_gap(cfg.seed, c)).collect::<anyhow::Result<Vec<_>>>()?;
        let viol =
            (0..200).into_par_iter().map(|c| w1_metric_violation(cfg.seed, c)).collect::<anyhow::Result<Vec<_>>>()?;
        for (name, vals) in [("w1-fastpath", &gaps), ("w1-metric", &viol)] {
            for (case, v) in vals.iter().enumerate() {
                let blank = String::new();
                t.push(
                    vec![
                        name.to_string(),
                        case.to_string(),
                        fmt_f(*v),
                        fmt_f(tol),
                        fmt_f(tol - v),
                        blank.clone(),
                        blank.clone(),
                        blank.clone(),
                        blank,
                    ],
                    *v <= tol,
                );
            }
        }
        Ok(t)
    }
}
