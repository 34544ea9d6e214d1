// SPDX-License-Identifier: MIT

//! Seed-averaged L² error of Q-networks against Q-value iteration.

use std::collections::BTreeMap;

use qnet::bellman::{build_q_net, estimate_l2_error, grid16, oracle_q, uniform_on_grid, MdpModel, RewardNet};
use qnet::mlfp::{MlfpSchedule, ThetaKey};
use rayon::prelude::*;
use serde_json::json;

use crate::io::import_model;
use crate::suite::{fmt_f, RunConfig, Suite, Table};

pub struct ConvergeSuite;

/// Mean and standard error of the per-seed max-norm errors at one level.
#[derive(Clone, Copy, Debug)]
pub struct LevelStats {
    pub mean: f64,
    pub se: f64,
}

pub fn level_stats(errs: &[f64]) -> LevelStats {
    let k = errs.len() as f64;
    let mean = errs.iter().sum::<f64>() / k;
    let var = if errs.len() > 1 { errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    LevelStats { mean, se: (var / k).sqrt() }
}

/// `mean(n+1) ≤ mean(n) + 2 max(se)` for consecutive levels.
pub fn non_increasing(stats: &[LevelStats]) -> bool {
    stats.windows(2).all(|w| w[1].mean <= w[0].mean + 2.0 * w[0].se.max(w[1].se))
}

fn load(cfg: &RunConfig) -> anyhow::Result<(MdpModel, RewardNet)> {
    Ok(match &cfg.instance {
        Some(p) => import_model(p)?,
        None => grid16(cfg.beta)?,
    })
}

impl Suite for ConvergeSuite {
    fn name(&self) -> &'static str {
        "converge"
    }

    fn about(&self) -> &'static str {
        "L² error of Q-networks against the value-iteration oracle, per level and seed"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let (model, g) = load(cfg)?;
        let m = cfg.budget.unwrap_or(4);
        let seeds = cfg.cases.unwrap_or(10);
        let oracle = oracle_q(&model, cfg.tol.unwrap_or(1e-12))?;
        let mu = uniform_on_grid(&model)?;
        let mut t = Table::new(&["level", "seed", "rmse", "rmse_euclid"]);
        let mut stats = Vec::new();
        let mut summary = BTreeMap::new();
        for n in cfg.levels_or(1..=4) {
            let sched = MlfpSchedule::manual(m, n)?;
            // Seed k uses the sample index (k): one master stream, disjoint index trees.
            let errs = (1..=seeds)
                .into_par_iter()
                .map(|k| {
                    let rep = build_q_net(&model, &g, &sched, cfg.seed, &ThetaKey::new(vec![k as i64]))?;
                    Ok(estimate_l2_error(&rep.net, &model, &oracle.q, &mu)?)
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            for (k, e) in errs.iter().enumerate() {
                t.row(vec![n.to_string(), (k + 1).to_string(), fmt_f(e.max_norm), fmt_f(e.euclid)]);
            }
            let s = level_stats(&errs.iter().map(|e| e.max_norm).collect::<Vec<_>>());
            summary.insert(n.to_string(), json!({"mean": s.mean, "se": s.se}));
            stats.push(s);
        }
        t.note("levels", json!(summary));
        t.note("budget", json!(m));
        t.note("oracle_iterations", json!(oracle.iterations));
        t.assert("non_increasing_within_2se", non_increasing(&stats));
        Ok(t)
    }
}
