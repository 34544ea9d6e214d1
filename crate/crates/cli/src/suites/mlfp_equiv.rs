// SPDX-License-Identifier: MIT

//! Compiled MLFP networks against the direct recursion, with architecture
//! invariance across sample indices and the closed-form size bounds.

use qnet::calculus::identity_net;
use qnet::mlfp::{
    build_mlfp_net, mlfp_evaluate, size_bounds, stream, MlfpSchedule, NoiseLaw, RandomFieldSpec, ThetaKey,
};
use qnet::{Activation, Ann};
use rand::Rng;

use super::{rand_net, rand_vec};
use crate::suite::{fmt_f, RunConfig, Suite, Table};

pub const TOL: f64 = 1e-9;
pub const STATES: usize = 100;
pub const THETA_PAIRS: usize = 20;
/// Above this many `F` copies a configuration uses fewer index pairs.
pub const HEAVY_COPIES: u128 = 2_000;
pub const HEAVY_PAIRS: usize = 2;

pub struct MlfpEquivSuite;

#[derive(Clone, Debug)]
pub struct EquivRow {
    pub d: usize,
    pub actions: usize,
    pub m: u64,
    pub n: usize,
    pub max_err: f64,
    pub theta_pairs: usize,
    pub theta_invariant: bool,
    pub depth: usize,
    pub width: usize,
    pub params: u64,
    pub depth_bound: u128,
    pub width_bound: u128,
    pub params_bound: u128,
}

impl EquivRow {
    pub fn equivalent(&self, tol: f64) -> bool {
        self.max_err <= tol
    }

    pub fn within_bounds(&self) -> bool {
        self.depth as u128 <= self.depth_bound
            && self.width as u128 <= self.width_bound
            && self.params as u128 <= self.params_bound
    }
}

fn rand_theta<R: Rng>(rng: &mut R) -> ThetaKey {
    let len = rng.random_range(1..=3);
    ThetaKey::new((0..len).map(|_| rng.random_range(-50..50)).collect())
}

/// One configuration: random field and `F`, compiled at random indices.
pub fn run_config(
    seed: u64,
    beta: f64,
    d: usize,
    actions: usize,
    m: u64,
    n: usize,
    pairs: usize,
) -> anyhow::Result<EquivRow> {
    let mut rng = stream(seed, &ThetaKey::new(vec![400, d as i64, actions as i64, m as i64, n as i64]));
    let act = Activation::leaky_relu(beta)?;
    let hidden = rng.random_range(2..=4);
    let transitions: Vec<Ann> = (0..actions).map(|_| rand_net(&mut rng, &[2 * d, hidden, d])).collect();
    let field = RandomFieldSpec::new(rng.random(), transitions, NoiseLaw::Uniform { dim: d, lo: -1.0, hi: 1.0 }, act)?;
    let f_hidden = rng.random_range(2..=5);
    let f_net = rand_net(&mut rng, &[d + actions, f_hidden, 1]);
    let id1 = identity_net(1, act)?;
    let sched = MlfpSchedule::manual(m, n)?;
    let theta = rand_theta(&mut rng);
    let net = build_mlfp_net(&field, &f_net, &id1, &sched, &theta)?;
    let f = |y: &[f64], r: &[f64]| f_net.realize(&act, &[y, r].concat()).expect("F input length")[0];
    let mut max_err: f64 = 0.0;
    for _ in 0..STATES {
        let x = rand_vec(&mut rng, d, 2.0);
        let direct = mlfp_evaluate(&field, &f, &sched, &theta, &x)?;
        let compiled = net.realize(&act, &x)?;
        for (p, q) in direct.iter().zip(&compiled) {
            max_err = max_err.max((p - q).abs() / (1.0 + p.abs()));
        }
    }
    let arch = net.describe();
    let mut theta_invariant = true;
    for _ in 0..pairs {
        let (t1, t2) = (rand_theta(&mut rng), rand_theta(&mut rng));
        let a1 = build_mlfp_net(&field, &f_net, &id1, &sched, &t1)?.describe();
        let a2 = build_mlfp_net(&field, &f_net, &id1, &sched, &t2)?.describe();
        theta_invariant &= a1 == a2 && a1 == arch;
    }
    let b = size_bounds(&f_net.describe(), &field.transitions()[0].describe(), d, actions, m, n)
        .ok_or_else(|| anyhow::anyhow!("size bound overflows u128"))?;
    Ok(EquivRow {
        d,
        actions,
        m,
        n,
        max_err,
        theta_pairs: pairs,
        theta_invariant,
        depth: arch.depth(),
        width: arch.max_width(),
        params: arch.param_count(),
        depth_bound: b.depth,
        width_bound: b.width,
        params_bound: b.params,
    })
}

/// θ pairs to check for a configuration, reduced for the largest ones.
pub fn pairs_for(actions: usize, m: u64, n: usize) -> usize {
    match qnet::mlfp::f_copy_count(actions, m, n) {
        Some(c) if c * actions as u128 <= HEAVY_COPIES => THETA_PAIRS,
        _ => HEAVY_PAIRS,
    }
}

impl Suite for MlfpEquivSuite {
    fn name(&self) -> &'static str {
        "mlfp-equiv"
    }

    fn about(&self) -> &'static str {
        "compiled MLFP nets vs the direct recursion, index invariance and size bounds"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let tol = cfg.tol.unwrap_or(TOL);
        let max_m = cfg.budget.unwrap_or(3);
        let levels = cfg.levels_or(0..=4);
        let mut t = Table::new(&[
            "d",
            "actions",
            "m",
            "n",
            "states",
            "max_rel_err",
            "theta_pairs",
            "theta_invariant",
            "depth",
            "depth_bound",
            "width",
            "width_bound",
            "params",
            "params_bound",
            "pass",
        ]);
        for d in 1..=5 {
            for actions in 1..=3 {
                for m in 2..=max_m {
                    for n in levels.clone() {
                        let r = run_config(cfg.seed, cfg.beta, d, actions, m, n, pairs_for(actions, m, n))?;
                        let pass = r.equivalent(tol) && r.theta_invariant && r.within_bounds();
                        t.push(
                            vec![
                                d.to_string(),
                                actions.to_string(),
                                m.to_string(),
                                n.to_string(),
                                STATES.to_string(),
                                fmt_f(r.max_err),
                                r.theta_pairs.to_string(),
                                r.theta_invariant.to_string(),
                                r.depth.to_string(),
                                r.depth_bound.to_string(),
                                r.width.to_string(),
                                r.width_bound.to_string(),
                                r.params.to_string(),
                                r.params_bound.to_string(),
                            ],
                            pass,
                        );
                    }
                }
            }
        }
        Ok(t)
    }
}
