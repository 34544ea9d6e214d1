// SPDX-License-Identifier: MIT

use super::kernel::{DiscreteKernelInstance, Nonlinearity, ValueTable};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct PicardOutcome {
    pub u: ValueTable,
    pub iterations: usize,
    /// Weighted-sup norms of successive updates `u_{k+1} − u_k`.
    pub updates: Vec<f64>,
    /// `c · L` used for the stopping rule.
    pub factor: f64,
}

/// One application of `u ↦ (x, a) ↦ Σ_y κ^a(x,y) f(y, u(y))`.
pub fn apply_operator(inst: &DiscreteKernelInstance, f: &Nonlinearity, u: &ValueTable) -> ValueTable {
    let fy: Vec<f64> = inst.states().iter().zip(u).map(|(y, uy)| f.eval(y, uy)).collect();
    (0..inst.n_states())
        .map(|x| {
            (0..inst.n_actions()).map(|a| inst.transition()[a][x].iter().zip(&fy).map(|(p, v)| p * v).sum()).collect()
        })
        .collect()
}

/// Weighted-sup residual of the fixed-point equation.
pub fn residual(inst: &DiscreteKernelInstance, f: &Nonlinearity, u: &ValueTable) -> f64 {
    let tu = apply_operator(inst, f, u);
    let diff: ValueTable = u.iter().zip(&tu).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect()).collect();
    inst.weighted_sup(&diff)
}

/// Picard iteration from `u_0 = 0`, stopped once the update is at most `tol (1 − cL) / (cL)`.
pub fn picard_solve(inst: &DiscreteKernelInstance, f: &Nonlinearity, tol: f64) -> Result<PicardOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let factor = inst.contraction_c() * f.lipschitz_in_values;
    if factor >= 1.0 {
        return Err(Error::NoContraction(format!("c·L = {factor} >= 1")));
    }
    let stop = if factor == 0.0 { f64::INFINITY } else { tol * (1.0 - factor) / factor };
    let mut u = vec![vec![0.0; inst.n_actions()]; inst.n_states()];
    let mut updates = Vec::new();
    for it in 1..=MAX_ITERATIONS {
        let next = apply_operator(inst, f, &u);
        let diff: ValueTable =
            next.iter().zip(&u).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect()).collect();
        let delta = inst.weighted_sup(&diff);
        updates.push(delta);
        u = next;
        if delta <= stop {
            return Ok(PicardOutcome { u, iterations: it, updates, factor });
        }
    }
    Err(Error::NoContraction("Picard iteration did not settle".into()))
}
