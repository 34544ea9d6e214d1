// SPDX-License-Identifier: MIT

//! Numerical verification of the stability and Lipschitz inequalities on finite instances.

use super::kernel::{probe_set, DiscreteKernelInstance, Nonlinearity, ValueTable};
use super::measure::euclid;
use super::picard::picard_solve;
use crate::error::{Error, Result};

pub const SLACK: f64 = 1e-9;
const PICARD_TOL: f64 = 1e-12;

/// Constants established by enumeration over the instance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub l: f64,
    pub k: f64,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub constants: Constants,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64, constants: Constants) -> Self {
        BoundReport { lhs, rhs, pass: lhs <= rhs + SLACK, constants }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn table_diff(u: &ValueTable, v: &ValueTable) -> ValueTable {
    u.iter().zip(v).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a - b).collect()).collect()
}

/// `sup_{y, r ∈ probes} |f_1(y,r) − f_2(y,r)| / w(y)`.
fn nonlinearity_gap(inst: &DiscreteKernelInstance, f1: &Nonlinearity, f2: &Nonlinearity, probes: &[Vec<f64>]) -> f64 {
    let mut g: f64 = 0.0;
    for (y, w) in inst.states().iter().zip(inst.weight()) {
        for r in probes {
            g = g.max((f1.eval(y, r) - f2.eval(y, r)).abs() / w);
        }
    }
    g
}

/// Enumerated value-Lipschitz constant, rejecting a claimed constant that is violated.
fn value_lipschitz(f: &Nonlinearity, states: &[Vec<f64>], probes: &[Vec<f64>]) -> Result<f64> {
    let l = f.enumerate_value_lipschitz(states, probes);
    if l > f.lipschitz_in_values * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Domain(format!("claimed L = {} but enumeration gives {l}", f.lipschitz_in_values)));
    }
    Ok(l)
}

fn state_lipschitz(f: &Nonlinearity, states: &[Vec<f64>], probes: &[Vec<f64>]) -> Result<f64> {
    let k = f.enumerate_state_lipschitz(states, probes);
    if k > f.lipschitz_in_state * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Domain(format!("claimed K = {} but enumeration gives {k}", f.lipschitz_in_state)));
    }
    Ok(k)
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::NoContraction(what.to_string()))
    }
}

/// Same kernel, two nonlinearities: `sup|u_1 − u_2|/w ≤ c/(1 − c min{L_1,L_2}) · sup|f_1 − f_2|/w`.
pub fn check_nonlinearity_stability(
    inst: &DiscreteKernelInstance,
    f1: &Nonlinearity,
    f2: &Nonlinearity,
) -> Result<BoundReport> {
    let c = inst.contraction_c();
    require(c * f1.lipschitz_in_values < 1.0 && c * f2.lipschitz_in_values < 1.0, "c·L_i < 1 violated")?;
    let u1 = picard_solve(inst, f1, PICARD_TOL)?.u;
    let u2 = picard_solve(inst, f2, PICARD_TOL)?.u;
    let probes = probe_set(inst.n_actions(), &[&u1, &u2]);
    let l1 = value_lipschitz(f1, inst.states(), &probes)?;
    let l2 = value_lipschitz(f2, inst.states(), &probes)?;
    let l = l1.min(l2);
    let lhs = inst.weighted_sup(&table_diff(&u1, &u2));
    let rhs = c / (1.0 - c * l) * nonlinearity_gap(inst, f1, f2, &probes);
    Ok(BoundReport::new(lhs, rhs, Constants { c, l, k: 0.0, eta: 0.0 }))
}

/// `|u(x)(a) − u(y)(a)| ≤ ηK/(1 − ηL) ‖x − y‖` for all state pairs; reports the tightest pair.
pub fn check_solution_lipschitz(inst: &DiscreteKernelInstance, f: &Nonlinearity) -> Result<BoundReport> {
    let c = inst.contraction_c();
    let eta = inst.kernel_lipschitz()?;
    require(c * f.lipschitz_in_values < 1.0, "c·L < 1 violated")?;
    let u = picard_solve(inst, f, PICARD_TOL)?.u;
    let probes = probe_set(inst.n_actions(), &[&u]);
    let l = value_lipschitz(f, inst.states(), &probes)?;
    let k = state_lipschitz(f, inst.states(), &probes)?;
    require(eta * l < 1.0, "η·L < 1 violated")?;
    let factor = eta * k / (1.0 - eta * l);
    let constants = Constants { c, l, k, eta };
    let mut worst = BoundReport::new(0.0, 0.0, constants);
    let mut worst_slack = f64::INFINITY;
    let s = inst.states();
    for i in 0..s.len() {
        for j in 0..i {
            let rhs = factor * euclid(&s[i], &s[j]);
            for (ui, uj) in u[i].iter().zip(&u[j]) {
                let lhs = (ui - uj).abs();
                if rhs - lhs < worst_slack {
                    worst_slack = rhs - lhs;
                    worst = BoundReport::new(lhs, rhs, constants);
                }
            }
        }
    }
    Ok(worst)
}

/// Kernel-stability bound and the combined bound for two nonlinearity/kernel pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelReport {
    pub kernel: BoundReport,
    pub combined: BoundReport,
}

/// Same nonlinearity, two kernels:
/// `sup|u_1 − u_2|/w ≤ K/((1 − ηL)(1 − cL)) · sup W1(κ_1, κ_2)/w`, with `η` measured on `inst2`.
pub fn check_kernel_stability(
    inst1: &DiscreteKernelInstance,
    inst2: &DiscreteKernelInstance,
    f: &Nonlinearity,
) -> Result<KernelReport> {
    let kernel = kernel_bound(inst1, inst2, f)?;
    let combined = check_combined(inst1, inst2, f, f)?;
    Ok(KernelReport { kernel, combined })
}

fn kernel_bound(
    inst1: &DiscreteKernelInstance,
    inst2: &DiscreteKernelInstance,
    f: &Nonlinearity,
) -> Result<BoundReport> {
    let c = inst1.contraction_c().max(inst2.contraction_c());
    let eta = inst2.kernel_lipschitz()?;
    require(c * f.lipschitz_in_values < 1.0, "c·L < 1 violated")?;
    let u1 = picard_solve(inst1, f, PICARD_TOL)?.u;
    let u2 = picard_solve(inst2, f, PICARD_TOL)?.u;
    let probes = probe_set(inst1.n_actions(), &[&u1, &u2]);
    let l = value_lipschitz(f, inst1.states(), &probes)?;
    let k = state_lipschitz(f, inst1.states(), &probes)?;
    require(eta * l < 1.0, "η·L < 1 violated")?;
    let gap = inst1.kernel_gap(inst2)?;
    let lhs = inst1.weighted_sup(&table_diff(&u1, &u2));
    let rhs = k / ((1.0 - eta * l) * (1.0 - c * l)) * gap;
    Ok(BoundReport::new(lhs, rhs, Constants { c, l, k, eta }))
}

/// Two nonlinearities and two kernels:
/// `c/(1 − c min{L_1,L_2}) · sup|f_1 − f_2|/w + K/((1 − ηL_2)(1 − cL_2)) · sup W1(κ_1, κ_2)/w`,
/// with `K` from `f2` and `η` from `inst2`.
pub fn check_combined(
    inst1: &DiscreteKernelInstance,
    inst2: &DiscreteKernelInstance,
    f1: &Nonlinearity,
    f2: &Nonlinearity,
) -> Result<BoundReport> {
    let c = inst1.contraction_c().max(inst2.contraction_c());
    let eta = inst2.kernel_lipschitz()?;
    require(c * f1.lipschitz_in_values < 1.0 && c * f2.lipschitz_in_values < 1.0, "c·L_i < 1 violated")?;
    let u1 = picard_solve(inst1, f1, PICARD_TOL)?.u;
    let u2 = picard_solve(inst2, f2, PICARD_TOL)?.u;
    // Intermediate solution (f2, κ1) visited by the triangle inequality.
    let v = picard_solve(inst1, f2, PICARD_TOL)?.u;
    let probes = probe_set(inst1.n_actions(), &[&u1, &u2, &v]);
    let l1 = value_lipschitz(f1, inst1.states(), &probes)?;
    let l2 = value_lipschitz(f2, inst1.states(), &probes)?;
    let k = state_lipschitz(f2, inst1.states(), &probes)?;
    require(eta * l2 < 1.0, "η·L_2 < 1 violated")?;
    let lhs = inst1.weighted_sup(&table_diff(&u1, &u2));
    let rhs = c / (1.0 - c * l1.min(l2)) * nonlinearity_gap(inst1, f1, f2, &probes)
        + k / ((1.0 - eta * l2) * (1.0 - c * l2)) * inst1.kernel_gap(inst2)?;
    Ok(BoundReport::new(lhs, rhs, Constants { c, l: l2, k, eta }))
}
