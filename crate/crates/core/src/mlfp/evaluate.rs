// SPDX-License-Identifier: MIT

//! Direct evaluation of the full-history recursive MLFP estimator.

use rayon::prelude::*;

use super::field::RandomFieldSpec;
use super::schedule::MlfpSchedule;
use super::theta::ThetaKey;
use crate::error::{Error, Result};

/// Evaluation map `F(y, r)` for `y ∈ ℝ^d`, `r ∈ ℝ^{|A|}`.
pub type EvalMap<'a> = &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync);

/// Number of `F` evaluations made by `U_n` for all actions: `V(n) = |A| Σ_{l<n} M^{n−l} (1 + V(l) + 𝟙_{l≥1}(1 + V(l−1)))`.
pub fn f_call_count(a_count: usize, m: u64, n: usize) -> Option<u128> {
    let a = a_count as u128;
    let m = m as u128;
    let mut v: Vec<u128> = vec![0];
    for k in 1..=n {
        let mut per_action: u128 = 0;
        for l in 0..k {
            let mut inner = 1u128.checked_add(v[l])?;
            if l >= 1 {
                inner = inner.checked_add(1)?.checked_add(v[l - 1])?;
            }
            per_action = per_action.checked_add(m.checked_pow((k - l) as u32)?.checked_mul(inner)?)?;
        }
        v.push(a.checked_mul(per_action)?);
    }
    Some(v[n])
}

fn check_budget(field: &RandomFieldSpec, sched: &MlfpSchedule) -> Result<()> {
    match f_call_count(field.n_actions(), sched.m, sched.n) {
        Some(c) if c < (1u128 << 63) => Ok(()),
        _ => Err(Error::Budget(format!("M = {}, n = {} exceeds 2^63 samples", sched.m, sched.n))),
    }
}

fn recurse(field: &RandomFieldSpec, f: EvalMap, m: u64, n: usize, theta: &ThetaKey, x: &[f64]) -> Vec<f64> {
    (0..field.n_actions()).map(|a| action_value(field, f, m, n, theta, a, x)).collect()
}

/// Contribution of sample `i` at level `l`: `F(X, U_l^{(θ,l,i)}(X)) − 𝟙_{l≥1} F(X, U_{l−1}^{(θ,−l,i)}(X))`.
#[allow(clippy::too_many_arguments)]
fn term(field: &RandomFieldSpec, f: EvalMap, m: u64, theta: &ThetaKey, a: usize, x: &[f64], l: usize, i: u64) -> f64 {
    let tp = theta.child(l as i64, i);
    let y = field.sample(&tp, a, x);
    let mut t = f(&y, &recurse(field, f, m, l, &tp, &y));
    if l >= 1 {
        let tm = theta.child(-(l as i64), i);
        t -= f(&y, &recurse(field, f, m, l - 1, &tm, &y));
    }
    t
}

fn action_value(field: &RandomFieldSpec, f: EvalMap, m: u64, n: usize, theta: &ThetaKey, a: usize, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for l in 0..n {
        let count = m.pow((n - l) as u32);
        let mut s = 0.0;
        for i in 1..=count {
            s += term(field, f, m, theta, a, x, l, i);
        }
        total += s / count as f64;
    }
    total
}

/// `U_n^θ(x) ∈ ℝ^{|A|}`; `n = 0` gives the zero vector.
pub fn mlfp_evaluate(
    field: &RandomFieldSpec,
    f: EvalMap,
    sched: &MlfpSchedule,
    theta: &ThetaKey,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_budget(field, sched)?;
    if x.len() != field.state_dim() {
        return Err(Error::InputShape { expected: field.state_dim(), got: x.len() });
    }
    Ok(recurse(field, f, sched.m, sched.n, theta, x))
}

/// Same estimator with the outer samples evaluated in parallel; bitwise equal to [`mlfp_evaluate`].
pub fn mlfp_evaluate_par(
    field: &RandomFieldSpec,
    f: EvalMap,
    sched: &MlfpSchedule,
    theta: &ThetaKey,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_budget(field, sched)?;
    if x.len() != field.state_dim() {
        return Err(Error::InputShape { expected: field.state_dim(), got: x.len() });
    }
    let (m, n) = (sched.m, sched.n);
    Ok((0..field.n_actions())
        .map(|a| {
            let mut total = 0.0;
            for l in 0..n {
                let count = m.pow((n - l) as u32);
                let terms: Vec<f64> =
                    (1..=count).into_par_iter().map(|i| term(field, f, m, theta, a, x, l, i)).collect();
                let mut s = 0.0;
                for t in terms {
                    s += t;
                }
                total += s / count as f64;
            }
            total
        })
        .collect())
}
