// SPDX-License-Identifier: MIT

use std::fmt;
use std::sync::Arc;

use super::measure::{euclid, w1_discrete, DiscreteMeasure};
use crate::error::{Error, Result};

/// Value table `u[x][a]` over states and actions.
pub type ValueTable = Vec<Vec<f64>>;

/// Finite state set with per-action row-stochastic transition matrices and a weight function.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteKernelInstance {
    states: Vec<Vec<f64>>,
    transition: Vec<Vec<Vec<f64>>>,
    weight: Vec<f64>,
}

impl DiscreteKernelInstance {
    /// `transition[a][x][y]` is the probability of moving from state `x` to state `y` under action `a`.
    pub fn new(states: Vec<Vec<f64>>, transition: Vec<Vec<Vec<f64>>>, weight: Vec<f64>) -> Result<Self> {
        let n = states.len();
        if n == 0 || transition.is_empty() {
            return Err(Error::Domain("instance needs states and actions".into()));
        }
        let d = states[0].len();
        if d == 0 || states.iter().any(|s| s.len() != d) {
            return Err(Error::Domain("states must share a positive dimension".into()));
        }
        for i in 0..n {
            if states[..i].contains(&states[i]) {
                return Err(Error::Domain(format!("state {i} is duplicated")));
            }
        }
        if weight.len() != n || weight.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Domain("weights must be positive, one per state".into()));
        }
        for (a, p) in transition.iter().enumerate() {
            if p.len() != n || p.iter().any(|r| r.len() != n) {
                return Err(Error::Domain(format!("action {a}: transition matrix must be {n}x{n}")));
            }
            for (x, row) in p.iter().enumerate() {
                let s: f64 = row.iter().sum();
                if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (s - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!("action {a}, state {x}: row is not a probability vector")));
                }
            }
        }
        Ok(DiscreteKernelInstance { states, transition, weight })
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn transition(&self) -> &[Vec<Vec<f64>>] {
        &self.transition
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.transition.len()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.states == other.states && self.n_actions() == other.n_actions() && self.weight == other.weight
    }

    pub fn kernel(&self, a: usize, x: usize) -> Result<DiscreteMeasure> {
        DiscreteMeasure::from_weights(&self.states, &self.transition[a][x])
    }

    /// `c = max_{x,a} Σ_y κ^a(x,y) w(y) / w(x)`.
    pub fn contraction_c(&self) -> f64 {
        let mut c: f64 = 0.0;
        for p in &self.transition {
            for (x, row) in p.iter().enumerate() {
                let s: f64 = row.iter().zip(&self.weight).map(|(k, w)| k * w).sum();
                c = c.max(s / self.weight[x]);
            }
        }
        c
    }

    /// `η = max_{a, x≠y} W1(κ^a(x,·), κ^a(y,·)) / ‖x − y‖`.
    pub fn kernel_lipschitz(&self) -> Result<f64> {
        let mut eta: f64 = 0.0;
        for a in 0..self.n_actions() {
            let ms = (0..self.n_states()).map(|x| self.kernel(a, x)).collect::<Result<Vec<_>>>()?;
            for x in 0..ms.len() {
                for y in 0..x {
                    let w = w1_discrete(&ms[x], &ms[y])?;
                    eta = eta.max(w / euclid(&self.states[x], &self.states[y]));
                }
            }
        }
        Ok(eta)
    }

    /// `sup_{y,b} W1(κ_1^b(y,·), κ_2^b(y,·)) / w(y)`.
    pub fn kernel_gap(&self, other: &Self) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(Error::Domain("instances differ in states, actions or weights".into()));
        }
        let mut g: f64 = 0.0;
        for a in 0..self.n_actions() {
            for y in 0..self.n_states() {
                g = g.max(w1_discrete(&self.kernel(a, y)?, &other.kernel(a, y)?)? / self.weight[y]);
            }
        }
        Ok(g)
    }

    pub fn weighted_sup(&self, u: &ValueTable) -> f64 {
        u.iter()
            .zip(&self.weight)
            .map(|(row, w)| row.iter().fold(0.0f64, |m, v| m.max(v.abs())) / w)
            .fold(0.0, f64::max)
    }
}

type EvalFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Nonlinearity `f(x, r)` with claimed Lipschitz constants in the value vector (max-norm) and in the state.
#[derive(Clone)]
pub struct Nonlinearity {
    eval: Arc<EvalFn>,
    pub lipschitz_in_values: f64,
    pub lipschitz_in_state: f64,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("lipschitz_in_values", &self.lipschitz_in_values)
            .field("lipschitz_in_state", &self.lipschitz_in_state)
            .finish()
    }
}

impl Nonlinearity {
    pub fn new(
        lipschitz_in_values: f64,
        lipschitz_in_state: f64,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Nonlinearity { eval: Arc::new(eval), lipschitz_in_values, lipschitz_in_state }
    }

    pub fn eval(&self, x: &[f64], r: &[f64]) -> f64 {
        (self.eval)(x, r)
    }

    /// Largest `|f(x,r) − f(x,s)| / ‖r − s‖_∞` over probe pairs and their diagonal shifts.
    pub fn enumerate_value_lipschitz(&self, states: &[Vec<f64>], probes: &[Vec<f64>]) -> f64 {
        let mut l: f64 = 0.0;
        for x in states {
            for (i, r) in probes.iter().enumerate() {
                for t in [-1.0, -0.25, 0.25, 1.0] {
                    let s: Vec<f64> = r.iter().map(|v| v + t).collect();
                    l = l.max((self.eval(x, r) - self.eval(x, &s)).abs() / t.abs());
                }
                for s in &probes[..i] {
                    let d = r.iter().zip(s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    if d > 0.0 {
                        l = l.max((self.eval(x, r) - self.eval(x, s)).abs() / d);
                    }
                }
            }
        }
        l
    }

    /// Largest `|f(x,r) − f(y,r)| / ‖x − y‖` over state pairs and probes.
    pub fn enumerate_state_lipschitz(&self, states: &[Vec<f64>], probes: &[Vec<f64>]) -> f64 {
        let mut k: f64 = 0.0;
        for i in 0..states.len() {
            for j in 0..i {
                let d = euclid(&states[i], &states[j]);
                for r in probes {
                    k = k.max((self.eval(&states[i], r) - self.eval(&states[j], r)).abs() / d);
                }
            }
        }
        k
    }
}

/// Probe value vectors: rows of the given tables, the origin, axis points and diagonal points.
pub fn probe_set(n_actions: usize, tables: &[&ValueTable]) -> Vec<Vec<f64>> {
    let mut probes: Vec<Vec<f64>> = vec![vec![0.0; n_actions]];
    for t in [-4.0, -1.0, -0.5, 0.5, 1.0, 4.0] {
        for k in 0..n_actions {
            let mut e = vec![0.0; n_actions];
            e[k] = t;
            probes.push(e);
        }
        probes.push(vec![t; n_actions]);
    }
    for table in tables {
        probes.extend(table.iter().cloned());
    }
    probes
}
