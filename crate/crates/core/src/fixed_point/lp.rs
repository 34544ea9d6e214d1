// SPDX-License-Identifier: MIT

//! Dense two-phase simplex for `min cᵀx` subject to `Ax = b`, `x ≥ 0`, `b ≥ 0`.

use crate::error::{Error, Result};

const EPS: f64 = 1e-12;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 32;

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    active: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in &mut self.rows[r] {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.rows[r][c] = 1.0;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= f * prhs;
                if self.rhs[i] < 0.0 && self.rhs[i] > -EPS {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut red = cost[..self.active].to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (r, v) in red.iter_mut().zip(row) {
                    *r -= cb * v;
                }
            }
        }
        red
    }

    /// Runs simplex iterations for `cost` until optimal.
    fn optimize(&mut self, cost: &[f64]) -> Result<()> {
        let mut degenerate = 0usize;
        let limit = 50_000 + 50 * self.active;
        for _ in 0..limit {
            let red = self.reduced_costs(cost);
            let bland = degenerate >= DEGENERATE_LIMIT;
            let entering = if bland {
                red.iter().position(|&r| r < -EPS)
            } else {
                red.iter().enumerate().filter(|(_, &r)| r < -EPS).min_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j)
            };
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > EPS {
                    let ratio = self.rhs[i] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - EPS || (ratio <= lr + EPS && self.basis[i] < self.basis[li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (r, ratio) = leave.ok_or_else(|| Error::Domain("linear program is unbounded".into()))?;
            degenerate = if ratio <= EPS { degenerate + 1 } else { 0 };
            self.pivot(r, c);
        }
        Err(Error::Domain("simplex iteration limit reached".into()))
    }
}

/// Returns the optimal value and a primal solution.
pub fn solve_standard_form(cost: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = cost.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("linear program dimensions disagree".into()));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("right-hand side must be nonnegative".into()));
    }
    let mut rows = Vec::with_capacity(m);
    for (i, r) in a.iter().enumerate() {
        let mut row = r.clone();
        row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
        rows.push(row);
    }
    let mut t = Tableau { rows, rhs: b.to_vec(), basis: (n..n + m).collect(), active: n + m };

    let phase1: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    t.optimize(&phase1)?;
    let infeas: f64 = t.basis.iter().zip(&t.rhs).filter(|(&j, _)| j >= n).map(|(_, &v)| v).sum();
    let scale = 1.0 + b.iter().sum::<f64>();
    if infeas > 1e-9 * scale {
        return Err(Error::Domain(format!("linear program infeasible (residual {infeas:e})")));
    }

    // Drive degenerate artificials out of the basis; drop rows that stay redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    t.active = n;
    let mut cost2 = cost.to_vec();
    cost2.extend(std::iter::repeat_n(0.0, m));
    t.optimize(&cost2)?;

    let mut x = vec![0.0; n];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.rhs[i].max(0.0);
        }
    }
    let obj = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok((obj, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min x + 2y s.t. x + y = 1
        let (v, x) = solve_standard_form(&[1.0, 2.0], &[vec![1.0, 1.0]], &[1.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]];
        let (v, _) = solve_standard_form(&[3.0, 1.0, 1.0], &a, &[1.0, 2.0, 0.5]).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(solve_standard_form(&[1.0, 1.0], &a, &[1.0, 2.0]).is_err());
    }
}
