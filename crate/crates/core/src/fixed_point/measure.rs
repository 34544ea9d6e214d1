// SPDX-License-Identifier: MIT

//! Finitely supported probability measures and their Wasserstein-1 distance.

use super::lp::solve_standard_form;
use crate::error::{Error, Result};

pub const MAX_SUPPORT: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<Vec<f64>>,
    mass: Vec<f64>,
}

pub fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl DiscreteMeasure {
    pub fn new(support: Vec<Vec<f64>>, mass: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != mass.len() {
            return Err(Error::Measure(format!("{} points but {} masses", support.len(), mass.len())));
        }
        let d = support[0].len();
        if d == 0 || support.iter().any(|p| p.len() != d) {
            return Err(Error::Measure("support points must share a positive dimension".into()));
        }
        if mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Measure("masses must be finite and nonnegative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Measure(format!("total mass {total} is not 1")));
        }
        for i in 0..support.len() {
            for j in 0..i {
                if support[i] == support[j] {
                    return Err(Error::Measure(format!("support points {j} and {i} coincide")));
                }
            }
        }
        Ok(DiscreteMeasure { support, mass })
    }

    pub fn dirac(x: Vec<f64>) -> Self {
        DiscreteMeasure { support: vec![x], mass: vec![1.0] }
    }

    /// Measure with masses `probs` on `points`, zero-mass points dropped.
    pub fn from_weights(points: &[Vec<f64>], probs: &[f64]) -> Result<Self> {
        let (s, m): (Vec<_>, Vec<_>) =
            points.iter().zip(probs).filter(|(_, &p)| p > 0.0).map(|(x, &p)| (x.clone(), p)).unzip();
        Self::new(s, m)
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn dim(&self) -> usize {
        self.support[0].len()
    }
}

fn check_pair(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::Measure(format!("dimensions {} and {} differ", mu.dim(), nu.dim())));
    }
    if mu.support.len() > MAX_SUPPORT || nu.support.len() > MAX_SUPPORT {
        return Err(Error::Measure(format!("supports are limited to {MAX_SUPPORT} points")));
    }
    Ok(())
}

/// Optimal transport cost with Euclidean ground cost, solved as a linear program over couplings.
pub fn w1_lp(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    check_pair(mu, nu)?;
    let (n, m) = (mu.support.len(), nu.support.len());
    let mut cost = Vec::with_capacity(n * m);
    for x in &mu.support {
        for y in &nu.support {
            cost.push(euclid(x, y));
        }
    }
    // Row marginals, then all column marginals but the last (implied by total mass).
    let mut a = Vec::with_capacity(n + m - 1);
    let mut b = Vec::with_capacity(n + m - 1);
    for i in 0..n {
        let mut row = vec![0.0; n * m];
        row[i * m..(i + 1) * m].fill(1.0);
        a.push(row);
        b.push(mu.mass[i]);
    }
    for j in 0..m - 1 {
        let mut row = vec![0.0; n * m];
        for i in 0..n {
            row[i * m + j] = 1.0;
        }
        a.push(row);
        b.push(nu.mass[j]);
    }
    Ok(solve_standard_form(&cost, &a, &b)?.0.max(0.0))
}

/// One-dimensional distance `∫ |F_μ − F_ν|` from the sorted cumulative distribution functions.
pub fn w1_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    check_pair(mu, nu)?;
    if mu.dim() != 1 {
        return Err(Error::Measure("the sorted-CDF route needs one-dimensional supports".into()));
    }
    let mut events: Vec<(f64, f64)> = mu.support.iter().zip(&mu.mass).map(|(x, &p)| (x[0], p)).collect();
    events.extend(nu.support.iter().zip(&nu.mass).map(|(y, &q)| (y[0], -q)));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut diff = 0.0;
    let mut total = 0.0;
    for k in 0..events.len() {
        diff += events[k].1;
        if let Some(next) = events.get(k + 1) {
            total += diff.abs() * (next.0 - events[k].0);
        }
    }
    Ok(total)
}

/// Wasserstein-1 distance; one-dimensional inputs take the sorted-CDF route.
pub fn w1_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    if mu.dim() == 1 && nu.dim() == 1 {
        w1_1d(mu, nu)
    } else {
        w1_lp(mu, nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_masses() {
        let a = DiscreteMeasure::dirac(vec![0.0, 3.0]);
        let b = DiscreteMeasure::dirac(vec![4.0, 0.0]);
        assert!((w1_discrete(&a, &b).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(w1_discrete(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn uniform_versus_dirac() {
        let mu = DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        let nu = DiscreteMeasure::dirac(vec![0.0]);
        // Only coupling: all mass moves to 0, half of it from distance 1.
        assert!((w1_1d(&mu, &nu).unwrap() - 0.5).abs() < 1e-15);
        assert!((w1_lp(&mu, &nu).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![0.9]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![0.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0, 2.0]], vec![0.5, 0.5]).is_err());
        let a = DiscreteMeasure::dirac(vec![0.0]);
        let b = DiscreteMeasure::dirac(vec![0.0, 1.0]);
        assert!(w1_discrete(&a, &b).is_err());
    }
}
