// SPDX-License-Identifier: MIT

//! Random fields `x ↦ t^{(a)}(x, ξ^θ)` driven by per-θ streams, and their network form.

use rand::Rng;

use super::theta::{stream, ThetaKey};
use crate::ann::{Activation, Ann};
use crate::calculus::compose;
use crate::error::{Error, Result};
use crate::sparse::Csr;

/// Law of the shock `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseLaw {
    /// Independent coordinates uniform on `[lo, hi)`.
    Uniform { dim: usize, lo: f64, hi: f64 },
    /// Finitely many atoms with probabilities.
    Atoms { points: Vec<Vec<f64>>, probs: Vec<f64> },
}

impl NoiseLaw {
    pub fn atoms(points: Vec<Vec<f64>>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probs.len() {
            return Err(Error::Measure("atoms and probabilities must pair up".into()));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) || probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Measure("atoms must share a dimension and carry nonnegative mass".into()));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Measure("atom probabilities must sum to 1".into()));
        }
        Ok(NoiseLaw::Atoms { points, probs })
    }

    pub fn dim(&self) -> usize {
        match self {
            NoiseLaw::Uniform { dim, .. } => *dim,
            NoiseLaw::Atoms { points, .. } => points[0].len(),
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            NoiseLaw::Uniform { dim, lo, hi } => (0..*dim).map(|_| rng.random_range(*lo..*hi)).collect(),
            NoiseLaw::Atoms { points, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (p, q) in points.iter().zip(probs) {
                    acc += q;
                    if u < acc {
                        return p.clone();
                    }
                }
                points.last().unwrap().clone()
            }
        }
    }
}

/// Depth-1 net `x ↦ (x, ξ)` with descriptor `(d, d + dim ξ)`.
pub fn build_shock_net(x_dim: usize, xi: &[f64]) -> Result<Ann> {
    if x_dim == 0 {
        return Err(Error::Domain("state dimension must be positive".into()));
    }
    let w = Csr::vstack(&[&Csr::identity(x_dim), &Csr::zeros(xi.len(), x_dim)]);
    let mut b = vec![0.0; x_dim];
    b.extend_from_slice(xi);
    Ann::affine(w, b)
}

/// Per-action transition nets `𝔱^{(a)}: ℝ^{d + dim ξ} → ℝ^d` sharing one architecture, a shock law and a master seed.
#[derive(Clone, Debug)]
pub struct RandomFieldSpec {
    pub master_seed: u64,
    transitions: Vec<Ann>,
    noise: NoiseLaw,
    act: Activation,
}

impl RandomFieldSpec {
    pub fn new(master_seed: u64, transitions: Vec<Ann>, noise: NoiseLaw, act: Activation) -> Result<Self> {
        act.validate()?;
        let first = transitions.first().ok_or_else(|| Error::Domain("need at least one action".into()))?;
        let arch = first.describe();
        if transitions.iter().any(|t| t.describe() != arch) {
            return Err(Error::Shape("transition nets must share one architecture".into()));
        }
        let d = first.output_dim();
        if first.input_dim() != d + noise.dim() {
            return Err(Error::Shape(format!(
                "transition input {} != state {d} + shock {}",
                first.input_dim(),
                noise.dim()
            )));
        }
        Ok(RandomFieldSpec { master_seed, transitions, noise, act })
    }

    pub fn with_seed(&self, master_seed: u64) -> Self {
        RandomFieldSpec { master_seed, ..self.clone() }
    }

    pub fn state_dim(&self) -> usize {
        self.transitions[0].output_dim()
    }

    pub fn n_actions(&self) -> usize {
        self.transitions.len()
    }

    pub fn act(&self) -> Activation {
        self.act
    }

    pub fn noise(&self) -> &NoiseLaw {
        &self.noise
    }

    pub fn transitions(&self) -> &[Ann] {
        &self.transitions
    }

    /// `ξ^θ`, the first draw of the θ-stream.
    pub fn shock(&self, theta: &ThetaKey) -> Vec<f64> {
        self.noise.draw(&mut stream(self.master_seed, theta))
    }

    /// `t^{(a)}(x, ξ)` evaluated through the transition net.
    pub fn step(&self, a: usize, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let mut input = x.to_vec();
        input.extend_from_slice(xi);
        self.transitions[a].realize(&self.act, &input).expect("state dimension checked by caller")
    }

    /// `X^{θ,a}(x)`.
    pub fn sample(&self, theta: &ThetaKey, a: usize, x: &[f64]) -> Vec<f64> {
        self.step(a, x, &self.shock(theta))
    }

    /// `X^{θ,a} = 𝔱^{(a)} • Ξ^θ` with the shock frozen into the bias.
    pub fn x_net(&self, theta: &ThetaKey, a: usize) -> Result<Ann> {
        compose(&self.transitions[a], &build_shock_net(self.state_dim(), &self.shock(theta))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shock_net_examples() {
        let s = build_shock_net(2, &[0.0, 0.0]).unwrap();
        assert_eq!(s.describe().dims, vec![2, 4]);
        assert_eq!(s.realize(&Activation::Softplus, &[1.0, 2.0]).unwrap(), vec![1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn atoms_validate() {
        assert!(NoiseLaw::atoms(vec![vec![0.0], vec![1.0]], vec![0.5, 0.4]).is_err());
        let law = NoiseLaw::atoms(vec![vec![-1.0], vec![1.0]], vec![0.25, 0.75]).unwrap();
        let mut rng = stream(1, &ThetaKey::root());
        let ups = (0..4000).filter(|_| law.draw(&mut rng)[0] > 0.0).count();
        assert!((ups as f64 / 4000.0 - 0.75).abs() < 0.03);
    }
}
