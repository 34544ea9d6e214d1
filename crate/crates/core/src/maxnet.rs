// SPDX-License-Identifier: MIT

//! Exact maximum networks for the leaky ReLU `φ(x) = max{x, βx}`.

use crate::ann::{Ann, Layer};
use crate::calculus::{compose, parallelize_same_depth};
use crate::error::{Error, Result};
use crate::sparse::Csr;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) || (1.0 - beta).abs() < 1e-6 {
        return Err(Error::InvalidActivation(format!("slope {beta} unusable for max networks")));
    }
    Ok(())
}

/// Depth-2 net `(x_1, x_2) ↦ max{x_1, x_2}` with descriptor `(2, 4, 1)`.
pub fn max_pair(beta: f64) -> Result<Ann> {
    check_beta(beta)?;
    let gamma = (1.0 - beta).abs() / ((1.0 - beta) * (1.0 - beta * beta));
    let delta = (1.0 - beta).abs() / (1.0 - beta);
    let w1 = Csr::from_dense(4, 2, &[delta, -delta, -delta, delta, 0.0, delta, 0.0, -delta]);
    let w2 = Csr::from_dense(1, 4, &[gamma, gamma * beta, gamma * (1.0 - beta), gamma * (beta - 1.0)]);
    Ann::new(vec![Layer::new(w1, vec![0.0; 4])?, Layer::new(w2, vec![0.0])?])
}

/// Depth-2 passthrough `x ↦ x` used for the unpaired last coordinate.
fn passthrough(beta: f64) -> Result<Ann> {
    let t = 1.0 / (1.0 + beta);
    Ann::new(vec![
        Layer::new(Csr::from_dense(2, 1, &[1.0, -1.0]), vec![0.0; 2])?,
        Layer::new(Csr::from_dense(1, 2, &[t, -t]), vec![0.0])?,
    ])
}

/// Pairwise maxima of consecutive coordinates; an odd last coordinate is passed through.
pub fn pairwise_max_layer(n: usize, beta: f64) -> Result<Ann> {
    check_beta(beta)?;
    if n < 2 {
        return Err(Error::Domain(format!("pairwise max needs n >= 2, got {n}")));
    }
    let m = max_pair(beta)?;
    let mut blocks = vec![m; n / 2];
    if n % 2 == 1 {
        blocks.push(passthrough(beta)?);
    }
    parallelize_same_depth(&blocks)
}

/// `Ψ_m`: realizes `x ↦ max_i x_i` with depth `⌈log₂ m⌉ + 1`.
pub fn max_net(m: usize, beta: f64) -> Result<Ann> {
    check_beta(beta)?;
    if m < 2 {
        return Err(Error::Domain(format!("max net needs m >= 2, got {m}")));
    }
    if m == 2 {
        return max_pair(beta);
    }
    compose(&max_net(m.div_ceil(2), beta)?, &pairwise_max_layer(m, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ann::Activation;

    fn run(net: &Ann, beta: f64, x: &[f64]) -> Vec<f64> {
        net.realize(&Activation::LeakyRelu { beta }, x).unwrap()
    }

    #[test]
    fn pair_examples() {
        assert_eq!(run(&pairwise_max_layer(2, 0.0).unwrap(), 0.0, &[3.0, 7.0]), vec![7.0]);
        let y = run(&pairwise_max_layer(3, 0.2).unwrap(), 0.2, &[1.0, -1.0, 5.0]);
        assert!((y[0] - 1.0).abs() < 1e-12 && (y[1] - 5.0).abs() < 1e-12);
        assert_eq!(pairwise_max_layer(5, 0.2).unwrap().describe().dims, vec![5, 10, 3]);
    }

    #[test]
    fn slope_above_one() {
        let y = run(&max_net(5, 2.5).unwrap(), 2.5, &[0.3, -7.0, 4.25, 4.0, -1.0]);
        assert!((y[0] - 4.25).abs() < 1e-12);
    }

    #[test]
    fn max_net_examples() {
        assert_eq!(max_net(4, 0.1).unwrap().depth(), 3);
        let y = run(&max_net(2, 0.5).unwrap(), 0.5, &[-2.0, -9.0]);
        assert!((y[0] + 2.0).abs() < 1e-12);
        for m in 2..=16 {
            let y = run(&max_net(m, 0.1).unwrap(), 0.1, &vec![-3.5; m]);
            assert!((y[0] + 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(max_net(1, 0.1), Err(Error::Domain(_))));
        assert!(matches!(max_net(4, 1.0), Err(Error::InvalidActivation(_))));
        assert!(matches!(pairwise_max_layer(2, 1.0 + 1e-7), Err(Error::InvalidActivation(_))));
    }
}
