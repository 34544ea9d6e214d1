// SPDX-License-Identifier: MIT

//! Network algebra: composition, powers, extensions, parallelizations,
//! fan-in/fan-out nets, scalar multiples and sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ann::{Activation, Ann, Layer};
use crate::error::{Error, Result};
use crate::sparse::Csr;

/// `front • back`: realizes `front ∘ back`, fusing the boundary affine maps.
pub fn compose(front: &Ann, back: &Ann) -> Result<Ann> {
    if front.input_dim() != back.output_dim() {
        return Err(Error::Composition { front_in: front.input_dim(), back_out: back.output_dim() });
    }
    let (fl, bl) = (front.layers(), back.layers());
    let mut layers = Vec::with_capacity(fl.len() + bl.len() - 1);
    layers.extend_from_slice(&bl[..bl.len() - 1]);
    let (first, last) = (&fl[0], &bl[bl.len() - 1]);
    let w = first.w.matmul(&last.w);
    let b = first.affine(&last.b);
    layers.push(Layer { w, b });
    layers.extend_from_slice(&fl[1..]);
    Ok(Ann::from_layers_unchecked(layers))
}

/// `net^{•n}`; `n = 0` gives `(I, 0)`.
pub fn power(net: &Ann, n: usize) -> Result<Ann> {
    if net.input_dim() != net.output_dim() {
        return Err(Error::Shape(format!("power needs a square net, got {} -> {}", net.input_dim(), net.output_dim())));
    }
    let mut acc = Ann::identity_affine(net.output_dim());
    for _ in 0..n {
        acc = compose(net, &acc)?;
    }
    Ok(acc)
}

/// A depth-2 net realizing the identity under a fixed activation.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityNet {
    net: Ann,
    act: Activation,
}

impl IdentityNet {
    /// Wraps `net` after checking depth, squareness and the identity property on random probes.
    pub fn new(net: Ann, act: Activation) -> Result<Self> {
        act.validate()?;
        if net.depth() != 2 || net.input_dim() != net.output_dim() {
            return Err(Error::Shape(format!(
                "identity net must be depth 2 and square, got {:?}",
                net.describe().dims
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
        for _ in 0..16 {
            let x: Vec<f64> = (0..net.input_dim()).map(|_| rng.random_range(-50.0..50.0)).collect();
            let y = net.realize(&act, &x)?;
            let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs() / (1.0 + a.abs())).fold(0.0, f64::max);
            if err > 1e-12 {
                return Err(Error::Shape(format!("net does not realize the identity (error {err:e})")));
            }
        }
        Ok(IdentityNet { net, act })
    }

    pub fn net(&self) -> &Ann {
        &self.net
    }

    pub fn act(&self) -> Activation {
        self.act
    }

    pub fn dim(&self) -> usize {
        self.net.input_dim()
    }
}

/// `𝕀_dim = P_dim(𝔍, ..., 𝔍)` built from the block `x ↦ φ(x) − φ(−x)`, scaled by `(1+β)^{-1}` for leaky ReLU.
pub fn identity_net(dim: usize, act: Activation) -> Result<IdentityNet> {
    act.validate()?;
    if dim == 0 {
        return Err(Error::Domain("identity net dimension must be positive".into()));
    }
    let s = match act {
        Activation::LeakyRelu { beta } => 1.0 / (1.0 + beta),
        Activation::Softplus => 1.0,
    };
    let one = Ann::new(vec![
        Layer::new(Csr::from_dense(2, 1, &[1.0, -1.0]), vec![0.0, 0.0])?,
        Layer::new(Csr::from_dense(1, 2, &[s, -s]), vec![0.0])?,
    ])?;
    let blocks = vec![one; dim];
    let net = parallelize_same_depth(&blocks)?;
    IdentityNet::new(net, act)
}

/// `E_{L,id}(net) = id^{•(L − ℒ(net))} • net`.
pub fn extend(target_depth: usize, id: &IdentityNet, net: &Ann) -> Result<Ann> {
    if target_depth < net.depth() {
        return Err(Error::Depth(format!("cannot extend depth {} to {target_depth}", net.depth())));
    }
    if net.output_dim() != id.dim() {
        return Err(Error::Shape(format!("net output {} != identity dimension {}", net.output_dim(), id.dim())));
    }
    if target_depth == net.depth() {
        return Ok(net.clone());
    }
    compose(&power(id.net(), target_depth - net.depth())?, net)
}

/// `P_n`: block-diagonal stacking of equal-depth nets.
pub fn parallelize_same_depth(nets: &[Ann]) -> Result<Ann> {
    let first = nets.first().ok_or_else(|| Error::Shape("parallelization of an empty family".into()))?;
    let depth = first.depth();
    if let Some(n) = nets.iter().find(|n| n.depth() != depth) {
        return Err(Error::Depth(format!("parallelization needs equal depths, got {depth} and {}", n.depth())));
    }
    if nets.len() == 1 {
        return Ok(first.clone());
    }
    let layers = (0..depth)
        .map(|k| {
            let blocks: Vec<&Csr> = nets.iter().map(|n| &n.layers()[k].w).collect();
            let b = nets.iter().flat_map(|n| n.layers()[k].b.iter().copied()).collect();
            Layer { w: Csr::block_diag(&blocks), b }
        })
        .collect();
    Ok(Ann::from_layers_unchecked(layers))
}

/// `P_{n,Ψ}`: extend each net with its identity net to the common maximal depth, then stack.
pub fn parallelize_mixed(nets: &[Ann], ids: &[IdentityNet]) -> Result<Ann> {
    if nets.len() != ids.len() {
        return Err(Error::Shape(format!("{} nets but {} identity nets", nets.len(), ids.len())));
    }
    let depth = nets.iter().map(Ann::depth).max().ok_or_else(|| Error::Shape("empty family".into()))?;
    let ext = nets.iter().zip(ids).map(|(n, id)| extend(depth, id, n)).collect::<Result<Vec<_>>>()?;
    parallelize_same_depth(&ext)
}

/// `𝔖_{m,n}`: `(x_1, ..., x_n) ↦ Σ x_i` for `x_i ∈ ℝ^m`.
pub fn sum_net(m: usize, n: usize) -> Ann {
    let i = Csr::identity(m);
    Ann::from_layers_unchecked(vec![Layer { w: Csr::hstack(&vec![&i; n]), b: vec![0.0; m] }])
}

/// `𝔗_{m,n}`: `x ↦ (x, ..., x)` with `n` copies.
pub fn copy_net(m: usize, n: usize) -> Ann {
    let i = Csr::identity(m);
    Ann::from_layers_unchecked(vec![Layer { w: Csr::vstack(&vec![&i; n]), b: vec![0.0; m * n] }])
}

pub fn fan_nets(m: usize, n: usize) -> Result<(Ann, Ann)> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("fan nets need positive dimensions".into()));
    }
    Ok((sum_net(m, n), copy_net(m, n)))
}

/// `α ⊛ net = (α I, 0) • net`.
pub fn scalar_mul(alpha: f64, net: &Ann) -> Ann {
    let mut layers = net.layers().to_vec();
    let last = layers.last_mut().unwrap();
    last.w = last.w.scale(alpha);
    for b in &mut last.b {
        *b *= alpha;
    }
    Ann::from_layers_unchecked(layers)
}

/// `⊕ nets = 𝔖 • P_n(nets) • 𝔗`.
pub fn sum_same_depth(nets: &[Ann]) -> Result<Ann> {
    let first = nets.first().ok_or_else(|| Error::Shape("sum of an empty family".into()))?;
    let (i, o) = (first.input_dim(), first.output_dim());
    if let Some(n) = nets.iter().find(|n| n.input_dim() != i || n.output_dim() != o) {
        return Err(Error::Shape(format!(
            "sum needs equal input/output dims, got {i}->{o} and {}->{}",
            n.input_dim(),
            n.output_dim()
        )));
    }
    let p = parallelize_same_depth(nets)?;
    compose(&sum_net(o, nets.len()), &compose(&p, &copy_net(i, nets.len()))?)
}

/// `⊞_id (h_i ⊛ net_i)`: scale, extend to the common maximal depth, then `⊕`.
pub fn sum_mixed_depth(nets: &[Ann], id: &IdentityNet, coeffs: &[f64]) -> Result<Ann> {
    if nets.len() != coeffs.len() {
        return Err(Error::Shape(format!("{} nets but {} coefficients", nets.len(), coeffs.len())));
    }
    let depth = nets.iter().map(Ann::depth).max().ok_or_else(|| Error::Shape("sum of an empty family".into()))?;
    let ext =
        nets.iter().zip(coeffs).map(|(n, &h)| extend(depth, id, &scalar_mul(h, n))).collect::<Result<Vec<_>>>()?;
    sum_same_depth(&ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act() -> Activation {
        Activation::LeakyRelu { beta: 0.3 }
    }

    fn dense(rows: usize, cols: usize, seed: u64) -> Csr {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        Csr::from_dense(rows, cols, &v)
    }

    fn rand_net(dims: &[usize], seed: u64) -> Ann {
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(k, w)| Layer::new(dense(w[1], w[0], seed * 31 + k as u64), vec![0.25; w[1]]).unwrap())
            .collect();
        Ann::new(layers).unwrap()
    }

    #[test]
    fn compose_architecture() {
        let c = compose(&rand_net(&[3, 4, 2], 1), &rand_net(&[5, 6, 3], 2)).unwrap();
        assert_eq!(c.describe().dims, vec![5, 6, 4, 2]);
        assert_eq!(c.describe().hidden(), 2);
        assert!(matches!(compose(&rand_net(&[3, 1], 1), &rand_net(&[2, 2], 1)), Err(Error::Composition { .. })));
    }

    #[test]
    fn power_zero_and_identity_powers() {
        let p = power(&rand_net(&[3, 5, 3], 4), 0).unwrap();
        assert_eq!(p, Ann::identity_affine(3));
        let j = identity_net(1, act()).unwrap();
        assert_eq!(power(j.net(), 3).unwrap().describe().dims, vec![1, 2, 2, 2, 1]);
        for n in [0, 1, 2, 5] {
            let y = power(j.net(), n).unwrap().realize(&act(), &[-4.5]).unwrap();
            assert!((y[0] + 4.5).abs() < 1e-12);
        }
        assert!(power(&rand_net(&[3, 2], 1), 1).is_err());
    }

    #[test]
    fn extend_examples() {
        let n = rand_net(&[2, 3, 1], 7);
        let j = identity_net(1, act()).unwrap();
        assert_eq!(extend(2, &j, &n).unwrap(), n);
        assert_eq!(extend(4, &j, &n).unwrap().describe().dims, vec![2, 3, 2, 2, 1]);
        assert!(matches!(extend(1, &j, &n), Err(Error::Depth(_))));
    }

    #[test]
    fn identity_net_values() {
        let j = identity_net(1, Activation::LeakyRelu { beta: 0.5 }).unwrap();
        let phi = |t: f64| t.max(0.5 * t);
        let oracle = (phi(-3.0) - phi(3.0)) / 1.5;
        assert_eq!(oracle, -3.0);
        assert!((j.net().realize(&j.act(), &[-3.0]).unwrap()[0] + 3.0).abs() < 1e-15);
        let s = identity_net(2, Activation::Softplus).unwrap();
        let y = s.net().realize(&Activation::Softplus, &[0.3, -4.0]).unwrap();
        assert!((y[0] - 0.3).abs() < 1e-14 && (y[1] + 4.0).abs() < 1e-14);
        assert_eq!(identity_net(5, act()).unwrap().net().describe().dims, vec![5, 10, 5]);
    }

    #[test]
    fn identity_net_rejects_non_identity() {
        assert!(IdentityNet::new(rand_net(&[1, 2, 1], 3), act()).is_err());
    }

    #[test]
    fn fan_net_examples() {
        let (s, t) = fan_nets(2, 3).unwrap();
        assert_eq!(s.realize(&act(), &[1.0, 0.0, 0.0, 1.0, 2.0, 2.0]).unwrap(), vec![3.0, 3.0]);
        assert_eq!(s.describe().dims, vec![6, 2]);
        let (_, t2) = fan_nets(2, 2).unwrap();
        assert_eq!(t2.realize(&act(), &[5.0, -1.0]).unwrap(), vec![5.0, -1.0, 5.0, -1.0]);
        assert_eq!(t.describe().dims, vec![2, 6]);
    }

    #[test]
    fn parallel_examples() {
        let j = identity_net(1, act()).unwrap();
        let p = parallelize_same_depth(&[j.net().clone(), j.net().clone()]).unwrap();
        assert_eq!(p.describe().dims, vec![2, 4, 2]);
        let n = rand_net(&[2, 3, 1], 9);
        assert_eq!(parallelize_same_depth(std::slice::from_ref(&n)).unwrap(), n);
        let deep = rand_net(&[1, 2, 2, 2, 1], 11);
        let m = parallelize_mixed(&[n, deep], &[j.clone(), j]).unwrap();
        assert_eq!(m.depth(), 4);
    }

    #[test]
    fn sums_and_scalars() {
        let n = rand_net(&[2, 4, 3], 5);
        let z = sum_same_depth(&[n.clone(), scalar_mul(-1.0, &n)]).unwrap();
        assert!(z.realize(&act(), &[0.7, -1.1]).unwrap().iter().all(|v| v.abs() < 1e-14));
        assert_eq!(scalar_mul(2.5, &n).describe(), n.describe());
        let j = identity_net(1, act()).unwrap();
        let a = rand_net(&[1, 2, 1], 1);
        let s = sum_same_depth(&[a.clone(), a]).unwrap();
        assert_eq!(s.describe().dims, vec![1, 4, 1]);
        let zeros = vec![Ann::zero(3, 1); 3];
        assert_eq!(sum_same_depth(&zeros).unwrap().realize(&act(), &[1.0, 2.0, 3.0]).unwrap(), vec![0.0]);
        let mixed = sum_mixed_depth(&[rand_net(&[2, 3, 1], 1), rand_net(&[2, 3, 3, 1], 2)], &j, &[1.0, 1.0]).unwrap();
        let d = mixed.describe();
        assert_eq!((d.input(), d.output(), d.depth()), (2, 1, 3));
    }
}
