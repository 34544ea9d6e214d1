// SPDX-License-Identifier: MIT

//! Q-networks for discounted MDPs: the Bellman nonlinearity net, Q-value
//! iteration on grid-closed instances and the end-to-end error measurement.

use std::fmt;
use std::sync::Arc;

use crate::ann::{Activation, Ann, Layer};
use crate::calculus::{compose, identity_net, parallelize_mixed, scalar_mul, sum_mixed_depth, sum_net, IdentityNet};
use crate::error::{Error, Result};
use crate::fixed_point::DiscreteMeasure;
use crate::maxnet::max_net;
use crate::mlfp::{build_mlfp_net, size_bounds, MlfpSchedule, NoiseLaw, RandomFieldSpec, SizeBounds, ThetaKey};
use crate::sparse::Csr;

pub use crate::mlfp::build_shock_net;

type RewardFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type TransitionFn = Arc<dyn Fn(usize, &[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// Reward net `G: ℝ^d → ℝ^{|A|}` with its accuracy tag.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardNet {
    pub net: Ann,
    pub eps: f64,
}

/// A discounted MDP with closed-form reward and transitions, finite noise and transition nets.
#[derive(Clone)]
pub struct MdpModel {
    pub d: usize,
    pub n_actions: usize,
    pub discount: f64,
    pub beta: f64,
    /// Grid used by the oracle; every transition of a grid state lands on it.
    pub states: Vec<Vec<f64>>,
    pub noise: NoiseLaw,
    pub transition_nets: Vec<Ann>,
    reward: RewardFn,
    transition: TransitionFn,
}

impl fmt::Debug for MdpModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MdpModel")
            .field("d", &self.d)
            .field("n_actions", &self.n_actions)
            .field("discount", &self.discount)
            .field("beta", &self.beta)
            .field("states", &self.states.len())
            .finish_non_exhaustive()
    }
}

impl MdpModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        d: usize,
        n_actions: usize,
        discount: f64,
        beta: f64,
        states: Vec<Vec<f64>>,
        noise: NoiseLaw,
        transition_nets: Vec<Ann>,
        reward: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        transition: impl Fn(usize, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(discount > 0.0 && discount < 1.0) {
            return Err(Error::Domain(format!("discount {discount} must lie in (0, 1)")));
        }
        Activation::leaky_relu(beta)?;
        if n_actions == 0 || transition_nets.len() != n_actions {
            return Err(Error::Shape(format!("{} transition nets for {n_actions} actions", transition_nets.len())));
        }
        if states.iter().any(|s| s.len() != d) {
            return Err(Error::Shape(format!("grid states must have dimension {d}")));
        }
        Ok(MdpModel {
            d,
            n_actions,
            discount,
            beta,
            states,
            noise,
            transition_nets,
            reward: Arc::new(reward),
            transition: Arc::new(transition),
        })
    }

    pub fn act(&self) -> Activation {
        Activation::LeakyRelu { beta: self.beta }
    }

    pub fn reward(&self, x: &[f64]) -> Vec<f64> {
        (self.reward)(x)
    }

    pub fn transition(&self, a: usize, x: &[f64], xi: &[f64]) -> Vec<f64> {
        (self.transition)(a, x, xi)
    }

    /// Random field driven by the transition nets and the noise law.
    pub fn field(&self, master_seed: u64) -> Result<RandomFieldSpec> {
        RandomFieldSpec::new(master_seed, self.transition_nets.clone(), self.noise.clone(), self.act())
    }

    /// Index of the grid state within `1e-9` of `x`.
    pub fn locate(&self, x: &[f64]) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-9))
            .ok_or_else(|| Error::OracleDomain(format!("state {x:?} is off the grid")))
    }
}

/// `relu(z) = a φ(z) + b φ(−z)` for the leaky ReLU with slope β.
fn relu_coeffs(beta: f64) -> (f64, f64) {
    let (p, q) = (beta.max(1.0), beta.min(1.0));
    let den = p * p - q * q;
    (p / den, q / den)
}

/// Bundled 16-state grid model: states `0..=15`, two actions shifting by `∓1`,
/// noise `{−2, −1, 1, 2}` with masses `{0.1, 0.4, 0.4, 0.1}`, clamped to the grid; discount 1/2.
pub fn grid16(beta: f64) -> Result<(MdpModel, RewardNet)> {
    Activation::leaky_relu(beta)?;
    if (1.0 - beta).abs() < 1e-6 {
        return Err(Error::InvalidActivation(format!("slope {beta} too close to 1")));
    }
    const TOP: f64 = 15.0;
    let shifts = [-1.0, 1.0];
    let (ra, rb) = relu_coeffs(beta);
    let transition_nets = shifts
        .iter()
        .map(|&s| {
            // y = x + ξ + s; clamp(y) = relu(y) − relu(y − 15).
            let w1 = Csr::from_rows(&[vec![1.0, 1.0], vec![-1.0, -1.0], vec![1.0, 1.0], vec![-1.0, -1.0]]);
            let b1 = vec![s, -s, s - TOP, TOP - s];
            let w2 = Csr::from_rows(&[vec![ra, rb, -ra, -rb]]);
            Ann::new(vec![Layer::new(w1, b1)?, Layer::new(w2, vec![0.0])?])
        })
        .collect::<Result<Vec<_>>>()?;
    let noise = NoiseLaw::atoms(vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]], vec![0.1, 0.4, 0.4, 0.1])?;
    let states = (0..16).map(|i| vec![i as f64]).collect();
    let model = MdpModel::new(
        1,
        2,
        0.5,
        beta,
        states,
        noise,
        transition_nets,
        |x: &[f64]| vec![x[0] / TOP, 0.8 - (x[0] - 8.0).abs() / 8.0],
        move |a: usize, x: &[f64], xi: &[f64]| vec![(x[0] + xi[0] + shifts[a]).clamp(0.0, TOP)],
    )?;
    // Hidden units φ(x), φ(−x), φ(x − 8), φ(8 − x).
    let w1 = Csr::from_rows(&[vec![1.0], vec![-1.0], vec![1.0], vec![-1.0]]);
    let b1 = vec![0.0, 0.0, -8.0, 8.0];
    let id = 1.0 / (TOP * (1.0 + beta));
    let abs = 1.0 / (8.0 * (1.0 - beta).abs());
    let w2 = Csr::from_rows(&[vec![id, -id, 0.0, 0.0], vec![0.0, 0.0, -abs, -abs]]);
    let g = Ann::new(vec![Layer::new(w1, b1)?, Layer::new(w2, vec![0.0, 0.8])?])?;
    Ok((model, RewardNet { net: g, eps: 0.0 }))
}

/// `F = δ ⊛ (𝐌_{|A|} • 𝔖_{|A|,2} • P_{2,(𝕀,𝕀)}(G, 𝕀_{|A|}))`, realizing `(x, r) ↦ δ max_a (G(x)(a) + r(a))`.
pub fn build_f_from_g(g: &RewardNet, discount: f64, beta: f64) -> Result<Ann> {
    let act = Activation::leaky_relu(beta)?;
    let a = g.net.output_dim();
    let id_a = identity_net(a, act)?;
    let par = parallelize_mixed(&[g.net.clone(), id_a.net().clone()], &[id_a.clone(), id_a.clone()])?;
    let summed = compose(&sum_net(a, 2), &par)?;
    let maxed = if a == 1 { summed } else { compose(&max_net(a, beta)?, &summed)? };
    Ok(scalar_mul(discount, &maxed))
}

/// Q-table indexed by `[state][action]`.
pub type QTable = Vec<Vec<f64>>;

/// Outcome of Q-value iteration.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub q: QTable,
    pub iterations: usize,
    /// Sup-norm of successive updates.
    pub updates: Vec<f64>,
}

/// Q-value iteration `q ← g + δ E[max_b q(t_a(x, ξ), b)]` on the grid, from `q = 0`, until the update is `≤ tol`.
pub fn oracle_q(model: &MdpModel, tol: f64) -> Result<OracleOutcome> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let NoiseLaw::Atoms { points, probs } = &model.noise else {
        return Err(Error::OracleDomain("oracle needs finitely many noise atoms".into()));
    };
    let (ns, na) = (model.states.len(), model.n_actions);
    let rewards: Vec<Vec<f64>> = model.states.iter().map(|x| model.reward(x)).collect();
    // next[x][a] = [(y, p)]
    let mut next = vec![vec![Vec::new(); na]; ns];
    for (xi_idx, x) in model.states.iter().enumerate() {
        for (a, row) in next[xi_idx].iter_mut().enumerate() {
            for (xi, &p) in points.iter().zip(probs) {
                row.push((model.locate(&model.transition(a, x, xi))?, p));
            }
        }
    }
    let mut q = vec![vec![0.0; na]; ns];
    let mut updates = Vec::new();
    loop {
        let vmax: Vec<f64> = q.iter().map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
        let mut diff: f64 = 0.0;
        let new: QTable = (0..ns)
            .map(|x| {
                (0..na)
                    .map(|a| {
                        let ev: f64 = next[x][a].iter().map(|&(y, p)| p * vmax[y]).sum();
                        let v = rewards[x][a] + model.discount * ev;
                        diff = diff.max((v - q[x][a]).abs());
                        v
                    })
                    .collect()
            })
            .collect();
        q = new;
        updates.push(diff);
        if diff <= tol || updates.len() > 100_000 {
            break;
        }
    }
    Ok(OracleOutcome { q, iterations: updates.len(), updates })
}

/// Q-network together with the size quantities of its construction.
#[derive(Clone, Debug)]
pub struct QNetReport {
    pub net: Ann,
    pub f_net: Ann,
    pub psi: Ann,
    pub params: u64,
    /// `2 ℒ(Q) |||𝒟(Q)|||²`.
    pub square_width_bound: u128,
    /// Bounds on `Ψ` from the MLFP construction; `None` on overflow.
    pub psi_bounds: Option<SizeBounds>,
}

/// `Q = G ⊞_{𝕀_{|A|}} Ψ` where `Ψ` is the MLFP net for the Bellman nonlinearity.
/// Derived schedules must satisfy the admissibility bound; manual ones are taken as given.
pub fn build_q_net(
    model: &MdpModel,
    g: &RewardNet,
    sched: &MlfpSchedule,
    master_seed: u64,
    theta: &ThetaKey,
) -> Result<QNetReport> {
    if g.net.input_dim() != model.d || g.net.output_dim() != model.n_actions {
        return Err(Error::Shape(format!(
            "reward net maps {} -> {}, model needs {} -> {}",
            g.net.input_dim(),
            g.net.output_dim(),
            model.d,
            model.n_actions
        )));
    }
    if sched.derived {
        sched.require_admissible(model.n_actions)?;
    }
    let act = model.act();
    let f_net = build_f_from_g(g, model.discount, model.beta)?;
    let field = model.field(master_seed)?;
    let id1 = identity_net(1, act)?;
    let psi = build_mlfp_net(&field, &f_net, &id1, sched, theta)?;
    let id_a: IdentityNet = identity_net(model.n_actions, act)?;
    let net = sum_mixed_depth(&[g.net.clone(), psi.clone()], &id_a, &[1.0, 1.0])?;
    let arch = net.describe();
    let w = arch.max_width() as u128;
    let psi_bounds = size_bounds(
        &f_net.describe(),
        &model.transition_nets[0].describe(),
        model.d,
        model.n_actions,
        sched.m,
        sched.n,
    );
    Ok(QNetReport {
        params: arch.param_count(),
        square_width_bound: 2 * arch.depth() as u128 * w * w,
        psi_bounds,
        net,
        f_net,
        psi,
    })
}

/// `L²(μ)` errors of a Q-net against a table: max over actions (primary) and Euclidean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L2Error {
    pub max_norm: f64,
    pub euclid: f64,
}

pub fn estimate_l2_error(q_net: &Ann, model: &MdpModel, q: &QTable, mu: &DiscreteMeasure) -> Result<L2Error> {
    let act = model.act();
    let (mut sm, mut se) = (0.0, 0.0);
    for (x, &p) in mu.support().iter().zip(mu.mass()) {
        let idx = model.locate(x).map_err(|_| Error::Measure(format!("μ charges {x:?}, which is off the grid")))?;
        let out = q_net.realize(&act, x)?;
        let diffs = out.iter().zip(&q[idx]).map(|(a, b)| (a - b).abs());
        let (mx, sq) = diffs.fold((0.0f64, 0.0), |(m, s), e| (m.max(e), s + e * e));
        sm += p * mx * mx;
        se += p * sq;
    }
    Ok(L2Error { max_norm: sm.sqrt(), euclid: se.sqrt() })
}

/// Uniform measure on the model grid.
pub fn uniform_on_grid(model: &MdpModel) -> Result<DiscreteMeasure> {
    let n = model.states.len();
    DiscreteMeasure::new(model.states.clone(), vec![1.0 / n as f64; n])
}
