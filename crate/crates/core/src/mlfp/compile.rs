// SPDX-License-Identifier: MIT

//! Compilation of the MLFP estimator into a single network `Φ_n^θ`.

use rayon::prelude::*;

use super::field::RandomFieldSpec;
use super::schedule::MlfpSchedule;
use super::theta::ThetaKey;
use crate::ann::Ann;
use crate::calculus::{compose, copy_net, parallelize_mixed, parallelize_same_depth, sum_mixed_depth, IdentityNet};
use crate::error::{Error, Result};
use crate::sparse::Csr;

struct Ctx<'a> {
    field: &'a RandomFieldSpec,
    f_net: &'a Ann,
    id1: &'a IdentityNet,
    id_d: IdentityNet,
    id_a: IdentityNet,
    m: u64,
}

impl Ctx<'_> {
    fn d(&self) -> usize {
        self.field.state_dim()
    }

    fn n_actions(&self) -> usize {
        self.field.n_actions()
    }

    /// `Ξ_n^θ: x ↦ (x, Φ_n^θ(x))`.
    fn xi(&self, n: usize, theta: &ThetaKey) -> Result<Ann> {
        let (d, a) = (self.d(), self.n_actions());
        if n == 0 {
            let w = Csr::vstack(&[&Csr::identity(d), &Csr::zeros(a, d)]);
            return Ann::affine(w, vec![0.0; d + a]);
        }
        let phi = self.phi(n, theta)?;
        let par = parallelize_mixed(&[self.id_d.net().clone(), phi], &[self.id_d.clone(), self.id_a.clone()])?;
        compose(&par, &copy_net(d, 2))
    }

    fn phi(&self, n: usize, theta: &ThetaKey) -> Result<Ann> {
        let (d, a_count) = (self.d(), self.n_actions());
        if n == 0 {
            let zeros = vec![Ann::zero(d, 1); a_count];
            return compose(&parallelize_same_depth(&zeros)?, &copy_net(d, a_count));
        }
        // Inner nets for (θ, l, i) and (θ, −l, i), shared by every action.
        let levels: Vec<(Vec<Ann>, Vec<Ann>)> = (0..n)
            .map(|l| {
                let count = self.m.pow((n - l) as u32);
                let plus: Vec<Ann> = (1..=count)
                    .into_par_iter()
                    .map(|i| self.xi(l, &theta.child(l as i64, i)))
                    .collect::<Result<_>>()?;
                let minus: Vec<Ann> = if l >= 1 {
                    (1..=count)
                        .into_par_iter()
                        .map(|i| self.xi(l - 1, &theta.child(-(l as i64), i)))
                        .collect::<Result<_>>()?
                } else {
                    Vec::new()
                };
                Ok((plus, minus))
            })
            .collect::<Result<_>>()?;
        let per_action = (0..a_count).map(|a| self.lambda(n, theta, a, &levels)).collect::<Result<Vec<_>>>()?;
        compose(&parallelize_same_depth(&per_action)?, &copy_net(d, a_count))
    }

    /// `Λ_n^{θ,a} = Γ^0 ⊞ Γ^1` (just `Γ^0` when `n = 1`).
    fn lambda(&self, n: usize, theta: &ThetaKey, a: usize, levels: &[(Vec<Ann>, Vec<Ann>)]) -> Result<Ann> {
        let mut g0 = Vec::with_capacity(n);
        let mut g1 = Vec::with_capacity(n);
        let mut c0 = Vec::with_capacity(n);
        let mut c1 = Vec::with_capacity(n);
        for (l, (plus, minus)) in levels.iter().enumerate() {
            let count = self.m.pow((n - l) as u32);
            let h = 1.0 / count as f64;
            let xs = (1..=count).map(|i| self.field.x_net(&theta.child(l as i64, i), a)).collect::<Result<Vec<_>>>()?;
            g0.push(self.psi(plus, &xs)?);
            c0.push(h);
            if l >= 1 {
                g1.push(self.psi(minus, &xs)?);
                c1.push(-h);
            }
        }
        let gamma0 = sum_mixed_depth(&g0, self.id1, &c0)?;
        if g1.is_empty() {
            return Ok(gamma0);
        }
        let gamma1 = sum_mixed_depth(&g1, self.id1, &c1)?;
        sum_mixed_depth(&[gamma0, gamma1], self.id1, &[1.0, 1.0])
    }

    /// `Ψ = ⊞_i (F • Ξ_i • X_i)`.
    fn psi(&self, xis: &[Ann], xs: &[Ann]) -> Result<Ann> {
        let terms =
            xis.par_iter().zip(xs).map(|(xi, x)| compose(self.f_net, &compose(xi, x)?)).collect::<Result<Vec<_>>>()?;
        sum_mixed_depth(&terms, self.id1, &vec![1.0; terms.len()])
    }
}

/// `Φ_n^θ: ℝ^d → ℝ^{|A|}` realizing `U_n^θ` when `F` is realized by `f_net`.
pub fn build_mlfp_net(
    field: &RandomFieldSpec,
    f_net: &Ann,
    id1: &IdentityNet,
    sched: &MlfpSchedule,
    theta: &ThetaKey,
) -> Result<Ann> {
    let (d, a) = (field.state_dim(), field.n_actions());
    if f_net.input_dim() != d + a || f_net.output_dim() != 1 {
        return Err(Error::Shape(format!(
            "F must map ℝ^{} to ℝ, got {} -> {}",
            d + a,
            f_net.input_dim(),
            f_net.output_dim()
        )));
    }
    if id1.dim() != 1 {
        return Err(Error::Shape(format!("scalar identity net expected, got dimension {}", id1.dim())));
    }
    if id1.act() != field.act() {
        return Err(Error::InvalidActivation("identity net and field use different activations".into()));
    }
    let stack = |k: usize| IdentityNet::new(parallelize_same_depth(&vec![id1.net().clone(); k])?, id1.act());
    let ctx = Ctx { field, f_net, id1, id_d: stack(d)?, id_a: stack(a)?, m: sched.m };
    ctx.phi(sched.n, theta)
}
