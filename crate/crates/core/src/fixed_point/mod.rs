// SPDX-License-Identifier: MIT

//! Finite-instance oracles for stochastic fixed-point equations: Wasserstein-1
//! distances, Picard solutions and the stability inequalities.

mod checks;
mod kernel;
pub mod lp;
mod measure;
mod picard;
pub mod random;

pub use checks::{
    check_combined, check_kernel_stability, check_nonlinearity_stability, check_solution_lipschitz, BoundReport,
    Constants, KernelReport, SLACK,
};
pub use kernel::{probe_set, DiscreteKernelInstance, Nonlinearity, ValueTable};
pub use measure::{euclid, w1_1d, w1_discrete, w1_lp, DiscreteMeasure, MAX_SUPPORT};
pub use picard::{apply_operator, picard_solve, residual, PicardOutcome};

#[cfg(test)]
mod tests {
    use super::*;

    fn single(f: Nonlinearity) -> (DiscreteKernelInstance, Nonlinearity) {
        let inst = DiscreteKernelInstance::new(vec![vec![0.0]], vec![vec![vec![1.0]]], vec![1.0]).unwrap();
        (inst, f)
    }

    #[test]
    fn zero_nonlinearity_gives_zero() {
        let inst = random::random_instance(&mut rand_chacha::ChaCha8Rng::seed_from_u64(1), 2);
        let out = picard_solve(&inst, &Nonlinearity::new(0.0, 0.0, |_, _| 0.0), 1e-12).unwrap();
        assert!(out.u.iter().flatten().all(|v| *v == 0.0));
    }

    use rand::SeedableRng;

    #[test]
    fn one_state_affine() {
        // u = 1 + u/2 has the unique solution 2.
        let (inst, f) = single(Nonlinearity::new(0.5, 0.0, |_, r| 1.0 + 0.5 * r[0]));
        let out = picard_solve(&inst, &f, 1e-13).unwrap();
        assert!((out.u[0][0] - 2.0).abs() < 1e-12);
        assert!(residual(&inst, &f, &out.u) <= 1e-13);
    }

    #[test]
    fn two_state_bellman_matches_value_iteration() {
        let p = vec![vec![vec![0.9, 0.1], vec![0.2, 0.8]], vec![vec![0.3, 0.7], vec![0.6, 0.4]]];
        let inst = DiscreteKernelInstance::new(vec![vec![0.0], vec![1.0]], p.clone(), vec![1.0, 1.0]).unwrap();
        let g = [[1.0, 0.0], [0.0, 2.0]];
        let states = [0.0, 1.0];
        let f = Nonlinearity::new(0.5, 10.0, move |y, r| {
            let s = if y[0] == states[0] { 0 } else { 1 };
            0.5 * (g[s][0] + r[0]).max(g[s][1] + r[1])
        });
        let u = picard_solve(&inst, &f, 1e-13).unwrap().u;
        // Independent route: q = g + 0.5 P max q, iterated densely.
        let mut q = [[0.0f64; 2]; 2];
        for _ in 0..200 {
            let mut next = [[0.0; 2]; 2];
            for x in 0..2 {
                for a in 0..2 {
                    next[x][a] = g[x][a] + 0.5 * (0..2).map(|y| p[a][x][y] * q[y][0].max(q[y][1])).sum::<f64>();
                }
            }
            q = next;
        }
        for x in 0..2 {
            for a in 0..2 {
                assert!((u[x][a] - (q[x][a] - g[x][a])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_contraction_rejected() {
        let (inst, f) = single(Nonlinearity::new(1.0, 0.0, |_, r| r[0]));
        assert!(matches!(picard_solve(&inst, &f, 1e-9), Err(crate::Error::NoContraction(_))));
        let (inst, f) = single(Nonlinearity::new(0.5, 0.0, |_, r| r[0]));
        assert!(matches!(picard_solve(&inst, &f, 0.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn shifted_nonlinearity_bound() {
        // f2 = f1 + ε on one state with w = 1: u2 − u1 = ε/(1 − L) and the bound is c ε/(1 − cL) with c = 1.
        let eps = 0.01;
        let (inst, f1) = single(Nonlinearity::new(0.5, 0.0, |_, r| 1.0 + 0.5 * r[0]));
        let f2 = Nonlinearity::new(0.5, 0.0, move |_, r| 1.0 + eps + 0.5 * r[0]);
        let rep = check_nonlinearity_stability(&inst, &f1, &f2).unwrap();
        assert!((rep.lhs - eps / 0.5).abs() < 1e-10);
        assert!((rep.rhs - eps / 0.5).abs() < 1e-10);
        assert!(rep.pass);
        let same = check_nonlinearity_stability(&inst, &f1, &f1).unwrap();
        assert_eq!(same.lhs, 0.0);
    }

    #[test]
    fn identical_kernels_give_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let inst = random::random_instance(&mut rng, 1);
        let lam = 0.5 / inst.contraction_c().max(inst.kernel_lipschitz().unwrap()).max(1.0);
        let f = random::SeparableParams::random(&mut rng, 1, inst.n_actions(), lam).build();
        let rep = check_kernel_stability(&inst, &inst, &f).unwrap();
        assert_eq!(rep.kernel.lhs, 0.0);
        assert!(rep.kernel.pass && rep.combined.pass);
    }

    #[test]
    fn state_independent_solution_is_flat() {
        // Every row equal: the solution does not depend on the state.
        let row = vec![0.2, 0.5, 0.3];
        let p = vec![vec![row.clone(), row.clone(), row]];
        let inst = DiscreteKernelInstance::new(vec![vec![0.0], vec![1.0], vec![2.0]], p, vec![1.0; 3]).unwrap();
        let f = Nonlinearity::new(0.4, 0.0, |_, r| 2.0 + 0.4 * r[0]);
        let rep = check_solution_lipschitz(&inst, &f).unwrap();
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.lhs <= 1e-14 && rep.pass);
    }

    #[test]
    fn shift_kernel_on_grid() {
        // Deterministic right shift on {0,...,4} (clamped): W1 between rows is at most |x − y|.
        let n = 5;
        let p: Vec<Vec<f64>> =
            (0..n).map(|x| (0..n).map(|y| if y == (x + 1).min(n - 1) { 1.0 } else { 0.0 }).collect()).collect();
        let states: Vec<Vec<f64>> = (0..n).map(|x| vec![x as f64]).collect();
        let inst = DiscreteKernelInstance::new(states, vec![p], vec![1.0; n]).unwrap();
        assert!((inst.kernel_lipschitz().unwrap() - 1.0).abs() < 1e-12);
        let f = Nonlinearity::new(0.5, 1.0, |x, r| (x[0]).sin() + 0.5 * r[0]);
        assert!(check_solution_lipschitz(&inst, &f).unwrap().pass);
    }

    #[test]
    fn mass_swap_perturbation() {
        let states = vec![vec![0.0], vec![1.0], vec![2.0]];
        let p1 = vec![vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]]];
        let p2 = vec![vec![vec![0.49, 0.31, 0.2], vec![0.1, 0.8, 0.1], vec![0.3, 0.29, 0.41]]];
        let i1 = DiscreteKernelInstance::new(states.clone(), p1, vec![1.0; 3]).unwrap();
        let i2 = DiscreteKernelInstance::new(states, p2, vec![1.0; 3]).unwrap();
        let f = Nonlinearity::new(0.5, 1.0, |x, r| x[0].cos() + 0.5 * r[0]);
        let rep = check_kernel_stability(&i1, &i2, &f).unwrap();
        assert!(rep.kernel.lhs > 0.0 && rep.kernel.pass && rep.combined.pass);
    }
}
