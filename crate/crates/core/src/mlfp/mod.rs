// SPDX-License-Identifier: MIT

//! Multilevel fixed-point (MLFP) approximations: per-index random fields,
//! schedules, direct evaluation and compilation into networks.

mod bounds;
mod compile;
mod evaluate;
mod field;
mod schedule;
mod theta;

pub use bounds::{f_copy_count, size_bounds, SizeBounds};
pub use compile::build_mlfp_net;
pub use evaluate::{f_call_count, mlfp_evaluate, mlfp_evaluate_par, EvalMap};
pub use field::{build_shock_net, NoiseLaw, RandomFieldSpec};
pub use schedule::{
    alpha, bellman_accuracy_split, gamma, general_accuracy_split, level_bound, level_for_accuracy, min_budget,
    MlfpSchedule,
};
pub use theta::{stream, stream_seed, ThetaKey};

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::calculus::identity_net;
    use crate::{Activation, Ann, Csr, Layer};

    fn rand_net(dims: &[usize], rng: &mut ChaCha8Rng, scale: f64) -> Ann {
        let layers = dims
            .windows(2)
            .map(|w| {
                let v: Vec<f64> = (0..w[0] * w[1]).map(|_| rng.random_range(-scale..scale)).collect();
                let b = (0..w[1]).map(|_| rng.random_range(-0.5..0.5)).collect();
                Layer::new(Csr::from_dense(w[1], w[0], &v), b).unwrap()
            })
            .collect();
        Ann::new(layers).unwrap()
    }

    fn setup(d: usize, a: usize, act: Activation, seed: u64) -> (RandomFieldSpec, Ann) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = (0..a).map(|_| rand_net(&[2 * d, 3, d], &mut rng, 0.8)).collect();
        let field = RandomFieldSpec::new(seed, t, NoiseLaw::Uniform { dim: d, lo: -1.0, hi: 1.0 }, act).unwrap();
        (field, rand_net(&[d + a, 4, 1], &mut rng, 0.5))
    }

    #[test]
    fn compiled_net_matches_recursion() {
        for act in [Activation::LeakyRelu { beta: 0.2 }, Activation::Softplus] {
            let (field, f_net) = setup(2, 2, act, 3);
            let id1 = identity_net(1, act).unwrap();
            let f = |y: &[f64], r: &[f64]| f_net.realize(&act, &[y, r].concat()).unwrap()[0];
            let theta = ThetaKey::root();
            for n in 0..=3 {
                let sched = MlfpSchedule::manual(2, n).unwrap();
                let net = build_mlfp_net(&field, &f_net, &id1, &sched, &theta).unwrap();
                for x in [[0.3, -0.7], [1.5, 0.2]] {
                    let direct = mlfp_evaluate(&field, &f, &sched, &theta, &x).unwrap();
                    let compiled = net.realize(&act, &x).unwrap();
                    for (p, q) in direct.iter().zip(&compiled) {
                        assert!((p - q).abs() <= 1e-10 * (1.0 + p.abs()), "n = {n}: {p} vs {q}");
                    }
                }
                let sb = size_bounds(&f_net.describe(), &field.transitions()[0].describe(), 2, 2, 2, n).unwrap();
                let arch = net.describe();
                assert!(arch.depth() as u128 <= sb.depth && arch.max_width() as u128 <= sb.width);
                assert!(arch.param_count() as u128 <= sb.params);
            }
        }
    }

    #[test]
    fn parallel_matches_serial_bitwise() {
        let act = Activation::LeakyRelu { beta: 0.1 };
        let (field, f_net) = setup(1, 3, act, 8);
        let f = |y: &[f64], r: &[f64]| f_net.realize(&act, &[y, r].concat()).unwrap()[0];
        let sched = MlfpSchedule::manual(3, 3).unwrap();
        let theta = ThetaKey::new(vec![4, -1]);
        let a = mlfp_evaluate(&field, &f, &sched, &theta, &[0.25]).unwrap();
        let b = mlfp_evaluate_par(&field, &f, &sched, &theta, &[0.25]).unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn call_count_matches_instrumentation() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let act = Activation::Softplus;
        let (field, _) = setup(1, 2, act, 1);
        let calls = AtomicU64::new(0);
        let f = |_: &[f64], r: &[f64]| {
            calls.fetch_add(1, Ordering::Relaxed);
            0.5 * r[0] + 1.0
        };
        for n in 0..4 {
            calls.store(0, Ordering::Relaxed);
            mlfp_evaluate(&field, &f, &MlfpSchedule::manual(2, n).unwrap(), &ThetaKey::root(), &[0.0]).unwrap();
            assert_eq!(calls.load(Ordering::Relaxed) as u128, f_call_count(2, 2, n).unwrap());
        }
    }

    #[test]
    fn oversized_budget_is_rejected() {
        let (field, _) = setup(1, 2, Activation::Softplus, 1);
        let f = |_: &[f64], _: &[f64]| 0.0;
        let sched = MlfpSchedule::manual(1 << 20, 4).unwrap();
        assert!(matches!(mlfp_evaluate(&field, &f, &sched, &ThetaKey::root(), &[0.0]), Err(crate::Error::Budget(_))));
    }

    #[test]
    fn level_zero_is_zero() {
        let act = Activation::Softplus;
        let (field, f_net) = setup(2, 3, act, 2);
        let sched = MlfpSchedule::manual(5, 0).unwrap();
        let net = build_mlfp_net(&field, &f_net, &identity_net(1, act).unwrap(), &sched, &ThetaKey::root()).unwrap();
        assert_eq!(net.describe().dims, vec![2, 3]);
        assert_eq!(net.realize(&act, &[1.0, 2.0]).unwrap(), vec![0.0; 3]);
    }
}
