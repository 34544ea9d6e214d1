use proptest::prelude::*;
use qnet::calculus::identity_net;
use qnet::mlfp::{
    build_mlfp_net, mlfp_evaluate, mlfp_evaluate_par, stream, MlfpSchedule, NoiseLaw, RandomFieldSpec, ThetaKey,
};
use qnet::{Activation, Ann, Csr, Layer};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rand_net(rng: &mut ChaCha20Rng, dims: &[usize]) -> Ann {
    let layers = dims
        .windows(2)
        .map(|w| {
            let vals: Vec<f64> = (0..w[0] * w[1]).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = (0..w[1]).map(|_| rng.random_range(-0.5..0.5)).collect();
            Layer::new(Csr::from_dense(w[1], w[0], &vals), b).unwrap()
        })
        .collect();
    Ann::new(layers).unwrap()
}

fn setup(seed: u64, d: usize, actions: usize, act: Activation) -> (RandomFieldSpec, Ann) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ts = (0..actions).map(|_| rand_net(&mut rng, &[2 * d, 3, d])).collect();
    let noise = NoiseLaw::atoms(vec![vec![-0.5; d], vec![0.25; d], vec![1.0; d]], vec![0.2, 0.5, 0.3]).unwrap();
    let field = RandomFieldSpec::new(rng.random(), ts, noise, act).unwrap();
    (field, rand_net(&mut rng, &[d + actions, 3, 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn compiled_net_matches_recursion(seed in any::<u64>(), d in 1usize..3, actions in 1usize..3, n in 0usize..3, beta in 0.0..0.9f64) {
        let act = Activation::LeakyRelu { beta };
        let (field, f_net) = setup(seed, d, actions, act);
        let sched = MlfpSchedule::manual(2, n).unwrap();
        let theta = ThetaKey::new(vec![seed as i64 % 97]);
        let net = build_mlfp_net(&field, &f_net, &identity_net(1, act).unwrap(), &sched, &theta).unwrap();
        let f = |y: &[f64], r: &[f64]| f_net.realize(&act, &[y, r].concat()).unwrap()[0];
        for k in 0..5 {
            let x: Vec<f64> = (0..d).map(|i| (k as f64 - 2.0) * 0.7 + i as f64).collect();
            let direct = mlfp_evaluate(&field, &f, &sched, &theta, &x).unwrap();
            let par = mlfp_evaluate_par(&field, &f, &sched, &theta, &x).unwrap();
            prop_assert_eq!(&direct, &par);
            for (p, q) in direct.iter().zip(&net.realize(&act, &x).unwrap()) {
                prop_assert!((p - q).abs() <= 1e-9 * (1.0 + p.abs()));
            }
        }
    }

    #[test]
    fn streams_depend_only_on_seed_and_index(seed in any::<u64>(), t in prop::collection::vec(-9i64..9, 1..4)) {
        let key = ThetaKey::new(t.clone());
        prop_assert_eq!(stream(seed, &key).next_u64(), stream(seed, &key).next_u64());
        let mut other = t;
        other.push(0);
        prop_assert_ne!(stream(seed, &key).next_u64(), stream(seed, &ThetaKey::new(other)).next_u64());
    }
}
