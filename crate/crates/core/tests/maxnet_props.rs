use proptest::prelude::*;
use qnet::maxnet::max_net;
use qnet::Activation;

fn beta() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..0.95f64, 1.05..4.0f64]
}

proptest! {
    #[test]
    fn realizes_the_maximum(b in beta(), x in prop::collection::vec(-1e3..1e3f64, 2..40)) {
        let net = max_net(x.len(), b).unwrap();
        let want = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let got = net.realize(&Activation::LeakyRelu { beta: b }, &x).unwrap()[0];
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn permutation_invariant(b in beta(), x in prop::collection::vec(-10.0..10.0f64, 2..20), k in 0usize..20) {
        let net = max_net(x.len(), b).unwrap();
        let act = Activation::LeakyRelu { beta: b };
        let mut y = x.clone();
        y.rotate_left(k % x.len());
        let (a, c) = (net.realize(&act, &x).unwrap()[0], net.realize(&act, &y).unwrap()[0]);
        prop_assert!((a - c).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn logarithmic_depth_and_linear_width(m in 2usize..300) {
        let a = max_net(m, 0.0).unwrap().describe();
        let log2 = (usize::BITS - (m - 1).leading_zeros()) as usize;
        prop_assert_eq!(a.depth(), log2 + 1);
        prop_assert!(a.max_width() <= 2 * m);
    }
}

#[test]
fn slope_one_is_rejected() {
    assert!(max_net(4, 1.0).is_err());
}
