use qnet::bellman::{build_q_net, estimate_l2_error, grid16, oracle_q, uniform_on_grid};
use qnet::mlfp::{MlfpSchedule, ThetaKey};

const SHIFTS: [f64; 2] = [-1.0, 1.0];
const NOISE: [(f64, f64); 4] = [(-2.0, 0.1), (-1.0, 0.4), (1.0, 0.4), (2.0, 0.1)];

fn reward(x: f64, a: usize) -> f64 {
    if a == 0 {
        x / 15.0
    } else {
        0.8 - (x - 8.0).abs() / 8.0
    }
}

fn next(x: f64, a: usize, xi: f64) -> usize {
    (x + SHIFTS[a] + xi).clamp(0.0, 15.0) as usize
}

#[test]
fn oracle_solves_closed_form_bellman_equation() {
    for beta in [0.0, 0.3, 2.0] {
        let (model, _) = grid16(beta).unwrap();
        let q = oracle_q(&model, 1e-13).unwrap().q;
        for x in 0..16 {
            for a in 0..2 {
                let ev: f64 = NOISE
                    .iter()
                    .map(|&(xi, p)| p * q[next(x as f64, a, xi)].iter().copied().fold(f64::NEG_INFINITY, f64::max))
                    .sum();
                let rhs = reward(x as f64, a) + 0.5 * ev;
                assert!((q[x][a] - rhs).abs() < 1e-11, "beta {beta} x {x} a {a}");
            }
        }
    }
}

#[test]
fn q_net_error_shrinks_with_level() {
    let (model, g) = grid16(0.0).unwrap();
    let q = oracle_q(&model, 1e-12).unwrap().q;
    let mu = uniform_on_grid(&model).unwrap();
    let err = |n| {
        let rep = build_q_net(&model, &g, &MlfpSchedule::manual(4, n).unwrap(), 11, &ThetaKey::new(vec![1])).unwrap();
        estimate_l2_error(&rep.net, &model, &q, &mu).unwrap().max_norm
    };
    let (e0, e3) = (err(0), err(3));
    assert!(e3 < e0, "{e3} !< {e0}");
}

#[test]
fn derived_schedule_below_budget_is_refused() {
    let (model, g) = grid16(0.0).unwrap();
    let mut sched = MlfpSchedule::derive(0.5, 2, 1.0, 0.5).unwrap();
    sched.m = 4;
    assert!(build_q_net(&model, &g, &sched.with_level(1), 0, &ThetaKey::root()).is_err());
}
