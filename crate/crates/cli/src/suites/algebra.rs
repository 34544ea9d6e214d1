// SPDX-License-Identifier: MIT

//! Randomized checks of the network algebra: realization identities and architecture formulas.

use qnet::calculus::{
    compose, copy_net, extend, identity_net, parallelize_mixed, parallelize_same_depth, power, scalar_mul,
    sum_mixed_depth, sum_net, sum_same_depth,
};
use qnet::{Activation, Ann};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::{case_rng, rand_act, rand_dims, rand_net, rand_vec, rel_err};
use crate::suite::{fmt_f, RunConfig, Suite, Table};

pub const TOL: f64 = 1e-12;

pub const OPS: [&str; 8] = ["compose", "parallelize", "power", "extend", "sum", "sum-mixed", "scalar", "fan"];

pub struct AlgebraSuite;

/// Outcome of one randomized case.
pub struct Case {
    pub rel_err: f64,
    pub arch_ok: bool,
}

/// `D(front • back) = (back_0, ..., back_{L−1}, front_1, ..., front_K)`.
fn compose_dims(front: &[usize], back: &[usize]) -> Vec<usize> {
    back[..back.len() - 1].iter().chain(&front[1..]).copied().collect()
}

/// `D(E_{L,𝕀}(Φ))` for an identity net with descriptor `(o, 2o, o)`.
fn extended_dims(dims: &[usize], target: usize) -> Vec<usize> {
    let k = target + 1 - dims.len();
    if k == 0 {
        return dims.to_vec();
    }
    let o = *dims.last().unwrap();
    let mut d = dims[..dims.len() - 1].to_vec();
    d.extend(std::iter::repeat_n(2 * o, k));
    d.push(o);
    d
}

fn realize(net: &Ann, act: &Activation, x: &[f64]) -> Vec<f64> {
    net.realize(act, x).expect("input length matches")
}

fn case_compose(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let mid = rng.random_range(1..=4);
    let (bi, bl) = (rng.random_range(1..=4), rng.random_range(1..=3));
    let db = rand_dims(rng, bi, mid, bl, 5);
    let (fo, fl) = (rng.random_range(1..=4), rng.random_range(1..=3));
    let df = rand_dims(rng, mid, fo, fl, 5);
    let (f, g) = (rand_net(rng, &df), rand_net(rng, &db));
    let h = compose(&f, &g).unwrap();
    let x = rand_vec(rng, db[0], 2.0);
    let want = realize(&f, act, &realize(&g, act, &x));
    let (k1, k0, l_last, l_prev) = (df[1] as u64, df[0] as u64, db[db.len() - 1] as u64, db[db.len() - 2] as u64);
    let size = f.param_count() + g.param_count() + k1 * (l_prev + 1) - k1 * (k0 + 1) - l_last * (l_prev + 1);
    let arch_ok = h.describe().dims == compose_dims(&df, &db)
        && h.depth() == f.depth() + g.depth() - 1
        && h.param_count() == size
        && h.param_count() <= f.param_count() + g.param_count() + k1 * l_prev;
    Case { rel_err: rel_err(&realize(&h, act, &x), &want), arch_ok }
}

fn case_parallelize(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let n = rng.random_range(1..=4);
    let mixed = rng.random_bool(0.5);
    let depth = rng.random_range(1..=3);
    let dims: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let dp = if mixed { rng.random_range(1..=3) } else { depth };
            let (i, o) = (rng.random_range(1..=3), rng.random_range(1..=3));
            rand_dims(rng, i, o, dp, 4)
        })
        .collect();
    let nets: Vec<Ann> = dims.iter().map(|d| rand_net(rng, d)).collect();
    let xs: Vec<Vec<f64>> = dims.iter().map(|d| rand_vec(rng, d[0], 2.0)).collect();
    let want: Vec<f64> = nets.iter().zip(&xs).flat_map(|(n, x)| realize(n, act, x)).collect();
    let (p, expect_dims) = if mixed {
        let ids: Vec<_> = dims.iter().map(|d| identity_net(*d.last().unwrap(), *act).unwrap()).collect();
        let l = dims.iter().map(|d| d.len() - 1).max().unwrap();
        let ext: Vec<Vec<usize>> = dims.iter().map(|d| extended_dims(d, l)).collect();
        let sums = (0..=l).map(|k| ext.iter().map(|d| d[k]).sum()).collect::<Vec<usize>>();
        (parallelize_mixed(&nets, &ids).unwrap(), sums)
    } else {
        let sums = (0..=depth).map(|k| dims.iter().map(|d| d[k]).sum()).collect::<Vec<usize>>();
        (parallelize_same_depth(&nets).unwrap(), sums)
    };
    let got = realize(&p, act, &xs.concat());
    Case { rel_err: rel_err(&got, &want), arch_ok: p.describe().dims == expect_dims }
}

fn case_power(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let d = rng.random_range(1..=3);
    let depth = rng.random_range(1..=3);
    let dims = rand_dims(rng, d, d, depth, 4);
    let net = rand_net(rng, &dims);
    let n = rng.random_range(0..=3);
    let p = power(&net, n).unwrap();
    let mut x = rand_vec(rng, d, 2.0);
    let got = realize(&p, act, &x);
    for _ in 0..n {
        x = realize(&net, act, &x);
    }
    let mut expect = vec![d, d];
    for _ in 0..n {
        expect = compose_dims(&dims, &expect);
    }
    let depth = if n == 0 { 1 } else { n * (net.depth() - 1) + 1 };
    // Depth-2 square nets follow the closed form (d, l, ..., l, d).
    let closed = dims.len() != 3 || n == 0 || {
        let mut c = vec![d];
        c.extend(std::iter::repeat_n(dims[1], n));
        c.push(d);
        c == expect
    };
    Case { rel_err: rel_err(&got, &x), arch_ok: p.describe().dims == expect && p.depth() == depth && closed }
}

fn case_extend(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let o = rng.random_range(1..=3);
    let (i, depth) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let dims = rand_dims(rng, i, o, depth, 4);
    let net = rand_net(rng, &dims);
    let id = identity_net(o, *act).unwrap();
    let target = net.depth() + rng.random_range(0..=3);
    let e = extend(target, &id, &net).unwrap();
    let x = rand_vec(rng, dims[0], 2.0);
    let (l, d) = (2 * o as u64, o as u64);
    let p = net.param_count();
    let bound = if target == net.depth() {
        p
    } else {
        (l.max(d) * p).div_ceil(d) + ((target - net.depth() - 1) as u64 * l + d) * (l + 1)
    };
    let arch_ok = e.depth() == target
        && e.describe().dims == extended_dims(&dims, target)
        && e.param_count() <= bound
        && (target != net.depth() || e == net);
    Case { rel_err: rel_err(&realize(&e, act, &x), &realize(&net, act, &x)), arch_ok }
}

fn case_sum(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let n = rng.random_range(1..=4);
    let (i, o, depth) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
    let dims: Vec<Vec<usize>> = (0..n).map(|_| rand_dims(rng, i, o, depth, 4)).collect();
    let nets: Vec<Ann> = dims.iter().map(|d| rand_net(rng, d)).collect();
    let s = sum_same_depth(&nets).unwrap();
    let x = rand_vec(rng, i, 2.0);
    let mut want = vec![0.0; o];
    for n in &nets {
        want.iter_mut().zip(realize(n, act, &x)).for_each(|(a, b)| *a += b);
    }
    let mut expect = vec![i];
    expect.extend((1..depth).map(|k| dims.iter().map(|d| d[k]).sum::<usize>()));
    expect.push(o);
    Case { rel_err: rel_err(&realize(&s, act, &x), &want), arch_ok: s.describe().dims == expect }
}

fn case_sum_mixed(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let n = rng.random_range(1..=4);
    let (i, o) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let dims: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let depth = rng.random_range(1..=3);
            rand_dims(rng, i, o, depth, 4)
        })
        .collect();
    let nets: Vec<Ann> = dims.iter().map(|d| rand_net(rng, d)).collect();
    let h = rand_vec(rng, n, 2.0);
    let id = identity_net(o, *act).unwrap();
    let s = sum_mixed_depth(&nets, &id, &h).unwrap();
    let x = rand_vec(rng, i, 2.0);
    let mut want = vec![0.0; o];
    for (n, c) in nets.iter().zip(&h) {
        want.iter_mut().zip(realize(n, act, &x)).for_each(|(a, b)| *a += c * b);
    }
    let l = dims.iter().map(|d| d.len() - 1).max().unwrap();
    let ext: Vec<Vec<usize>> = dims.iter().map(|d| extended_dims(d, l)).collect();
    let mut expect = vec![i];
    expect.extend((1..l).map(|k| ext.iter().map(|d| d[k]).sum::<usize>()));
    expect.push(o);
    Case { rel_err: rel_err(&realize(&s, act, &x), &want), arch_ok: s.describe().dims == expect && s.depth() == l }
}

fn case_scalar(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let (i, o, depth) = (rng.random_range(1..=3), rng.random_range(1..=3), rng.random_range(1..=3));
    let dims = rand_dims(rng, i, o, depth, 4);
    let net = rand_net(rng, &dims);
    let alpha = rng.random_range(-3.0..3.0);
    let s = scalar_mul(alpha, &net);
    let x = rand_vec(rng, dims[0], 2.0);
    let want: Vec<f64> = realize(&net, act, &x).iter().map(|v| alpha * v).collect();
    Case { rel_err: rel_err(&realize(&s, act, &x), &want), arch_ok: s.describe().dims == dims }
}

fn case_fan(rng: &mut ChaCha20Rng, act: &Activation) -> Case {
    let (m, n) = (rng.random_range(1..=4), rng.random_range(1..=4));
    let (s, t) = (sum_net(m, n), copy_net(m, n));
    let xs = rand_vec(rng, m * n, 2.0);
    let want_s: Vec<f64> = (0..m).map(|j| (0..n).map(|i| xs[i * m + j]).sum()).collect();
    let x = rand_vec(rng, m, 2.0);
    let want_t = x.repeat(n);
    let err = rel_err(&realize(&s, act, &xs), &want_s).max(rel_err(&realize(&t, act, &x), &want_t));
    Case { rel_err: err, arch_ok: s.describe().dims == vec![m * n, m] && t.describe().dims == vec![m, m * n] }
}

/// Runs case `case` of operation `op`.
pub fn run_case(seed: u64, op: usize, case: usize) -> Case {
    let mut rng = case_rng(seed, 100 + op as i64, case);
    let act = rand_act(&mut rng);
    let f = match OPS[op] {
        "compose" => case_compose,
        "parallelize" => case_parallelize,
        "power" => case_power,
        "extend" => case_extend,
        "sum" => case_sum,
        "sum-mixed" => case_sum_mixed,
        "scalar" => case_scalar,
        _ => case_fan,
    };
    f(&mut rng, &act)
}

impl Suite for AlgebraSuite {
    fn name(&self) -> &'static str {
        "algebra-suite"
    }

    fn about(&self) -> &'static str {
        "randomized realization and architecture checks for every network operation"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let cases = cfg.cases.unwrap_or(1000);
        let tol = cfg.tol.unwrap_or(TOL);
        let mut t = Table::new(&["op", "case", "rel_err", "arch_ok", "pass"]);
        for (op, name) in OPS.iter().enumerate() {
            let results: Vec<Case> = (0..cases).into_par_iter().map(|c| run_case(cfg.seed, op, c)).collect();
            let mut worst: f64 = 0.0;
            for (c, r) in results.iter().enumerate() {
                worst = worst.max(r.rel_err);
                let pass = r.rel_err <= tol && r.arch_ok;
                t.push(vec![name.to_string(), c.to_string(), fmt_f(r.rel_err), r.arch_ok.to_string()], pass);
            }
            t.note(&format!("max_rel_err:{name}"), worst.into());
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_helpers() {
        assert_eq!(compose_dims(&[3, 5, 2], &[4, 6, 3]), vec![4, 6, 5, 2]);
        assert_eq!(extended_dims(&[3, 4, 2], 4), vec![3, 4, 4, 4, 2]);
        assert_eq!(extended_dims(&[3, 2], 1), vec![3, 2]);
    }

    #[test]
    fn a_few_cases_per_op() {
        for (op, name) in OPS.iter().enumerate() {
            for c in 0..20 {
                let r = run_case(7, op, c);
                assert!(r.rel_err <= TOL && r.arch_ok, "{name} case {c}: {}", r.rel_err);
            }
        }
    }
}
