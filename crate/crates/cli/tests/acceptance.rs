// SPDX-License-Identifier: MIT

//! Acceptance criteria 1–9, one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qnet::mlfp::{level_bound, level_for_accuracy, min_budget, MlfpSchedule};
use qnet_cli::{registry, RunConfig, Table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, pass: bool, detail: String) {
        println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed += 1;
        }
    }
}

fn run(name: &str, cfg: &RunConfig) -> (Table, Duration) {
    let t0 = Instant::now();
    let table = registry().get(name).expect("registered suite").run(cfg).unwrap_or_else(|e| panic!("{name}: {e:#}"));
    (table, t0.elapsed())
}

fn col(t: &Table, name: &str) -> usize {
    t.header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap_or_else(|_| panic!("not a number: {cell:?}"))
}

fn all_pass(t: &Table, rows: &[&Vec<String>]) -> bool {
    let p = col(t, "pass");
    !rows.is_empty() && rows.iter().all(|r| r[p] == "true")
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn algebra(rep: &mut Report) {
    let (t, dt) = run("algebra-suite", &RunConfig { cases: Some(1000), ..RunConfig::default() });
    let op = col(&t, "op");
    let mut per_op: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &t.rows {
        *per_op.entry(r[op].as_str()).or_default() += 1;
    }
    let rows: Vec<_> = t.rows.iter().collect();
    let ok =
        all_pass(&t, &rows) && per_op.len() == 8 && per_op.values().all(|&c| c == 1000) && dt < Duration::from_secs(30);
    rep.line(1, ok, format!("{} ops x 1000 cases, {} failures, {}", per_op.len(), t.failures, secs(dt)));
}

fn maxnet(rep: &mut Report) {
    let (t, dt) = run("maxnet-suite", &RunConfig::default());
    let (m, s) = (col(&t, "m"), col(&t, "samples"));
    let rows: Vec<_> = t.rows.iter().collect();
    let sampled = t.rows.iter().filter(|r| num(&r[m]) <= 64.0 && r[s] == "10000").count();
    let ok = all_pass(&t, &rows) && rows.len() == 255 && sampled == 63 && dt < Duration::from_secs(60);
    rep.line(2, ok, format!("m=2..256 ({} sampled at 1e4), {} failures, {}", sampled, t.failures, secs(dt)));
}

fn mlfp(rep: &mut Report) {
    let (t, dt) = run("mlfp-equiv", &RunConfig::default());
    let (err, inv, pairs, n) =
        (col(&t, "max_rel_err"), col(&t, "theta_invariant"), col(&t, "theta_pairs"), col(&t, "n"));
    let worst = t.rows.iter().map(|r| num(&r[err])).fold(0.0, f64::max);
    let invariant = t.rows.iter().all(|r| r[inv] == "true");
    let reduced = t.rows.iter().filter(|r| r[pairs] != "20").count();
    let levels = t.rows.iter().map(|r| r[n].clone()).collect::<std::collections::BTreeSet<_>>().len();
    let ok =
        t.rows.len() == 5 * 3 * 2 * 5 && levels == 5 && worst <= 1e-9 && invariant && dt < Duration::from_secs(120);
    rep.line(
        3,
        ok,
        format!(
            "{} configs, max rel err {worst:e}, theta-invariant {invariant} ({reduced} configs with reduced pairs), {}",
            t.rows.len(),
            secs(dt)
        ),
    );
    let le = |a: &str, b: &str| t.rows.iter().all(|r| num(&r[col(&t, a)]) <= num(&r[col(&t, b)]));
    let (depth, width, params) = (le("depth", "depth_bound"), le("width", "width_bound"), le("params", "params_bound"));
    rep.line(
        4,
        depth && width && params,
        format!("depth {depth}, width {width}, params {params} on {} configs", t.rows.len()),
    );
}

fn stability(rep: &mut Report) {
    let (t, dt) = run("stability-suite", &RunConfig { cases: Some(50), ..RunConfig::default() });
    let c = col(&t, "check");
    let pick = |names: &[&str]| t.rows.iter().filter(|r| names.contains(&r[c].as_str())).collect::<Vec<_>>();
    let ineq = pick(&["nonlinearity", "kernel", "combined", "solution-lipschitz"]);
    let slack = col(&t, "slack");
    let min_slack = ineq.iter().map(|r| num(&r[slack])).fold(f64::INFINITY, f64::min);
    let ok = ineq.len() == 200 && all_pass(&t, &ineq) && dt < Duration::from_secs(60);
    rep.line(5, ok, format!("4 inequalities x 50 instances, min slack {min_slack:e}, {}", secs(dt)));
    let fast = pick(&["w1-fastpath"]);
    let metric = pick(&["w1-metric"]);
    let ok = fast.len() == 500 && metric.len() == 200 && all_pass(&t, &fast) && all_pass(&t, &metric);
    rep.line(6, ok, format!("{} fast-path pairs, {} metric triples", fast.len(), metric.len()));
}

fn converge(rep: &mut Report) {
    let (t, dt) = run("converge", &RunConfig::default());
    let (lv, rmse) = (col(&t, "level"), col(&t, "rmse"));
    let mut by_level: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in &t.rows {
        by_level.entry(num(&r[lv]) as usize).or_default().push(num(&r[rmse]));
    }
    let stats: Vec<(usize, f64, f64)> = by_level
        .iter()
        .map(|(&n, v)| {
            let k = v.len() as f64;
            let mean = v.iter().sum::<f64>() / k;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (n, mean, (var / k).sqrt())
        })
        .collect();
    let mean = |n: usize| stats.iter().find(|s| s.0 == n).map(|s| s.1).unwrap_or(f64::NAN);
    let ratio = mean(4) / mean(1);
    let monotone = stats.windows(2).all(|w| w[1].1 <= w[0].1 + 2.0 * w[0].2.max(w[1].2));
    let seeds = by_level.values().all(|v| v.len() == 10);
    let ok = stats.len() == 4 && seeds && ratio < 0.5 && monotone && dt < Duration::from_secs(300);
    let means: Vec<String> = stats.iter().map(|s| format!("n={}:{:.4}±{:.4}", s.0, s.1, s.2)).collect();
    rep.line(7, ok, format!("RMSE(4)/RMSE(1) = {ratio:.4}, monotone {monotone}, {}, {}", means.join(" "), secs(dt)));
}

fn schedule(rep: &mut Report) {
    let m = min_budget(0.5, 2).expect("valid λℓ");
    let mut s = MlfpSchedule::manual(2, 0).expect("M ≥ 2");
    s.alpha = 0.5;
    s.gamma = 1.5;
    let n = level_for_accuracy(&s, 0.1).expect("valid schedule");
    let mut rng = ChaCha20Rng::seed_from_u64(800);
    let mut bound_ok = 0;
    for _ in 0..100 {
        s.alpha = rng.random_range(0.01..0.99);
        s.gamma = rng.random_range(1.5..100.0);
        let eps = rng.random_range(1e-6..1.0);
        let n = level_for_accuracy(&s, eps).expect("valid schedule");
        if n as f64 <= level_bound(s.alpha, s.gamma, eps) {
            bound_ok += 1;
        }
    }
    rep.line(8, m == 26 && n == 4 && bound_ok == 100, format!("M={m}, n={n}, level bound held {bound_ok}/100"));
}

fn reproducible(rep: &mut Report) {
    let body = |dir: &std::path::Path| -> Option<Vec<u8>> {
        let st = Command::new(env!("CARGO_BIN_EXE_qnet"))
            .args(["converge", "--seed", "7", "--out"])
            .arg(dir)
            .output()
            .ok()?;
        st.status.success().then(|| std::fs::read(dir.join("converge.csv")).ok()).flatten()
    };
    let (a, b) = (tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir"));
    let (x, y) = (body(a.path()), body(b.path()));
    let ok = x.is_some() && x == y;
    rep.line(9, ok, format!("two converge runs, {} CSV bytes, identical {ok}", x.map(|v| v.len()).unwrap_or(0)));
}

fn main() -> ExitCode {
    let mut rep = Report { failed: 0 };
    algebra(&mut rep);
    maxnet(&mut rep);
    mlfp(&mut rep);
    stability(&mut rep);
    converge(&mut rep);
    schedule(&mut rep);
    reproducible(&mut rep);
    println!("acceptance: {} of 9 criteria failed", rep.failed);
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
