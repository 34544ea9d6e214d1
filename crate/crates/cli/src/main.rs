// SPDX-License-Identifier: MIT

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Command, FromArgMatches, Subcommand};
use qnet::bellman::{build_f_from_g, build_q_net, grid16};
use qnet::calculus::identity_net;
use qnet::maxnet::max_net;
use qnet::mlfp::{MlfpSchedule, ThetaKey};
use qnet::Activation;
use qnet_cli::io::{export_model, export_net, import_net};
use qnet_cli::{registry, write_outputs, Registry, RunConfig};

// Commands besides the registered suites.
#[derive(Subcommand)]
enum Tool {
    /// List the registered suites.
    List,
    /// Write a built-in network or model as JSON.
    Export {
        /// max:<m>, identity:<d>, grid16-g, grid16-f, grid16-q:<m>:<n>, grid16-model
        what: String,
        /// Output file, or directory for grid16-model.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Read a network, print its architecture and optionally evaluate it.
    Import {
        path: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Comma-separated input point.
        #[arg(long)]
        x: Option<String>,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Inclusive level range `a..b`.
    #[arg(long, value_parser = parse_levels)]
    levels: Option<RangeInclusive<usize>>,
    /// MLFP budget M.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Case, sample or seed count, depending on the suite.
    #[arg(long)]
    cases: Option<usize>,
    /// Model file for converge (see `export grid16-model`).
    #[arg(long)]
    instance: Option<PathBuf>,
}

fn parse_levels(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad level {t:?}: {e}"));
    Ok(p(a)?..=p(b)?)
}

/// One subcommand per registered suite, plus the tools.
fn command(reg: &Registry) -> Command {
    let mut cmd = Command::new("qnet")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Neural representations of fixed points and Q-functions")
        .subcommand_required(true);
    for name in reg.names() {
        let about = reg.get(name).map(|s| s.about()).unwrap_or_default();
        cmd = cmd.subcommand(RunOpts::augment_args(Command::new(name).about(about)));
    }
    Tool::augment_subcommands(cmd)
}

/// Failures that map to a specific exit code.
enum Fail {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn run_suite(reg: &Registry, name: &str, opts: RunOpts) -> Result<usize, Fail> {
    let s = reg.get(name).ok_or_else(|| Fail::Config(anyhow!("unknown suite {name:?}")))?;
    let cfg = RunConfig {
        seed: opts.seed,
        beta: opts.beta,
        levels: opts.levels,
        budget: opts.budget,
        tol: opts.tol,
        cases: opts.cases,
        instance: opts.instance,
    };
    cfg.validate().map_err(Fail::Config)?;
    let table = s.run(&cfg).map_err(Fail::Runtime)?;
    let path = write_outputs(s.name(), &cfg, &table, &opts.out).map_err(Fail::Runtime)?;
    println!("{}: {} rows, {} failures -> {}", s.name(), table.rows.len(), table.failures, path.display());
    Ok(table.failures)
}

fn run_tool(reg: &Registry, tool: Tool) -> Result<usize, Fail> {
    match tool {
        Tool::List => {
            for name in reg.names() {
                println!("{name:16} {}", reg.get(name).map(|s| s.about()).unwrap_or_default());
            }
            Ok(0)
        }
        Tool::Export { what, out, beta, seed } => export(&what, &out, beta, seed).map(|_| 0),
        Tool::Import { path, beta, x } => {
            let act = Activation::leaky_relu(beta).map_err(|e| Fail::Config(e.into()))?;
            let net = import_net(&path).map_err(|e| Fail::Config(e.into()))?;
            let a = net.describe();
            println!("dims {:?}", a.dims);
            println!("depth {} width {} params {}", a.depth(), a.max_width(), a.param_count());
            if let Some(x) = x {
                let x = x
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .context("--x")
                    .map_err(Fail::Config)?;
                let y = net.realize(&act, &x).map_err(|e| Fail::Config(e.into()))?;
                println!("{}", y.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
            }
            Ok(0)
        }
    }
}

fn export(what: &str, out: &std::path::Path, beta: f64, seed: u64) -> Result<(), Fail> {
    let cfg = |e: anyhow::Error| Fail::Config(e);
    let act = Activation::leaky_relu(beta).map_err(|e| cfg(e.into()))?;
    let mut parts = what.split(':');
    let kind = parts.next().unwrap_or_default();
    let mut num = |name: &str| -> Result<u64, Fail> {
        let t = parts.next().ok_or_else(|| cfg(anyhow!("{kind} needs :<{name}>")))?;
        t.parse::<u64>().with_context(|| format!("{kind}: bad {name} {t:?}")).map_err(cfg)
    };
    let net = match kind {
        "max" => max_net(num("m")? as usize, beta).map_err(|e| cfg(e.into()))?,
        "identity" => identity_net(num("d")? as usize, act).map_err(|e| cfg(e.into()))?.net().clone(),
        "grid16-g" | "grid16-f" | "grid16-q" | "grid16-model" => {
            let (model, g) = grid16(beta).map_err(|e| cfg(e.into()))?;
            match kind {
                "grid16-g" => g.net,
                "grid16-f" => build_f_from_g(&g, model.discount, beta).map_err(|e| Fail::Runtime(e.into()))?,
                "grid16-q" => {
                    let (m, n) = (num("m")?, num("n")? as usize);
                    let sched = MlfpSchedule::manual(m, n).map_err(|e| cfg(e.into()))?;
                    build_q_net(&model, &g, &sched, seed, &ThetaKey::root()).map_err(|e| Fail::Runtime(e.into()))?.net
                }
                _ => {
                    let p = export_model(&model, &g, out).map_err(|e| Fail::Runtime(e.into()))?;
                    println!("wrote {}", p.display());
                    return Ok(());
                }
            }
        }
        _ => return Err(cfg(anyhow!("unknown export target {what:?}"))),
    };
    export_net(&net, out).map_err(|e| Fail::Runtime(e.into()))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let reg = registry();
    let matches = match command(&reg).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match matches.subcommand() {
        Some((name, sub)) if reg.get(name).is_some() => RunOpts::from_arg_matches(sub)
            .map_err(|e| Fail::Config(e.into()))
            .and_then(|opts| run_suite(&reg, name, opts)),
        _ => Tool::from_arg_matches(&matches).map_err(|e| Fail::Config(e.into())).and_then(|t| run_tool(&reg, t)),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Fail::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Fail::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
