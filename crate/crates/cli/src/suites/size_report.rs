// SPDX-License-Identifier: MIT

use qnet::bellman::{build_q_net, grid16};
use qnet::mlfp::{MlfpSchedule, ThetaKey};

use crate::suite::{RunConfig, Suite, Table};

pub struct SizeReportSuite;

impl Suite for SizeReportSuite {
    fn name(&self) -> &'static str {
        "size-report"
    }

    fn about(&self) -> &'static str {
        "measured sizes of MLFP and Q-networks on the grid model against their closed-form bounds"
    }

    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Table> {
        let (model, g) = grid16(cfg.beta)?;
        let m = cfg.budget.unwrap_or(2);
        let mut t = Table::new(&[
            "n",
            "m",
            "actions",
            "d",
            "psi_depth",
            "psi_depth_bound",
            "psi_width",
            "psi_width_bound",
            "psi_params",
            "psi_params_bound",
            "q_params",
            "q_square_width_bound",
            "pass",
        ]);
        for n in cfg.levels_or(0..=3) {
            let sched = MlfpSchedule::manual(m, n)?;
            let rep = build_q_net(&model, &g, &sched, cfg.seed, &ThetaKey::root())?;
            let b = rep.psi_bounds.ok_or_else(|| anyhow::anyhow!("size bound overflows u128"))?;
            let a = rep.psi.describe();
            let pass = a.depth() as u128 <= b.depth
                && a.max_width() as u128 <= b.width
                && a.param_count() as u128 <= b.params
                && rep.params as u128 <= rep.square_width_bound;
            t.push(
                vec![
                    n.to_string(),
                    m.to_string(),
                    model.n_actions.to_string(),
                    model.d.to_string(),
                    a.depth().to_string(),
                    b.depth.to_string(),
                    a.max_width().to_string(),
                    b.width.to_string(),
                    a.param_count().to_string(),
                    b.params.to_string(),
                    rep.params.to_string(),
                    rep.square_width_bound.to_string(),
                ],
                pass,
            );
        }
        Ok(t)
    }
}
