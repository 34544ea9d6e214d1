// SPDX-License-Identifier: MIT

//! Budget, level and accuracy-split arithmetic for MLFP schedules.

use crate::error::{Error, Result};

/// Budget `M`, level `n` and the contraction/accuracy constants of a schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlfpSchedule {
    pub m: u64,
    pub n: usize,
    pub lambda_ell: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// True when `m` was derived from the admissibility bound.
    pub derived: bool,
}

impl MlfpSchedule {
    /// User-chosen `M` and `n`; no admissibility requirement.
    pub fn manual(m: u64, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Schedule(format!("budget M must be at least 2, got {m}")));
        }
        Ok(MlfpSchedule { m, n, lambda_ell: f64::NAN, alpha: f64::NAN, gamma: f64::NAN, derived: false })
    }

    /// `M = min_budget(λℓ, |A|)`, `α`, `γ` from the closed forms, and `n = 𝓃(ε)`.
    pub fn derive(lambda_ell: f64, a_count: usize, c_frak: f64, eps: f64) -> Result<Self> {
        let m = min_budget(lambda_ell, a_count)?;
        let alpha = alpha(lambda_ell, a_count, m);
        let gamma = gamma(lambda_ell, a_count, c_frak)?;
        let mut s = MlfpSchedule { m, n: 0, lambda_ell, alpha, gamma, derived: true };
        s.n = level_for_accuracy(&s, eps)?;
        Ok(s)
    }

    pub fn with_level(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// Checks `M` against the admissibility bound for `λℓ` and `|A|`.
    pub fn require_admissible(&self, a_count: usize) -> Result<()> {
        let need = min_budget(self.lambda_ell, a_count)?;
        if self.m < need {
            return Err(Error::Schedule(format!("budget {} below the admissible minimum {need}", self.m)));
        }
        Ok(())
    }
}

fn check_lambda_ell(lambda_ell: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda_ell) {
        return Err(Error::Schedule(format!("λℓ = {lambda_ell} must lie in [0, 1)")));
    }
    Ok(())
}

/// Smallest integer `M ≥ 2` strictly above `((1 + λℓ(2|A| − 1)) / (1 − λℓ))²`.
pub fn min_budget(lambda_ell: f64, a_count: usize) -> Result<u64> {
    check_lambda_ell(lambda_ell)?;
    if a_count == 0 {
        return Err(Error::Domain("action set must be nonempty".into()));
    }
    let ratio = ((1.0 + lambda_ell * (2.0 * a_count as f64 - 1.0)) / (1.0 - lambda_ell)).powi(2);
    if !(ratio < 9.0e15) {
        return Err(Error::Budget(format!("budget bound {ratio} is not representable")));
    }
    // Ratios within rounding of an integer are treated as that integer.
    let near = ratio.round();
    let floor = if (ratio - near).abs() <= 1e-9 * ratio.max(1.0) { near } else { ratio.floor() };
    Ok((floor as u64 + 1).max(2))
}

/// `α = [b + sqrt(b² + 4 M^{−1/2} λℓ (|A| − 1))] / 2` with `b = λℓ(1 + |A| M^{−1/2}) + M^{−1/2}`.
pub fn alpha(lambda_ell: f64, a_count: usize, m: u64) -> f64 {
    let s = (m as f64).sqrt().recip();
    let a = a_count as f64;
    let b = lambda_ell * (1.0 + a * s) + s;
    (b + (b * b + 4.0 * s * lambda_ell * (a - 1.0)).sqrt()) / 2.0
}

/// `γ = (3/2) max{𝔠/(1 − λℓ), |A|𝔠/(|A|λℓ + 1)}`.
pub fn gamma(lambda_ell: f64, a_count: usize, c_frak: f64) -> Result<f64> {
    check_lambda_ell(lambda_ell)?;
    if !(c_frak >= 1.0) {
        return Err(Error::Schedule(format!("𝔠 = {c_frak} must be at least 1")));
    }
    let a = a_count as f64;
    Ok(1.5 * (c_frak / (1.0 - lambda_ell)).max(a * c_frak / (a * lambda_ell + 1.0)))
}

/// Minimal `n ≥ 1` with `γ αⁿ ≤ ε`.
pub fn level_for_accuracy(sched: &MlfpSchedule, eps: f64) -> Result<usize> {
    let (a, g) = (sched.alpha, sched.gamma);
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Schedule(format!("α = {a} must lie in (0, 1)")));
    }
    if !(g >= 1.5) {
        return Err(Error::Schedule(format!("γ = {g} must be at least 3/2")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("accuracy ε = {eps} must lie in (0, 1]")));
    }
    let mut n = 1usize;
    let mut v = g * a;
    while v > eps {
        n += 1;
        v *= a;
    }
    Ok(n)
}

/// `((ln(1/α) + ln γ + 1) / ln(1/α)) / ε`.
pub fn level_bound(alpha: f64, gamma: f64, eps: f64) -> f64 {
    let la = (1.0 / alpha).ln();
    (la + gamma.ln() + 1.0) / la / eps
}

/// Reward-net accuracy `ε / (1 + 𝔠² d^{2𝔠})` for the Bellman pipeline.
pub fn bellman_accuracy_split(eps: f64, c_frak: f64, d: usize) -> f64 {
    eps / (1.0 + c_frak * c_frak * (d as f64).powf(2.0 * c_frak))
}

/// `ε / (𝔠³ d^{3𝔠}) · (1 + 1/(1 − λL) + 1/((1 − λL)(1 − ηL)))^{−1}`.
pub fn general_accuracy_split(eps: f64, c_frak: f64, d: usize, lambda_l: f64, eta_l: f64) -> f64 {
    let inner = 1.0 + 1.0 / (1.0 - lambda_l) + 1.0 / ((1.0 - lambda_l) * (1.0 - eta_l));
    eps / (c_frak.powi(3) * (d as f64).powf(3.0 * c_frak)) / inner
}
