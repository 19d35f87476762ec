use serde::Serialize;

use crate::error::{Error, Result};

/// Relative duality gap targets for the inner solves. The solve producing
/// `x_{n+1}` stops at gap `η₀·(n+2)^(−exponent)`; certified values below
/// `floor` are raised to `floor` so that every `ε_n` is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsSchedule {
    pub eta0: f64,
    pub exponent: f64,
    pub floor: f64,
}

impl EpsSchedule {
    pub fn new(exponent: f64) -> Self {
        EpsSchedule {
            eta0: 1.0,
            exponent,
            floor: 1e-14,
        }
    }

    /// Gap target for the solve that produces `x_{n+1}`.
    pub fn gap_target(&self, n: usize) -> f64 {
        self.eta0 * (n as f64 + 2.0).powf(-self.exponent)
    }

    pub fn clamp(&self, certified: f64) -> f64 {
        certified.max(self.floor)
    }
}

/// What to do when the inner solver hits its iteration cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerFailurePolicy {
    /// Stop the run with `terminated_by = inner-failure`.
    Abort,
    /// Keep going with the larger certified `ε`.
    Accept,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub p: f64,
    pub s: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub tau: f64,
    pub alpha: f64,
    /// Absolute noise level; `0` runs the exact-data iteration to `n_max`.
    pub delta: f64,
    pub eps: EpsSchedule,
    pub n_max: usize,
    pub blocks: usize,
    pub inner_max_iter: usize,
    pub on_inner_failure: InnerFailurePolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 2.0,
            s: 2.0,
            beta0: 0.1,
            beta1: 10.0,
            sigma: 0.001,
            tau: 1.01,
            alpha: 5.0,
            delta: 0.0,
            eps: EpsSchedule::new(2.2),
            n_max: 10_000,
            blocks: 1,
            inner_max_iter: 5000,
            on_inner_failure: InnerFailurePolicy::Abort,
        }
    }
}

impl SolverConfig {
    pub fn noisy(&self) -> bool {
        self.delta > 0.0
    }

    /// Hard range checks; violations are configuration errors.
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.p >= 2.0) {
            return bad("p must be at least 2");
        }
        if !(self.s > 1.0) {
            return bad("s must be greater than 1");
        }
        if !(self.beta0 > 0.0) || !(self.beta1 > 0.0) {
            return bad("beta0 and beta1 must be positive");
        }
        if !(self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if !(self.tau > 1.0) {
            return bad("tau must be greater than 1");
        }
        if !(self.alpha >= 3.0) {
            return bad("alpha must be at least 3");
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return bad("delta must be a finite nonnegative number");
        }
        if !(self.eps.eta0 > 0.0 && self.eps.eta0 <= 1.0) {
            return bad("eta0 must lie in (0, 1]");
        }
        if !(self.eps.exponent > 1.0) {
            return bad("gap exponent must exceed 1 for a summable schedule");
        }
        if !(self.eps.floor > 0.0) {
            return bad("eps floor must be positive");
        }
        if self.blocks == 0 {
            return bad("at least one block is required");
        }
        if self.inner_max_iter == 0 {
            return bad("inner_max_iter must be positive");
        }
        Ok(())
    }
}

/// Optional problem constants for the admissibility report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ValidationInputs {
    /// Convexity constant of the penalty.
    pub c0: Option<f64>,
    /// Tangential cone constant, `0` for linear problems.
    pub gamma: Option<f64>,
    /// Radius of the ball around the initial guess.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub beta: f64,
    pub kappa: f64,
    pub kappa_beta1_sigma: f64,
    pub kappa_ok: bool,
    pub c1: Option<f64>,
    pub c1_ok: Option<bool>,
    /// Allowed total `Σ ε_n`, namely `c0·ρ^p/16`.
    pub eps_budget: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn kappa(p: f64, s: f64, beta: f64) -> f64 {
    if p >= s {
        1.0
    } else {
        (beta.powf(p / (s - p)) - 1.0).powf((p - s) / p)
    }
}

/// Admissibility report. Never fails: every violated condition becomes a
/// warning.
pub fn validate_config(cfg: &SolverConfig, inputs: ValidationInputs) -> ValidationReport {
    let mut warnings = Vec::new();
    let beta = match inputs.gamma {
        Some(g) => (0.5 * (1.0 + 1.0 / g.max(1e-3))).min(2.0),
        None => 2.0,
    };
    let kappa = kappa(cfg.p, cfg.s, beta);
    let kbs = kappa * cfg.beta1 * cfg.sigma;
    let kappa_ok = kbs <= 1.0;
    if !kappa_ok {
        warnings.push(format!("kappa*beta1*sigma = {kbs} exceeds 1"));
    }
    let c1 = match (inputs.c0, inputs.gamma) {
        (Some(c0), Some(gamma)) => {
            let p_star = cfg.p / (cfg.p - 1.0);
            Some(
                1.0 / beta
                    - gamma
                    - (1.0 + gamma) / cfg.tau
                    - 2.0 / p_star * (cfg.beta0 / (2.0 * c0)).powf(p_star - 1.0),
            )
        }
        _ => None,
    };
    let c1_ok = c1.map(|c| c > 0.0);
    if let Some(c) = c1.filter(|c| !(*c > 0.0)) {
        warnings.push(format!("c1 = {c} is not positive (beta = {beta})"));
    }
    if let Some(g) = inputs.gamma {
        if !(beta * g < 1.0) {
            warnings.push(format!("beta*gamma = {} is not below 1", beta * g));
        }
    }
    let eps_budget = match (inputs.c0, inputs.rho) {
        (Some(c0), Some(rho)) => Some(c0 * rho.powf(cfg.p) / 16.0),
        _ => None,
    };
    ValidationReport {
        beta,
        kappa,
        kappa_beta1_sigma: kbs,
        kappa_ok,
        c1,
        c1_ok,
        eps_budget,
        warnings,
    }
}
