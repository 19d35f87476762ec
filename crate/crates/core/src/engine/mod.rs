//! Outer Landweber–Kaczmarz iterations, plain and Nesterov-accelerated.
//!
//! Each step `n` works on block `i_n = n mod N`:
//!
//! ```text
//! r_n     = F_i(x̂_n) − y_i
//! ξ_{n+1} = ξ̂_n − μ_n L_i(x̂_n)* J_s(r_n)
//! x_{n+1} = S_ε(ξ_{n+1})
//! ```
//!
//! with `x̂_n = x_n`, `ξ̂_n = ξ_n` in plain mode and the extrapolation
//! `x̂_n = x_n + n/(n+α)(x_n − x_{n−1})` (same for `ξ`) in accelerated mode.
//! With noisy data the run stops at the first `n` where the discrepancy test
//! `‖r‖^p + σε_n ≤ (τδ)^p` has held on `N` consecutive steps.

mod config;

pub use config::{
    kappa, validate_config, EpsSchedule, InnerFailurePolicy, SolverConfig, ValidationInputs, ValidationReport,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::ForwardProblem;
use crate::grid::Grid;
use crate::inner::InnerSolver;
use crate::penalty::{bregman_eps_distance, duality_map, Penalty, PrimalDualPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Plain,
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Discrepancy,
    Cap,
    InnerFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub n: usize,
    pub i_n: usize,
    pub residual_norm: f64,
    pub mu_tilde: f64,
    pub mu: f64,
    pub eps_n: f64,
    /// PDHG iterations spent producing `x_{n+1}` (0 when skipped or exact).
    pub inner_iterations: usize,
    pub inner_gap_rel: f64,
    pub q_n: usize,
    pub discrepancy: bool,
    pub rel_error: Option<f64>,
    pub bregman_to_truth: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunTrace {
    pub records: Vec<StepRecord>,
    pub terminated_by: Termination,
    pub n_final: usize,
    pub warnings: Vec<String>,
}

/// Iterates `(x_n, ξ_n, ε_n)` and `(x_{n−1}, ξ_{n−1}, ε_{n−1})` plus the
/// discrepancy counter `q_{n−1}`.
#[derive(Debug, Clone)]
pub struct IterState {
    pub n: usize,
    pub current: PrimalDualPair,
    pub previous: PrimalDualPair,
    pub q: usize,
}

impl IterState {
    pub fn new(start: PrimalDualPair) -> Self {
        IterState {
            n: 0,
            previous: start.clone(),
            current: start,
            q: 0,
        }
    }
}

/// `(μ̃, μ)` for residual norm `r_norm`, `‖L*J_s(r)‖ = ljr_norm`.
pub fn step_size(r_norm: f64, ljr_norm: f64, eps_n: f64, cfg: &SolverConfig, noisy: bool) -> (f64, f64) {
    let p = cfg.p;
    let mu_tilde = if ljr_norm > 0.0 {
        (cfg.beta0 * r_norm.powf(p * (cfg.s - 1.0)) / ljr_norm.powf(p)).min(cfg.beta1)
    } else {
        cfg.beta1
    };
    let level = r_norm.powf(p) + cfg.sigma * eps_n;
    let mu = if !noisy || level > (cfg.tau * cfg.delta).powf(p) {
        mu_tilde * level.powf(1.0 - cfg.s / p)
    } else {
        0.0
    };
    (mu_tilde, mu)
}

/// What a step did besides producing its record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Continue,
    /// `q_n = N`; the state was not advanced.
    Discrepancy,
    /// Inner solve missed its target under [`InnerFailurePolicy::Abort`];
    /// the state was not advanced.
    InnerFailure,
}

fn extrapolation_weight(mode: Mode, n: usize, alpha: f64) -> f64 {
    match mode {
        Mode::Plain => 0.0,
        Mode::Accelerated => n as f64 / (n as f64 + alpha),
    }
}

fn extrapolate(cur: &Grid, prev: &Grid, w: f64) -> Grid {
    if w == 0.0 {
        return cur.clone();
    }
    cur.zip_map(prev, |a, b| a + w * (a - b))
}

/// One outer step. With `advance = false` the record is computed at `x_n`
/// without extrapolation and nothing is updated (used for the last row).
fn step(
    state: &mut IterState,
    problem: &dyn ForwardProblem,
    inner: &mut InnerSolver,
    cfg: &SolverConfig,
    mode: Mode,
    advance: bool,
) -> Result<(StepRecord, StepStatus)> {
    let n = state.n;
    let blocks = problem.num_blocks();
    let i_n = n % blocks;
    let w = if advance {
        extrapolation_weight(mode, n, cfg.alpha)
    } else {
        0.0
    };
    let x_hat = extrapolate(&state.current.x, &state.previous.x, w);
    let xi_hat = extrapolate(&state.current.xi, &state.previous.xi, w);

    let lin = problem.linearize(i_n, &x_hat)?;
    let r = lin.residual();
    let r_norm = r.norm();
    let eps_n = state.current.eps;
    let noisy = cfg.noisy();
    let discrepancy =
        noisy && r_norm.powf(cfg.p) + cfg.sigma * eps_n <= (cfg.tau * cfg.delta).powf(cfg.p);
    let q_n = if discrepancy { state.q + 1 } else { 0 };

    let direction = lin.apply_adjoint(&duality_map(r, cfg.s))?;
    let (mu_tilde, mu) = step_size(r_norm, direction.norm(), eps_n, cfg, noisy);

    let mut record = StepRecord {
        n,
        i_n,
        residual_norm: r_norm,
        mu_tilde,
        mu,
        eps_n,
        inner_iterations: 0,
        inner_gap_rel: 0.0,
        q_n,
        discrepancy,
        rel_error: None,
        bregman_to_truth: None,
    };
    if !advance {
        return Ok((record, StepStatus::Continue));
    }
    if noisy && q_n >= blocks {
        return Ok((record, StepStatus::Discrepancy));
    }

    let mut xi_next = xi_hat;
    if mu != 0.0 {
        xi_next.axpy(-mu, &direction);
    }
    let next = if xi_next == state.current.xi {
        state.current.clone()
    } else {
        let target = cfg.eps.gap_target(n);
        let out = inner.solve(&xi_next, target);
        record.inner_iterations = out.iterations;
        record.inner_gap_rel = out.gap_rel;
        if !out.converged && cfg.on_inner_failure == InnerFailurePolicy::Abort {
            return Ok((record, StepStatus::InnerFailure));
        }
        let mut pair = out.pair;
        pair.eps = cfg.eps.clamp(pair.eps);
        pair
    };
    state.previous = std::mem::replace(&mut state.current, next);
    state.q = q_n;
    state.n += 1;
    Ok((record, StepStatus::Continue))
}

/// One step of the plain iteration; advances `state` unless it stops.
pub fn lk_step(
    state: &mut IterState,
    problem: &dyn ForwardProblem,
    inner: &mut InnerSolver,
    cfg: &SolverConfig,
) -> Result<(StepRecord, StepStatus)> {
    step(state, problem, inner, cfg, Mode::Plain, true)
}

/// One step of the accelerated iteration; advances `state` unless it stops.
pub fn nesterov_step(
    state: &mut IterState,
    problem: &dyn ForwardProblem,
    inner: &mut InnerSolver,
    cfg: &SolverConfig,
) -> Result<(StepRecord, StepStatus)> {
    step(state, problem, inner, cfg, Mode::Accelerated, true)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: PrimalDualPair,
    pub trace: RunTrace,
}

/// Diagnostics against a known solution.
fn annotate(record: &mut StepRecord, pair: &PrimalDualPair, penalty: &Penalty, truth: Option<&Grid>) {
    if let Some(t) = truth {
        let tn = t.norm();
        let err = pair.x.distance(t);
        record.rel_error = Some(if tn > 0.0 { err / tn } else { err });
        record.bregman_to_truth = bregman_eps_distance(penalty, pair, t).finite();
    }
}

/// Run from `x₀ = ξ₀ = 0` until the discrepancy stop, the inner solver
/// fails, or `n_max` steps have been taken.
pub fn run(
    problem: &dyn ForwardProblem,
    penalty: &Penalty,
    cfg: &SolverConfig,
    mode: Mode,
    truth: Option<&Grid>,
) -> Result<RunOutput> {
    let (rows, cols) = problem.domain_shape();
    let mut start = PrimalDualPair::zeros(rows, cols);
    start.eps = cfg.eps.floor;
    run_from(problem, penalty, cfg, mode, truth, start)
}

/// As [`run`], from a given starting pair with `ξ₀ ∈ ∂Θ(x₀)`.
pub fn run_from(
    problem: &dyn ForwardProblem,
    penalty: &Penalty,
    cfg: &SolverConfig,
    mode: Mode,
    truth: Option<&Grid>,
    start: PrimalDualPair,
) -> Result<RunOutput> {
    cfg.check()?;
    if (penalty.p() - cfg.p).abs() > 0.0 {
        return Err(Error::Config(format!(
            "config p = {} does not match the penalty's p = {}",
            cfg.p,
            penalty.p()
        )));
    }
    if start.x.shape() != problem.domain_shape() {
        return Err(Error::Shape("starting pair does not match the problem domain".into()));
    }
    let mut inner = InnerSolver::new(*penalty, cfg.inner_max_iter);
    let mut state = IterState::new(start);
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let terminated_by = loop {
        let advance = state.n < cfg.n_max;
        let pair_n = state.current.clone();
        let (mut record, status) = step(&mut state, problem, &mut inner, cfg, mode, advance)?;
        annotate(&mut record, &pair_n, penalty, truth);
        records.push(record);
        match status {
            StepStatus::Discrepancy => break Termination::Discrepancy,
            StepStatus::InnerFailure => {
                warnings.push(format!(
                    "inner solver missed gap target {:e} at n = {}",
                    cfg.eps.gap_target(state.n),
                    state.n
                ));
                break Termination::InnerFailure;
            }
            StepStatus::Continue if !advance => break Termination::Cap,
            StepStatus::Continue => {}
        }
    };
    Ok(RunOutput {
        result: state.current,
        trace: RunTrace {
            records,
            terminated_by,
            n_final: state.n,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{LinearBlock, LinearProblem};
    use crate::sparse::SparseMatrix;
    use crate::testutil::{random_grid, TestRng};

    fn dense_problem(rng: &mut TestRng, m: usize, q: usize, blocks: usize) -> (LinearProblem, Grid) {
        let truth = random_grid(rng, q, 1, 1.0);
        let mut bs = Vec::new();
        for _ in 0..blocks {
            let a = random_grid(rng, m, q, 1.0);
            let mut trip = Vec::new();
            for r in 0..m {
                for c in 0..q {
                    trip.push((r, c, a[(r, c)]));
                }
            }
            let matrix = SparseMatrix::from_triplets(m, q, &trip).unwrap();
            let data = Grid::vector(matrix.apply(truth.as_slice()).unwrap());
            bs.push(LinearBlock { matrix, data });
        }
        (LinearProblem::new((q, 1), bs).unwrap(), truth)
    }

    fn quad_cfg() -> SolverConfig {
        SolverConfig {
            beta0: 0.5,
            beta1: 1e6,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn step_size_examples() {
        let cfg = SolverConfig::default();
        // L = identity, σε → 0: μ̃ = min(β0, β1), exponent 1 − s/p = 0.
        let (mt, mu) = step_size(3.0, 3.0, 1e-300, &cfg, false);
        assert!((mt - 0.1).abs() < 1e-15);
        assert_eq!(mu, mt);
        // zero residual, exact data
        let (mt, mu) = step_size(0.0, 0.0, 1e-3, &cfg, false);
        assert_eq!((mt, mu), (10.0, 10.0));
        // noisy and below τδ
        let noisy = SolverConfig { delta: 1.0, ..cfg.clone() };
        assert_eq!(step_size(0.5, 1.0, 1e-3, &noisy, true).1, 0.0);
        assert!(step_size(1.2, 1.0, 1e-3, &noisy, true).1 > 0.0);
        // s = 3, p = 2: μ = μ̃ (r² + σε)^(−1/2)
        let c3 = SolverConfig { s: 3.0, ..cfg };
        let (mt, mu) = step_size(2.0, 4.0, 1e-2, &c3, false);
        let want_mt = (0.1 * 2f64.powf(4.0) / 16.0f64).min(10.0);
        assert!((mt - want_mt).abs() < 1e-15);
        assert!((mu - want_mt * (4.0 + 1e-5f64).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn plain_step_is_landweber() {
        let mut rng = TestRng::new(1);
        let (prob, _) = dense_problem(&mut rng, 6, 4, 1);
        let penalty = Penalty::quadratic(1.0, None);
        let cfg = quad_cfg();
        let mut inner = InnerSolver::new(penalty, 10);
        let x0 = random_grid(&mut rng, 4, 1, 1.0);
        let mut state = IterState::new(PrimalDualPair::new(x0.clone(), x0.clone(), 0.0));
        let (rec, _) = lk_step(&mut state, &prob, &mut inner, &cfg).unwrap();

        let a = &prob.blocks()[0].matrix;
        let mut r = a.apply(x0.as_slice()).unwrap();
        for (ri, yi) in r.iter_mut().zip(prob.blocks()[0].data.as_slice()) {
            *ri -= yi;
        }
        let g = a.apply_adjoint(&r).unwrap();
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mu = (0.5 * rn * rn / (gn * gn)).min(1e6);
        assert!((rec.mu - mu).abs() < 1e-14 * mu);
        for k in 0..4 {
            let want = x0.as_slice()[k] - mu * g[k];
            assert!((state.current.x.as_slice()[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_residual_keeps_state() {
        let mut rng = TestRng::new(2);
        let (prob, truth) = dense_problem(&mut rng, 3, 3, 1);
        let penalty = Penalty::quadratic(1.0, None);
        let cfg = quad_cfg();
        let mut inner = InnerSolver::new(penalty, 10);
        let mut state = IterState::new(PrimalDualPair::new(truth.clone(), truth.clone(), 0.0));
        let (rec, _) = lk_step(&mut state, &prob, &mut inner, &cfg).unwrap();
        assert!(rec.residual_norm < 1e-14);
        assert!((state.current.x.distance(&truth)) < 1e-12);
    }

    #[test]
    fn nesterov_first_step_matches_plain() {
        let mut rng = TestRng::new(3);
        let (prob, _) = dense_problem(&mut rng, 5, 4, 1);
        let penalty = Penalty::quadratic(1.0, None);
        let cfg = quad_cfg();
        let start = PrimalDualPair::zeros(4, 1);
        let mut a = IterState::new(start.clone());
        let mut b = IterState::new(start);
        let (ra, _) = lk_step(&mut a, &prob, &mut InnerSolver::new(penalty, 10), &cfg).unwrap();
        let (rb, _) = nesterov_step(&mut b, &prob, &mut InnerSolver::new(penalty, 10), &cfg).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a.current, b.current);
        assert_eq!(extrapolation_weight(Mode::Accelerated, 5, 5.0), 0.5);
    }

    #[test]
    fn immediate_discrepancy_stop() {
        let mut rng = TestRng::new(4);
        let (prob, _) = dense_problem(&mut rng, 5, 4, 1);
        let cfg = SolverConfig {
            delta: 1e3,
            ..quad_cfg()
        };
        let out = run(&prob, &Penalty::quadratic(1.0, None), &cfg, Mode::Plain, None).unwrap();
        assert_eq!(out.trace.terminated_by, Termination::Discrepancy);
        assert_eq!(out.trace.n_final, 0);
        assert_eq!(out.trace.records.len(), 1);
        assert_eq!(out.result.x, Grid::zeros(4, 1));
    }

    #[test]
    fn zero_cap_gives_one_record() {
        let mut rng = TestRng::new(5);
        let (prob, _) = dense_problem(&mut rng, 5, 4, 1);
        let cfg = SolverConfig { n_max: 0, ..quad_cfg() };
        let out = run(&prob, &Penalty::quadratic(1.0, None), &cfg, Mode::Plain, None).unwrap();
        assert_eq!(out.trace.terminated_by, Termination::Cap);
        assert_eq!(out.trace.records.len(), 1);
    }

    #[test]
    fn counter_resets_and_triggers_per_block() {
        let mut rng = TestRng::new(6);
        let (prob, truth) = dense_problem(&mut rng, 4, 6, 3);
        // Noisy data with a modest level; the run must end by discrepancy.
        let mut noisy_blocks = prob.blocks().to_vec();
        for b in &mut noisy_blocks {
            let e = random_grid(&mut rng, 4, 1, 1e-3);
            b.data = &b.data + &e;
        }
        let noisy = LinearProblem::new((6, 1), noisy_blocks).unwrap();
        let cfg = SolverConfig {
            delta: 2e-3,
            tau: 1.5,
            n_max: 100_000,
            ..quad_cfg()
        };
        let out = run(&noisy, &Penalty::quadratic(1.0, None), &cfg, Mode::Plain, Some(&truth)).unwrap();
        assert_eq!(out.trace.terminated_by, Termination::Discrepancy);
        let recs = &out.trace.records;
        let mut q_prev = 0;
        for r in recs {
            if r.discrepancy {
                assert_eq!(r.q_n, q_prev + 1);
                assert_eq!(r.mu, 0.0);
            } else {
                assert_eq!(r.q_n, 0);
            }
            assert!(r.mu_tilde <= cfg.beta1 + 1e-12 && r.mu >= 0.0);
            q_prev = r.q_n;
        }
        assert_eq!(recs.last().unwrap().q_n, 3);
        assert!(recs[..recs.len() - 1].iter().all(|r| r.q_n < 3));
    }

    #[test]
    fn exact_data_reduces_residual_and_bregman() {
        let mut rng = TestRng::new(7);
        let (prob, truth) = dense_problem(&mut rng, 8, 5, 2);
        let cfg = SolverConfig { n_max: 400, ..quad_cfg() };
        let penalty = Penalty::quadratic(1.0, None);
        let out = run(&prob, &penalty, &cfg, Mode::Plain, Some(&truth)).unwrap();
        let recs = &out.trace.records;
        assert_eq!(recs.len(), 401);
        assert!(recs[400].residual_norm < recs[0].residual_norm);
        for w in recs.windows(2) {
            let (d0, d1) = (w[0].bregman_to_truth.unwrap(), w[1].bregman_to_truth.unwrap());
            assert!(d1 - d0 <= 2.0 * w[0].eps_n + w[1].eps_n + 1e-6 * (1.0 + d0));
        }
    }

    #[test]
    fn penalty_exponent_mismatch_is_config_error() {
        let mut rng = TestRng::new(8);
        let (prob, _) = dense_problem(&mut rng, 3, 3, 1);
        let cfg = SolverConfig { p: 3.0, ..quad_cfg() };
        assert!(matches!(
            run(&prob, &Penalty::quadratic(1.0, None), &cfg, Mode::Plain, None),
            Err(Error::Config(_))
        ));
    }
}
