//! The inexact inner solver `S_ε`: given `ξ`, returns `x` minimizing
//! `Θ(z) − ⟨ξ, z⟩` up to a certified `ε`.
//!
//! The quadratic penalty is solved in closed form. Penalties with a TV term go
//! through PDHG, warm-started from the previous solve, and are certified by the
//! absolute duality gap. `Θ(z) − ⟨ξ, z⟩` and `Ψ_P(z)` differ by the constant
//! `μ‖ξ‖²/2`, so the gap certifies both.

use crate::grid::Grid;
use crate::pdhg::{pdhg_solve, DenoiseProblem, GradientField, PdhgOptions};
use crate::penalty::{solve_quadratic_exact, Penalty, PenaltyKind, PrimalDualPair};

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub pair: PrimalDualPair,
    pub iterations: usize,
    pub gap_rel: f64,
    /// Lower bound on `min_z Θ(z) − ⟨ξ, z⟩` backing the certificate.
    pub dual_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct InnerSolver {
    penalty: Penalty,
    max_iter: usize,
    warm: Option<(Grid, GradientField)>,
}

impl InnerSolver {
    pub fn new(penalty: Penalty, max_iter: usize) -> Self {
        InnerSolver {
            penalty,
            max_iter,
            warm: None,
        }
    }

    pub fn penalty(&self) -> &Penalty {
        &self.penalty
    }

    /// Forget the warm start.
    pub fn reset(&mut self) {
        self.warm = None;
    }

    /// Solve for `ξ` with relative gap target `eta` (ignored by the exact path).
    pub fn solve(&mut self, xi: &Grid, eta: f64) -> InnerOutcome {
        match self.penalty.kind {
            PenaltyKind::Quadratic => {
                let pair = solve_quadratic_exact(xi, &self.penalty);
                let dual_bound = self.penalty.quadratic_dual_bound(xi).expect("quadratic penalty");
                InnerOutcome {
                    pair,
                    iterations: 0,
                    gap_rel: 0.0,
                    dual_bound,
                    converged: true,
                }
            }
            PenaltyKind::QuadraticTv => {
                let (rows, cols) = xi.shape();
                let (z0, lam0) = match self.warm.take() {
                    Some((z, lam)) if z.shape() == xi.shape() => (z, lam),
                    _ => (Grid::zeros(rows, cols), GradientField::zeros(rows, cols)),
                };
                let prob = DenoiseProblem::new(xi.clone(), self.penalty.mu, self.penalty.constraint);
                let options = PdhgOptions {
                    eta,
                    max_iter: self.max_iter,
                    record_history: false,
                };
                let report = pdhg_solve(&prob, &z0, &lam0, &options);
                let shift = 0.5 * self.penalty.mu * xi.norm_sq();
                self.warm = Some((report.x.clone(), report.lambda));
                InnerOutcome {
                    pair: PrimalDualPair::new(report.x, xi.clone(), report.eps_certificate),
                    iterations: report.iterations,
                    gap_rel: report.gap_rel,
                    dual_bound: report.dual - shift,
                    converged: report.converged,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::{check_eps_subgradient, Constraint};
    use crate::testutil::{random_grid, TestRng};

    #[test]
    fn quadratic_delegates_to_exact_solve() {
        let mut solver = InnerSolver::new(Penalty::quadratic(2.0, None), 100);
        let xi = Grid::vector(vec![1.0, -3.0]);
        let out = solver.solve(&xi, 0.5);
        assert_eq!(out.pair.x.as_slice(), &[2.0, -6.0]);
        assert_eq!(out.pair.eps, 0.0);
        assert!(check_eps_subgradient(&out.pair, solver.penalty(), out.dual_bound));
    }

    #[test]
    fn zero_xi_gives_zero() {
        let mut solver = InnerSolver::new(Penalty::quadratic_tv(1.0, Some(Constraint::NonNegative)), 5000);
        let out = solver.solve(&Grid::zeros(5, 5), 1e-4);
        assert_eq!(out.pair.x, Grid::zeros(5, 5));
        assert_eq!(out.pair.eps, 0.0);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn certificate_within_relative_gap_bound() {
        // With Ψ_D ≤ min Ψ_P ≤ Ψ_P(x) and G_rel ≤ η, the gap is at most
        // 2η/(1 − η)·Ψ_P(x) whenever Ψ_D ≥ 0, and at most η(Ψ_P + |Ψ_D|) always.
        let mut rng = TestRng::new(3);
        let eta = 1e-4;
        for trial in 0..10 {
            let constraint = (trial % 2 == 0).then_some(Constraint::NonNegative);
            let penalty = Penalty::quadratic_tv(0.5 + rng.uniform(), constraint);
            let mut solver = InnerSolver::new(penalty, 5000);
            let xi = random_grid(&mut rng, 8, 8, 2.0);
            let out = solver.solve(&xi, eta);
            assert!(out.converged);
            let prob = DenoiseProblem::new(xi.clone(), penalty.mu, constraint);
            let primal = crate::pdhg::primal_value(&prob, &out.pair.x);
            let bound = 2.0 * eta / (1.0 - eta) * primal;
            assert!(out.pair.eps <= bound + 1e-12, "trial {trial}: {} > {bound}", out.pair.eps);
            assert!(check_eps_subgradient(&out.pair, &penalty, out.dual_bound));
        }
    }

    #[test]
    fn warm_start_reuses_previous_solution() {
        let mut rng = TestRng::new(8);
        let penalty = Penalty::quadratic_tv(1.0, None);
        let mut solver = InnerSolver::new(penalty, 5000);
        let xi = random_grid(&mut rng, 8, 8, 1.0);
        let cold = solver.solve(&xi, 1e-6);
        let warm = solver.solve(&xi, 1e-6);
        assert!(warm.iterations < cold.iterations);
        assert_eq!(warm.iterations, 0);
    }
}
