//! Convex penalties, duality mappings and (ε-)Bregman distances.
//!
//! Two penalties are supported, both of the form
//!
//! ```text
//! Θ(z) = ‖z‖²/(2μ) [+ TV(z)] + ι_C(z)
//! ```
//!
//! The quadratic term alone makes Θ 2-convex with constant `c0 = 1/(2μ)`; the
//! total variation and the indicator of the constraint set are convex and do
//! not change that constant.

use crate::grid::Grid;
use crate::pdhg;

/// Closed convex constraint set `C`. Every variant contains the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    NonNegative,
    /// Entrywise `lo <= z <= hi` with `lo <= 0 <= hi`.
    Box { lo: f64, hi: f64 },
}

impl Constraint {
    pub fn new_box(lo: f64, hi: f64) -> Option<Self> {
        (lo <= 0.0 && 0.0 <= hi).then_some(Constraint::Box { lo, hi })
    }

    #[inline]
    pub fn project_value(&self, v: f64) -> f64 {
        match *self {
            Constraint::NonNegative => v.max(0.0),
            Constraint::Box { lo, hi } => v.clamp(lo, hi),
        }
    }

    pub fn project(&self, z: &Grid) -> Grid {
        z.map(|v| self.project_value(v))
    }

    pub fn project_inplace(&self, z: &mut Grid) {
        z.map_inplace(|v| self.project_value(v));
    }

    pub fn contains(&self, z: &Grid) -> bool {
        z.iter().all(|&v| self.project_value(v) == v)
    }
}

/// `Π_C` for an optional constraint.
pub fn project(constraint: Option<Constraint>, z: &Grid) -> Grid {
    match constraint {
        Some(c) => c.project(z),
        None => z.clone(),
    }
}

pub fn is_feasible(constraint: Option<Constraint>, z: &Grid) -> bool {
    constraint.is_none_or(|c| c.contains(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    Quadratic,
    QuadraticTv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    pub mu: f64,
    pub kind: PenaltyKind,
    pub constraint: Option<Constraint>,
}

impl Penalty {
    pub fn quadratic(mu: f64, constraint: Option<Constraint>) -> Self {
        assert!(mu > 0.0, "penalty weight must be positive");
        Penalty {
            mu,
            kind: PenaltyKind::Quadratic,
            constraint,
        }
    }

    pub fn quadratic_tv(mu: f64, constraint: Option<Constraint>) -> Self {
        assert!(mu > 0.0, "penalty weight must be positive");
        Penalty {
            mu,
            kind: PenaltyKind::QuadraticTv,
            constraint,
        }
    }

    /// Convexity exponent `p`.
    pub fn p(&self) -> f64 {
        2.0
    }

    /// Convexity constant `c0`.
    pub fn c0(&self) -> f64 {
        1.0 / (2.0 * self.mu)
    }

    /// `Θ(z)`, `+∞` outside the constraint set.
    pub fn value(&self, z: &Grid) -> f64 {
        if !is_feasible(self.constraint, z) {
            return f64::INFINITY;
        }
        let quad = z.norm_sq() / (2.0 * self.mu);
        match self.kind {
            PenaltyKind::Quadratic => quad,
            PenaltyKind::QuadraticTv => quad + pdhg::tv_value(z),
        }
    }

    /// `min_z Θ(z) − ⟨ξ, z⟩` for the quadratic penalty, attained at `Π_C(μξ)`.
    /// Returns `None` for penalties with a TV term, whose minimum has no closed form.
    pub fn quadratic_dual_bound(&self, xi: &Grid) -> Option<f64> {
        match self.kind {
            PenaltyKind::Quadratic => {
                let z = project(self.constraint, &xi.scaled(self.mu));
                Some(z.norm_sq() / (2.0 * self.mu) - xi.dot(&z))
            }
            PenaltyKind::QuadraticTv => None,
        }
    }
}

/// An iterate `x` with a dual element `ξ ∈ ∂_ε Θ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPair {
    pub x: Grid,
    pub xi: Grid,
    pub eps: f64,
}

impl PrimalDualPair {
    pub fn new(x: Grid, xi: Grid, eps: f64) -> Self {
        assert_eq!(x.shape(), xi.shape(), "primal and dual iterates must share a shape");
        assert!(eps >= 0.0, "eps must be nonnegative");
        PrimalDualPair { x, xi, eps }
    }

    /// `x = ξ = 0` with `ε = 0`, valid whenever `0 ∈ C`.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PrimalDualPair {
            x: Grid::zeros(rows, cols),
            xi: Grid::zeros(rows, cols),
            eps: 0.0,
        }
    }
}

/// Euclidean duality mapping with gauge `t ↦ t^{s−1}`: `J_s(r) = ‖r‖^{s−2} r`.
pub fn duality_map(r: &Grid, s: f64) -> Grid {
    assert!(s > 1.0, "duality map exponent must exceed 1");
    let norm = r.norm();
    if norm == 0.0 {
        return r.zeros_like();
    }
    if s == 2.0 {
        return r.clone();
    }
    r.scaled(norm.powf(s - 2.0))
}

/// A Bregman distance, or the marker for an infeasible comparison point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }
}

/// `D^ε_ξ Θ(x̄, x) = Θ(x̄) − Θ(x) − ⟨ξ, x̄ − x⟩ + ε`.
pub fn bregman_eps_distance(theta: &Penalty, pair: &PrimalDualPair, xbar: &Grid) -> Distance {
    let at_xbar = theta.value(xbar);
    if !at_xbar.is_finite() {
        return Distance::Infinite;
    }
    let at_x = theta.value(&pair.x);
    if !at_x.is_finite() {
        return Distance::Infinite;
    }
    let linear = pair.xi.dot(xbar) - pair.xi.dot(&pair.x);
    Distance::Finite(at_xbar - at_x - linear + pair.eps)
}

/// Exact minimizer of `Θ(z) − ⟨ξ, z⟩` for the quadratic penalty: `x = Π_C(μξ)`.
pub fn solve_quadratic_exact(xi: &Grid, penalty: &Penalty) -> PrimalDualPair {
    assert_eq!(
        penalty.kind,
        PenaltyKind::Quadratic,
        "closed-form solve requires the quadratic penalty"
    );
    let x = project(penalty.constraint, &xi.scaled(penalty.mu));
    PrimalDualPair {
        x,
        xi: xi.clone(),
        eps: 0.0,
    }
}

/// Floating-point slack added to certificate checks.
pub fn certificate_tolerance(theta_at_x: f64) -> f64 {
    1e-9 * (1.0 + theta_at_x.abs())
}

/// Checks `ξ ∈ ∂_ε Θ(x)` in its Fenchel-gap form, given a lower bound on
/// `min_z Θ(z) − ⟨ξ, z⟩`.
pub fn check_eps_subgradient(pair: &PrimalDualPair, theta: &Penalty, dual_lower_bound: f64) -> bool {
    let theta_x = theta.value(&pair.x);
    if !theta_x.is_finite() {
        return false;
    }
    let gap = theta_x - pair.xi.dot(&pair.x) - dual_lower_bound;
    gap <= pair.eps + certificate_tolerance(theta_x)
}
