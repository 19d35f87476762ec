//! Identification of `c` in `−Δu + cu = f` on `(0,1)²`, `u = g` on the
//! boundary, from measurements of `u`.
//!
//! Five-point finite differences on `m×m` interior nodes with spacing
//! `h = 1/(m+1)`; node `(i, j)` sits at `x = (j+1)h`, `y = (i+1)h` and has
//! flat index `i·m + j`. Norms are plain Frobenius norms of the node arrays.

mod banded;

pub use banded::BandedCholesky;

use crate::error::{Error, Result};
use crate::forward::{ForwardProblem, Linearization};
use crate::grid::Grid;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone)]
pub struct Mesh {
    m: usize,
    f: Grid,
    /// Boundary values `g` next to each interior node, summed per node.
    boundary_sum: Grid,
}

impl Mesh {
    pub fn new(m: usize, f: impl Fn(f64, f64) -> f64, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one interior node".into()));
        }
        let h = 1.0 / (m as f64 + 1.0);
        let coord = |k: usize| (k as f64 + 1.0) * h;
        let f = Grid::from_fn(m, m, |i, j| f(coord(j), coord(i)));
        let boundary_sum = Grid::from_fn(m, m, |i, j| {
            let (x, y) = (coord(j), coord(i));
            let mut s = 0.0;
            if i == 0 {
                s += g(x, 0.0);
            }
            if i == m - 1 {
                s += g(x, 1.0);
            }
            if j == 0 {
                s += g(0.0, y);
            }
            if j == m - 1 {
                s += g(1.0, y);
            }
            s
        });
        Ok(Mesh { m, f, boundary_sum })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.m as f64 + 1.0)
    }

    pub fn source(&self) -> &Grid {
        &self.f
    }

    /// Node coordinates `(x, y)` of interior node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        ((j as f64 + 1.0) * h, (i as f64 + 1.0) * h)
    }
}

/// `A(c) = −Δ_h + diag(c)` on the interior nodes, with `c` clamped to `≥ 0`.
#[derive(Debug, Clone)]
pub struct EllipticOperator {
    m: usize,
    matrix: SparseMatrix,
}

impl EllipticOperator {
    pub fn assemble(m: usize, c: &Grid) -> Result<Self> {
        if c.shape() != (m, m) {
            return Err(Error::Shape(format!("coefficient is {:?}, mesh is {m}x{m}", c.shape())));
        }
        let h2 = (1.0 / (m as f64 + 1.0)).powi(2);
        let off = -1.0 / h2;
        let mut rows = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut row = Vec::with_capacity(5);
                if i > 0 {
                    row.push(((i - 1) * m + j, off));
                }
                if j > 0 {
                    row.push((i * m + j - 1, off));
                }
                row.push((i * m + j, 4.0 / h2 + c[(i, j)].max(0.0)));
                if j + 1 < m {
                    row.push((i * m + j + 1, off));
                }
                if i + 1 < m {
                    row.push(((i + 1) * m + j, off));
                }
                rows.push(row);
            }
        }
        Ok(EllipticOperator {
            m,
            matrix: SparseMatrix::from_rows(m * m, rows)?,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn factor(&self) -> Result<BandedCholesky> {
        BandedCholesky::factor(&self.matrix, self.m)
    }
}

/// `u(c)` together with the factorization of `A(c)`, reused for derivative
/// and adjoint solves.
#[derive(Debug, Clone)]
pub struct PdeState {
    u: Grid,
    chol: BandedCholesky,
}

impl PdeState {
    pub fn new(mesh: &Mesh, c: &Grid) -> Result<Self> {
        let m = mesh.m();
        let chol = EllipticOperator::assemble(m, c)?.factor()?;
        let inv_h2 = 1.0 / mesh.h().powi(2);
        let rhs: Vec<f64> = mesh
            .f
            .iter()
            .zip(mesh.boundary_sum.iter())
            .map(|(f, g)| f + inv_h2 * g)
            .collect();
        let u = Grid::from_vec(m, m, chol.solve(&rhs)?)?;
        Ok(PdeState { u, chol })
    }

    pub fn u(&self) -> &Grid {
        &self.u
    }

    fn solve_homogeneous(&self, rhs: &Grid) -> Result<Grid> {
        let (r, c) = self.u.shape();
        if rhs.shape() != (r, c) {
            return Err(Error::Shape(format!("expected {r}x{c}, got {:?}", rhs.shape())));
        }
        Grid::from_vec(r, c, self.chol.solve(rhs.as_slice())?)
    }

    /// `F'(c) h = −A(c)⁻¹(h ⊙ u(c))`
    pub fn derivative_apply(&self, h: &Grid) -> Result<Grid> {
        let mut out = self.solve_homogeneous(&h.hadamard(&self.u))?;
        out.scale(-1.0);
        Ok(out)
    }

    /// `F'(c)* w = −u(c) ⊙ A(c)⁻¹ w`
    pub fn adjoint_apply(&self, w: &Grid) -> Result<Grid> {
        let mut out = self.solve_homogeneous(w)?.hadamard(&self.u);
        out.scale(-1.0);
        Ok(out)
    }
}

pub fn solve_state(c: &Grid, mesh: &Mesh) -> Result<Grid> {
    Ok(PdeState::new(mesh, c)?.u)
}

/// `F(c) = u` with measured data `u^δ`, as a single block.
#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub mesh: Mesh,
    pub data: Grid,
}

struct PdeEval {
    state: PdeState,
    residual: Grid,
}

impl Linearization for PdeEval {
    fn residual(&self) -> &Grid {
        &self.residual
    }

    fn apply(&self, h: &Grid) -> Result<Grid> {
        self.state.derivative_apply(h)
    }

    fn apply_adjoint(&self, w: &Grid) -> Result<Grid> {
        self.state.adjoint_apply(w)
    }
}

impl ForwardProblem for PdeProblem {
    fn num_blocks(&self) -> usize {
        1
    }

    fn domain_shape(&self) -> (usize, usize) {
        (self.mesh.m(), self.mesh.m())
    }

    fn linearize(&self, _block: usize, x: &Grid) -> Result<Box<dyn Linearization + '_>> {
        let state = PdeState::new(&self.mesh, x)?;
        let residual = &state.u - &self.data;
        Ok(Box::new(PdeEval { state, residual }))
    }
}

/// Gaussian source peaking at 200 in the center.
pub fn default_source(x: f64, y: f64) -> f64 {
    200.0 * (-10.0 * (x - 0.5).powi(2) - 10.0 * (y - 0.5).powi(2)).exp()
}

/// Ground truth: a disk of height 1 around `(0.3, 0.3)` and a rectangle of
/// height 2 in the opposite corner, zero elsewhere.
pub fn default_coefficient(x: f64, y: f64) -> f64 {
    if (x - 0.3).powi(2) + (y - 0.3).powi(2) <= 0.15f64.powi(2) {
        1.0
    } else if (0.55..=0.85).contains(&x) && (0.55..=0.8).contains(&y) {
        2.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct PdeInstance {
    pub mesh: Mesh,
    pub truth: Grid,
}

/// The reference problem on an `m×m` interior grid with `g ≡ 1`.
pub fn default_problem(m: usize) -> Result<PdeInstance> {
    let mesh = Mesh::new(m, default_source, |_, _| 1.0)?;
    let truth = Grid::from_fn(m, m, |i, j| {
        let (x, y) = mesh.node(i, j);
        default_coefficient(x, y)
    });
    Ok(PdeInstance { mesh, truth })
}
