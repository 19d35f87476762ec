//! Forward operators `F_i` split into Kaczmarz blocks.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::sparse::SparseMatrix;

/// A system `F_i(x) = y_i`, `i = 0..N`, with data folded in.
pub trait ForwardProblem {
    fn num_blocks(&self) -> usize;

    /// Shape of the unknown `x`.
    fn domain_shape(&self) -> (usize, usize);

    /// Evaluate block `block` at `x`: the residual `F_i(x) − y_i` and the
    /// linearization `L_i(x)` used for the update direction.
    fn linearize(&self, block: usize, x: &Grid) -> Result<Box<dyn Linearization + '_>>;
}

/// Block `i` of a forward problem evaluated at a fixed point `x`.
pub trait Linearization {
    /// `F_i(x) − y_i`
    fn residual(&self) -> &Grid;

    /// `L_i(x) h`
    fn apply(&self, h: &Grid) -> Result<Grid>;

    /// `L_i(x)* w`
    fn apply_adjoint(&self, w: &Grid) -> Result<Grid>;
}

#[derive(Debug, Clone)]
pub struct LinearBlock {
    pub matrix: SparseMatrix,
    pub data: Grid,
}

/// `A_i x = y_i` with sparse `A_i`; `L_i(x) = A_i` for every `x`.
#[derive(Debug, Clone)]
pub struct LinearProblem {
    shape: (usize, usize),
    blocks: Vec<LinearBlock>,
}

impl LinearProblem {
    pub fn new(shape: (usize, usize), blocks: Vec<LinearBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("a linear problem needs at least one block".into()));
        }
        let q = shape.0 * shape.1;
        for b in &blocks {
            if b.matrix.cols() != q {
                return Err(Error::Dimension {
                    expected: q,
                    actual: b.matrix.cols(),
                });
            }
            if b.data.len() != b.matrix.rows() {
                return Err(Error::Dimension {
                    expected: b.matrix.rows(),
                    actual: b.data.len(),
                });
            }
        }
        Ok(LinearProblem { shape, blocks })
    }

    /// Split `matrix` and `data` into `n` contiguous row groups whose
    /// boundaries fall on multiples of `row_group` rows (one projection angle
    /// in tomography). Groups are distributed as evenly as possible.
    pub fn partitioned(
        shape: (usize, usize),
        matrix: &SparseMatrix,
        data: &Grid,
        n: usize,
        row_group: usize,
    ) -> Result<Self> {
        if n == 0 || row_group == 0 || matrix.rows() % row_group != 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot split {} rows into {n} blocks of whole {row_group}-row groups",
                matrix.rows()
            )));
        }
        let groups = matrix.rows() / row_group;
        if n > groups {
            return Err(Error::InvalidArgument(format!(
                "{n} blocks requested but only {groups} row groups exist"
            )));
        }
        if data.len() != matrix.rows() {
            return Err(Error::Dimension {
                expected: matrix.rows(),
                actual: data.len(),
            });
        }
        let blocks = (0..n)
            .map(|b| {
                let start = b * groups / n * row_group;
                let end = (b + 1) * groups / n * row_group;
                LinearBlock {
                    matrix: matrix.row_block(start, end),
                    data: Grid::vector(data.as_slice()[start..end].to_vec()),
                }
            })
            .collect();
        Self::new(shape, blocks)
    }

    pub fn blocks(&self) -> &[LinearBlock] {
        &self.blocks
    }
}

struct LinearEval<'a> {
    matrix: &'a SparseMatrix,
    residual: Grid,
    shape: (usize, usize),
}

impl Linearization for LinearEval<'_> {
    fn residual(&self) -> &Grid {
        &self.residual
    }

    fn apply(&self, h: &Grid) -> Result<Grid> {
        Ok(Grid::vector(self.matrix.apply(h.as_slice())?))
    }

    fn apply_adjoint(&self, w: &Grid) -> Result<Grid> {
        let (rows, cols) = self.shape;
        Grid::from_vec(rows, cols, self.matrix.apply_adjoint(w.as_slice())?)
    }
}

impl ForwardProblem for LinearProblem {
    fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn domain_shape(&self) -> (usize, usize) {
        self.shape
    }

    fn linearize(&self, block: usize, x: &Grid) -> Result<Box<dyn Linearization + '_>> {
        let b = &self.blocks[block];
        let mut residual = Grid::vector(b.matrix.apply(x.as_slice())?);
        residual.axpy(-1.0, &b.data);
        Ok(Box::new(LinearEval {
            matrix: &b.matrix,
            residual,
            shape: self.shape,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_keeps_row_groups_whole() {
        let triplets: Vec<_> = (0..12).map(|r| (r, r % 4, 1.0 + r as f64)).collect();
        let a = SparseMatrix::from_triplets(12, 4, &triplets).unwrap();
        let y = Grid::vector((0..12).map(|r| r as f64).collect());
        let p = LinearProblem::partitioned((2, 2), &a, &y, 2, 3).unwrap();
        assert_eq!(p.num_blocks(), 2);
        assert_eq!(p.blocks()[0].matrix.rows(), 6);
        assert_eq!(p.blocks()[1].data.as_slice(), &[6.0, 7.0, 8.0, 9.0, 10.0, 11.0]);
        assert!(LinearProblem::partitioned((2, 2), &a, &y, 5, 3).is_err());
        assert!(LinearProblem::partitioned((2, 2), &a, &y, 2, 5).is_err());
    }

    #[test]
    fn residual_and_adjoint() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0)]).unwrap();
        let p = LinearProblem::new(
            (1, 2),
            vec![LinearBlock {
                matrix: a,
                data: Grid::vector(vec![1.0, 1.0]),
            }],
        )
        .unwrap();
        let x = Grid::from_vec(1, 2, vec![1.0, 1.0]).unwrap();
        let lin = p.linearize(0, &x).unwrap();
        assert_eq!(lin.residual().as_slice(), &[1.0, 2.0]);
        let g = lin.apply_adjoint(lin.residual()).unwrap();
        assert_eq!(g.shape(), (1, 2));
        assert_eq!(g.as_slice(), &[2.0, 6.0]);
    }
}
