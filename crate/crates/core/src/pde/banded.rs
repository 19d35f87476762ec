//! Cholesky factorization of symmetric positive definite banded matrices.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// `A = L Lᵀ` with `L` lower triangular of half-bandwidth `bw`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // Row i holds L[i][i − bw ..= i] at i·(bw + 1) .. (i + 1)·(bw + 1).
    l: Vec<f64>,
}

impl BandedCholesky {
    /// Factor the lower triangle of `a`; entries outside the band are an error.
    pub fn factor(a: &SparseMatrix, bw: usize) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Shape(format!("{}x{} matrix is not square", n, a.cols())));
        }
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for (i, j, v) in a.triplets() {
            if j > i {
                continue;
            }
            if i - j > bw {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) lies outside half-bandwidth {bw}"
                )));
            }
            l[i * w + bw - (i - j)] += v;
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = l[i * w + bw - (i - j)];
                for k in klo..j {
                    s -= l[i * w + bw - (i - k)] * l[j * w + bw - (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: s });
                    }
                    l[i * w + bw] = s.sqrt();
                } else {
                    l[i * w + bw - (i - j)] = s / l[j * w + bw];
                }
            }
        }
        Ok(BandedCholesky { n, bw, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: b.len(),
            });
        }
        let (bw, w) = (self.bw, self.bw + 1);
        let mut x = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[i * w + bw - (i - k)] * x[k];
            }
            x[i] = s / self.l[i * w + bw];
        }
        for i in (0..self.n).rev() {
            let hi = (i + bw).min(self.n - 1);
            let mut s = x[i];
            for k in i + 1..=hi {
                s -= self.l[k * w + bw - (k - i)] * x[k];
            }
            x[i] = s / self.l[i * w + bw];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] has x = [1 1 1].
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)],
        )
        .unwrap();
        let chol = BandedCholesky::factor(&a, 1).unwrap();
        let x = chol.solve(&[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            BandedCholesky::factor(&a, 1),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn rejects_out_of_band() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (2, 0, 0.1), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        assert!(BandedCholesky::factor(&a, 1).is_err());
        assert!(BandedCholesky::factor(&a, 2).is_ok());
    }
}
