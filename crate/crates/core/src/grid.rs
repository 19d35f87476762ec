//! Dense two-dimensional arrays of `f64` with the entrywise Euclidean norm.
//!
//! A `Grid` holds images, coefficient fields, dual iterates and residual
//! vectors alike. Vectors are stored as single-column grids. The shape is fixed
//! at construction and binary arithmetic panics on mismatched shapes, the same
//! contract `ndarray` uses for its operators.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Grid {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Column vector of length `n`.
    pub fn vector(data: Vec<f64>) -> Self {
        Grid {
            rows: data.len(),
            cols: 1,
            data,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {rows}x{cols} grid",
                data.len()
            )));
        }
        Ok(Grid { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Grid { rows, cols, data }
    }

    /// A zero grid with the same shape as `self`.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.rows, self.cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    /// Reinterpret the data with a new shape holding the same number of entries.
    pub fn reshape(self, rows: usize, cols: usize) -> Result<Self> {
        Grid::from_vec(rows, cols, self.data)
    }

    fn assert_same_shape(&self, other: &Grid) {
        assert_eq!(
            self.shape(),
            other.shape(),
            "grid shape mismatch: {:?} vs {:?}",
            self.shape(),
            other.shape()
        );
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Grid) -> f64 {
        self.assert_same_shape(other);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Entrywise Euclidean (Frobenius) norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Grid) {
        self.assert_same_shape(x);
        for (a, b) in self.data.iter_mut().zip(&x.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Grid {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_inplace(&mut self, f: impl Fn(f64) -> f64) {
        for v in &mut self.data {
            *v = f(*v);
        }
    }

    /// Entrywise combination of two grids of equal shape.
    pub fn zip_map(&self, other: &Grid, f: impl Fn(f64, f64) -> f64) -> Grid {
        self.assert_same_shape(other);
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Grid) -> Grid {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn distance(&self, other: &Grid) -> f64 {
        self.assert_same_shape(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for Grid {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Grid {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Grid {
    type Output = Grid;
    fn add(self, rhs: &Grid) -> Grid {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Grid {
    type Output = Grid;
    fn sub(self, rhs: &Grid) -> Grid {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Grid {
    type Output = Grid;
    fn mul(self, rhs: f64) -> Grid {
        self.scaled(rhs)
    }
}

impl Neg for &Grid {
    type Output = Grid;
    fn neg(self) -> Grid {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_frobenius() {
        let g = Grid::from_vec(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(g.norm(), 5.0);
        assert_eq!(Grid::zeros(3, 4).norm(), 0.0);
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(Grid::from_vec(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    #[should_panic(expected = "shape mismatch")]
    fn arithmetic_requires_matching_shapes() {
        let _ = &Grid::zeros(2, 3) + &Grid::zeros(3, 2);
    }

    #[test]
    fn row_major_indexing() {
        let g = Grid::from_fn(2, 3, |i, j| (10 * i + j) as f64);
        assert_eq!(g[(1, 2)], 12.0);
        assert_eq!(g.as_slice()[5], 12.0);
    }
}
