//! Row-compressed sparse matrices and their plain-text coordinate format.
//!
//! The text format is a header line `M Q NNZ` followed by one `row col value`
//! triple per line, zero-indexed, with values printed to 17 significant digits
//! so that a round trip through the file is exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assemble from per-row `(col, value)` lists. Columns inside a row are
    /// sorted and duplicates summed.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows.iter().cloned() {
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for (c, v) in row {
                if c >= cols {
                    return Err(Error::Dimension {
                        expected: cols,
                        actual: c + 1,
                    });
                }
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            rows: rows.len(),
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble from `(row, col, value)` triplets in any order.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut per_row = vec![Vec::new(); rows];
        for &(r, c, v) in triplets {
            if r >= rows {
                return Err(Error::Dimension {
                    expected: rows,
                    actual: r + 1,
                });
            }
            per_row[r].push((c, v));
        }
        Self::from_rows(cols, per_row)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(col, value)` pairs stored in row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows `start..end` as a new matrix with the same column count.
    pub fn row_block(&self, start: usize, end: usize) -> SparseMatrix {
        assert!(start <= end && end <= self.rows);
        let base = self.row_ptr[start];
        let row_ptr = self.row_ptr[start..=end].iter().map(|p| p - base).collect();
        let range = base..self.row_ptr[end];
        SparseMatrix {
            rows: end - start,
            cols: self.cols,
            row_ptr,
            col_idx: self.col_idx[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    /// `x = Aᵀ y`
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                actual: y.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            for (c, v) in self.row(r) {
                out[c] += v * yr;
            }
        }
        Ok(out)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let mut col_sums = vec![0.0; self.cols];
        for (_, c, v) in self.triplets() {
            col_sums[c] += v.abs();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut per_row = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            per_row[c].push((r, v));
        }
        SparseMatrix::from_rows(self.rows, per_row).expect("transpose indices are in range")
    }

    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.rows, self.cols, self.nnz())?;
        let mut line = String::new();
        for (r, c, v) in self.triplets() {
            line.clear();
            let _ = writeln!(line, "{r} {c} {v:.16e}");
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn save_coordinate(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_coordinate(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_coordinate<R: BufRead>(input: R, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = input.lines().enumerate();
        let (rows, cols, nnz) = loop {
            let Some((no, line)) = lines.next() else {
                return Err(parse_err(0, "missing header".into()));
            };
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(no + 1, format!("bad header: {e}")))?;
            if fields.len() != 3 {
                return Err(parse_err(no + 1, "header must be `M Q NNZ`".into()));
            }
            break (fields[0], fields[1], fields[2]);
        };
        let mut triplets = Vec::with_capacity(nnz);
        for (no, line) in lines {
            let line = line.map_err(|e| Error::io(origin, e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(r), Some(c), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
                return Err(parse_err(no + 1, "expected `row col value`".into()));
            };
            let r: usize = r.parse().map_err(|e| parse_err(no + 1, format!("row: {e}")))?;
            let c: usize = c.parse().map_err(|e| parse_err(no + 1, format!("col: {e}")))?;
            let v: f64 = v.parse().map_err(|e| parse_err(no + 1, format!("value: {e}")))?;
            if r >= rows || c >= cols {
                return Err(parse_err(no + 1, format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(parse_err(0, format!("header declares {nnz} entries, found {}", triplets.len())));
        }
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn load_coordinate(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_coordinate(std::io::BufReader::new(file), path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> SparseMatrix {
        SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (1, 1, 0.5)]).unwrap()
    }

    #[test]
    fn apply_and_adjoint() {
        let a = small();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.apply(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 3.5]);
        assert_eq!(a.apply_adjoint(&[1.0, 2.0]).unwrap(), vec![1.0, 7.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = small();
        assert!(matches!(a.apply(&[1.0]), Err(Error::Dimension { expected: 3, actual: 1 })));
        assert!(a.apply_adjoint(&[1.0; 3]).is_err());
    }

    #[test]
    fn row_block_keeps_columns() {
        let a = small();
        let b = a.row_block(1, 2);
        assert_eq!(b.rows(), 1);
        assert_eq!(b.cols(), 3);
        assert_eq!(b.row(0).collect::<Vec<_>>(), vec![(1, 3.5)]);
    }

    #[test]
    fn header_mismatch_rejected() {
        let text = "2 2 2\n0 0 1.0\n";
        assert!(SparseMatrix::read_coordinate(text.as_bytes(), Path::new("mem")).is_err());
    }

    proptest! {
        #[test]
        fn coordinate_round_trip_is_exact(
            entries in proptest::collection::vec((0usize..6, 0usize..5, -1e3f64..1e3), 0..30)
        ) {
            let a = SparseMatrix::from_triplets(6, 5, &entries).unwrap();
            let mut buf = Vec::new();
            a.write_coordinate(&mut buf).unwrap();
            let b = SparseMatrix::read_coordinate(buf.as_slice(), Path::new("mem")).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
