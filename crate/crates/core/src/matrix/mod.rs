//! Compressed-sparse-column storage for square lower-triangular matrices.

mod mtx;
mod synthetic;
mod triangular;

pub use mtx::{parse_matrix_market, write_matrix_market};
pub use synthetic::{generate_synthetic, SyntheticKind, SyntheticSpec};
pub use triangular::{extract_lower_triangular, validate_lower_triangular, DiagonalPolicy, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("MalformedHeader: {0}")]
    MalformedHeader(String),
    #[error("MalformedEntry: line {line}: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("NonSquare: matrix is {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("IndexOutOfRange: entry ({row}, {col}) outside a {n}x{n} matrix (1-based)")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("ComplexFieldUnsupported: complex matrices are not supported")]
    ComplexFieldUnsupported,
    #[error("MissingDiagonal: column {0} has no stored diagonal entry")]
    MissingDiagonal(usize),
    #[error("ZeroDiagonal: column {0} has a zero diagonal entry")]
    ZeroDiagonal(usize),
    #[error("DimensionMismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
    #[error("InvalidStructure: {0}")]
    InvalidStructure(String),
    #[error("Io: {0}")]
    Io(String),
}

impl From<std::io::Error> for MatrixError {
    fn from(e: std::io::Error) -> Self {
        MatrixError::Io(e.to_string())
    }
}

/// Square sparse matrix in compressed-sparse-column form.
///
/// Row indices are strictly increasing within each column. For a validated
/// lower-triangular matrix this puts the diagonal first, so `l_jj` is
/// `values[col_ptr[j]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds a matrix from raw CSC arrays, checking only the structural
    /// invariants (offsets, index bounds, ascending rows). Triangularity is
    /// checked separately by [`validate_lower_triangular`].
    pub fn from_parts(
        n: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, MatrixError> {
        if col_ptr.len() != n + 1 {
            return Err(MatrixError::InvalidStructure(format!(
                "col_ptr has length {}, expected {}",
                col_ptr.len(),
                n + 1
            )));
        }
        if row_idx.len() != values.len() {
            return Err(MatrixError::InvalidStructure(format!(
                "row_idx has length {} but values has length {}",
                row_idx.len(),
                values.len()
            )));
        }
        if col_ptr[0] != 0 || col_ptr[n] != row_idx.len() {
            return Err(MatrixError::InvalidStructure(
                "col_ptr must start at 0 and end at nnz".into(),
            ));
        }
        for j in 0..n {
            let (lo, hi) = (col_ptr[j], col_ptr[j + 1]);
            if lo > hi {
                return Err(MatrixError::InvalidStructure(format!("col_ptr decreases at column {j}")));
            }
            let rows = &row_idx[lo..hi];
            if let Some(&r) = rows.iter().find(|&&r| r >= n) {
                return Err(MatrixError::IndexOutOfRange { row: r + 1, col: j + 1, n });
            }
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MatrixError::InvalidStructure(format!(
                    "row indices of column {j} are not strictly increasing"
                )));
            }
        }
        Ok(CscMatrix { n, col_ptr, row_idx, values })
    }

    /// Builds a matrix from `(row, col, value)` triplets (0-based). Duplicate
    /// positions are summed; explicit zeros are kept.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self, MatrixError> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= n || c >= n {
                return Err(MatrixError::IndexOutOfRange { row: r + 1, col: c + 1, n });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));

        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(CscMatrix { n, col_ptr, row_idx, values })
    }

    pub fn identity(n: usize) -> Self {
        CscMatrix {
            n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values stored in column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    /// Stored diagonal of column `j` of a validated lower-triangular matrix.
    #[inline]
    pub fn diagonal(&self, j: usize) -> f64 {
        self.values[self.col_ptr[j]]
    }

    /// Iterates `(row, col, value)` in column-major storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            let (rows, vals) = self.column(j);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, j, v))
        })
    }
}

/// `y = L x`, accumulated column by column in storage order.
pub fn spmv_lower(l: &CscMatrix, x: &[f64]) -> Result<Vec<f64>, MatrixError> {
    if x.len() != l.n() {
        return Err(MatrixError::DimensionMismatch { expected: l.n(), actual: x.len() });
    }
    let mut y = vec![0.0; l.n()];
    for (j, &xj) in x.iter().enumerate() {
        let (rows, vals) = l.column(j);
        for (&r, &v) in rows.iter().zip(vals) {
            y[r] += v * xj;
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CscMatrix {
        CscMatrix::from_triplets(2, [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap()
    }

    #[test]
    fn spmv_identity() {
        let y = spmv_lower(&CscMatrix::identity(2), &[3.0, 7.0]).unwrap();
        assert_eq!(y, vec![3.0, 7.0]);
    }

    #[test]
    fn spmv_small_lower() {
        assert_eq!(spmv_lower(&small(), &[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
    }

    #[test]
    fn spmv_bidiagonal() {
        let l = CscMatrix::from_triplets(3, [(0, 0, 1.0), (1, 0, -1.0), (1, 1, 1.0), (2, 1, -1.0), (2, 2, 1.0)])
            .unwrap();
        assert_eq!(spmv_lower(&l, &[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(matches!(
            spmv_lower(&small(), &[1.0]),
            Err(MatrixError::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = CscMatrix::from_triplets(2, [(1, 0, 1.0), (0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.col_ptr(), &[0, 2, 2]);
        assert_eq!(m.row_idx(), &[0, 1]);
        assert_eq!(m.values(), &[3.0, 1.0]);
    }

    #[test]
    fn from_parts_rejects_unsorted_rows() {
        let err = CscMatrix::from_parts(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, MatrixError::InvalidStructure(_)));
    }

    #[test]
    fn from_parts_rejects_bad_offsets() {
        assert!(CscMatrix::from_parts(2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CscMatrix::from_parts(2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
    }
}
