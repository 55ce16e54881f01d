use serde::{Deserialize, Serialize};

use super::{CscMatrix, MatrixError};

/// What [`extract_lower_triangular`] does with a column that has no stored
/// diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiagonalPolicy {
    #[default]
    RequireExplicit,
    InsertUnit,
}

/// One broken lower-triangular invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    ColPtrStart,
    ColPtrDecreasing { col: usize },
    ColPtrEnd,
    RowIndexOutOfRange { col: usize, row: usize },
    UnsortedColumn { col: usize },
    UpperTriangularEntry { col: usize, row: usize },
    MissingDiagonal(usize),
    ZeroDiagonal(usize),
    NonFiniteValue { col: usize, row: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ColPtrStart => write!(f, "ColPtrStart: col_ptr[0] is not 0"),
            Violation::ColPtrDecreasing { col } => write!(f, "ColPtrDecreasing: at column {col}"),
            Violation::ColPtrEnd => write!(f, "ColPtrEnd: col_ptr[n] is not nnz"),
            Violation::RowIndexOutOfRange { col, row } => write!(f, "RowIndexOutOfRange: row {row} in column {col}"),
            Violation::UnsortedColumn { col } => write!(f, "UnsortedColumn: column {col}"),
            Violation::UpperTriangularEntry { col, row } => {
                write!(f, "UpperTriangularEntry: ({row}, {col}) is above the diagonal")
            }
            Violation::MissingDiagonal(c) => write!(f, "MissingDiagonal: column {c}"),
            Violation::ZeroDiagonal(c) => write!(f, "ZeroDiagonal: column {c}"),
            Violation::NonFiniteValue { col, row } => write!(f, "NonFiniteValue: ({row}, {col})"),
        }
    }
}

impl From<Violation> for MatrixError {
    fn from(v: Violation) -> Self {
        match v {
            Violation::MissingDiagonal(c) => MatrixError::MissingDiagonal(c),
            Violation::ZeroDiagonal(c) => MatrixError::ZeroDiagonal(c),
            other => MatrixError::InvalidStructure(other.to_string()),
        }
    }
}

/// Keeps entries with `row >= col`. Explicit off-diagonal zeros survive.
pub fn extract_lower_triangular(a: &CscMatrix, policy: DiagonalPolicy) -> Result<CscMatrix, MatrixError> {
    let n = a.n();
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::with_capacity(a.nnz() / 2 + n);
    let mut values = Vec::with_capacity(a.nnz() / 2 + n);
    col_ptr.push(0);
    for j in 0..n {
        let (rows, vals) = a.column(j);
        let start = rows.partition_point(|&r| r < j);
        let (rows, vals) = (&rows[start..], &vals[start..]);
        match rows.first() {
            Some(&r) if r == j => {
                if vals[0] == 0.0 {
                    return Err(MatrixError::ZeroDiagonal(j));
                }
            }
            _ => match policy {
                DiagonalPolicy::RequireExplicit => return Err(MatrixError::MissingDiagonal(j)),
                DiagonalPolicy::InsertUnit => {
                    row_idx.push(j);
                    values.push(1.0);
                }
            },
        }
        row_idx.extend_from_slice(rows);
        values.extend_from_slice(vals);
        col_ptr.push(row_idx.len());
    }
    CscMatrix::from_parts(n, col_ptr, row_idx, values)
}

/// Lists every broken invariant of a lower-triangular CSC matrix; empty
/// means valid. Works on raw arrays so that corrupt inputs can be inspected.
pub fn validate_lower_triangular(l: &CscMatrix) -> Vec<Violation> {
    validate_parts(l.n(), l.col_ptr(), l.row_idx(), l.values())
}

pub(crate) fn validate_parts(n: usize, col_ptr: &[usize], row_idx: &[usize], values: &[f64]) -> Vec<Violation> {
    let mut report = Vec::new();
    if col_ptr.first() != Some(&0) {
        report.push(Violation::ColPtrStart);
    }
    if col_ptr.len() != n + 1 || col_ptr[n] != row_idx.len() {
        report.push(Violation::ColPtrEnd);
        return report;
    }
    for j in 0..n {
        let (lo, hi) = (col_ptr[j], col_ptr[j + 1]);
        if lo > hi || hi > row_idx.len() {
            report.push(Violation::ColPtrDecreasing { col: j });
            continue;
        }
        let rows = &row_idx[lo..hi];
        let vals = &values[lo..hi];
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            report.push(Violation::UnsortedColumn { col: j });
        }
        for (&r, &v) in rows.iter().zip(vals) {
            if r >= n {
                report.push(Violation::RowIndexOutOfRange { col: j, row: r });
            } else if r < j {
                report.push(Violation::UpperTriangularEntry { col: j, row: r });
            }
            if !v.is_finite() {
                report.push(Violation::NonFiniteValue { col: j, row: r });
            }
        }
        match rows.first() {
            Some(&r) if r == j => {
                if vals[0] == 0.0 {
                    report.push(Violation::ZeroDiagonal(j));
                }
            }
            _ => {
                if !rows.contains(&j) {
                    report.push(Violation::MissingDiagonal(j));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unchanged() {
        let i = CscMatrix::identity(4);
        assert_eq!(extract_lower_triangular(&i, DiagonalPolicy::RequireExplicit).unwrap(), i);
    }

    #[test]
    fn drops_strict_upper() {
        let a = CscMatrix::from_triplets(2, [(0, 0, 2.0), (0, 1, 5.0), (1, 0, 1.0), (1, 1, 3.0)]).unwrap();
        let l = extract_lower_triangular(&a, DiagonalPolicy::RequireExplicit).unwrap();
        assert_eq!(l.triplets().collect::<Vec<_>>(), vec![(0, 0, 2.0), (1, 0, 1.0), (1, 1, 3.0)]);
    }

    #[test]
    fn insert_unit_diagonal() {
        let a = CscMatrix::from_triplets(2, [(1, 0, 4.0)]).unwrap();
        let l = extract_lower_triangular(&a, DiagonalPolicy::InsertUnit).unwrap();
        assert_eq!(l.nnz(), 3);
        assert_eq!(l.triplets().collect::<Vec<_>>(), vec![(0, 0, 1.0), (1, 0, 4.0), (1, 1, 1.0)]);
        assert!(validate_lower_triangular(&l).is_empty());
    }

    #[test]
    fn missing_and_zero_diagonal() {
        let a = CscMatrix::from_triplets(2, [(1, 0, 4.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(
            extract_lower_triangular(&a, DiagonalPolicy::RequireExplicit),
            Err(MatrixError::MissingDiagonal(0))
        );
        let a = CscMatrix::from_triplets(2, [(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(extract_lower_triangular(&a, DiagonalPolicy::InsertUnit), Err(MatrixError::ZeroDiagonal(1)));
    }

    #[test]
    fn validation_reports() {
        let bidiag = CscMatrix::from_triplets(3, [(0, 0, 1.0), (1, 0, -1.0), (1, 1, 1.0), (2, 1, -1.0), (2, 2, 1.0)])
            .unwrap();
        assert!(validate_lower_triangular(&bidiag).is_empty());

        let upper = CscMatrix::from_triplets(2, [(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(validate_lower_triangular(&upper).contains(&Violation::UpperTriangularEntry { col: 1, row: 0 }));

        let zero = CscMatrix::from_triplets(4, (0..4).map(|i| (i, i, if i == 3 { 0.0 } else { 1.0 }))).unwrap();
        assert_eq!(validate_lower_triangular(&zero), vec![Violation::ZeroDiagonal(3)]);

        let missing = CscMatrix::from_triplets(2, [(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(validate_lower_triangular(&missing), vec![Violation::MissingDiagonal(1)]);
    }

    #[test]
    fn validation_of_raw_parts() {
        let report = validate_parts(2, &[1, 1, 2], &[0, 1], &[1.0, 1.0]);
        assert!(report.contains(&Violation::ColPtrStart));
        let report = validate_parts(2, &[0, 2, 3], &[1, 0, 1], &[1.0, 1.0, f64::NAN]);
        assert!(report.contains(&Violation::UnsortedColumn { col: 0 }));
        assert!(report.contains(&Violation::NonFiniteValue { col: 1, row: 1 }));
        assert_eq!(validate_parts(2, &[0, 1], &[0], &[1.0]), vec![Violation::ColPtrEnd]);
    }
}
