//! Seeded generators for lower-triangular test matrices.
//!
//! Off-diagonal values are drawn from `[-off_diag_max, off_diag_max]`. Apart
//! from `Bidiagonal`, every diagonal is `±(1 + Σ|l_ij|)` over its row, so the
//! generated systems are row diagonally dominant and `|x|∞ ≤ |b|∞`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CscMatrix, MatrixError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKind {
    /// No off-diagonal entries.
    Diagonal,
    /// Unit diagonal with `-1` on the first subdiagonal: a single chain.
    Bidiagonal,
    /// Each entry within `bandwidth` below the diagonal is stored with
    /// probability `density`. `bandwidth = n - 1` gives an unbanded random
    /// matrix.
    RandomBanded { bandwidth: usize, density: f64 },
    /// Dense lower-triangular diagonal blocks of size `block`.
    BlockDiagonal { block: usize },
    DenseLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub kind: SyntheticKind,
    pub n: usize,
    pub seed: u64,
    pub off_diag_max: f64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n: usize, seed: u64) -> Self {
        SyntheticSpec { kind, n, seed, off_diag_max: 1.0 }
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        let bad = |msg: String| Err(MatrixError::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.off_diag_max.is_finite() && self.off_diag_max > 0.0) {
            return bad(format!("off_diag_max must be positive and finite, got {}", self.off_diag_max));
        }
        match self.kind {
            SyntheticKind::RandomBanded { bandwidth, density } => {
                if bandwidth >= self.n {
                    return bad(format!("bandwidth {bandwidth} must be below n = {}", self.n));
                }
                if !(density > 0.0 && density <= 1.0) {
                    return bad(format!("density {density} must lie in (0, 1]"));
                }
            }
            SyntheticKind::BlockDiagonal { block } if block == 0 || block > self.n => {
                return bad(format!("block size {block} must lie in [1, {}]", self.n));
            }
            _ => {}
        }
        Ok(())
    }

    /// A short human-readable name, e.g. `block_diagonal_n4096_b32_s7`.
    pub fn name(&self) -> String {
        match self.kind {
            SyntheticKind::Diagonal => format!("diagonal_n{}_s{}", self.n, self.seed),
            SyntheticKind::Bidiagonal => format!("bidiagonal_n{}", self.n),
            SyntheticKind::RandomBanded { bandwidth, density } => {
                format!("random_banded_n{}_w{}_d{}_s{}", self.n, bandwidth, density, self.seed)
            }
            SyntheticKind::BlockDiagonal { block } => format!("block_diagonal_n{}_b{}_s{}", self.n, block, self.seed),
            SyntheticKind::DenseLower => format!("dense_lower_n{}_s{}", self.n, self.seed),
        }
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<CscMatrix, MatrixError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    if spec.kind == SyntheticKind::Bidiagonal {
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::with_capacity(2 * n);
        let mut values = Vec::with_capacity(2 * n);
        col_ptr.push(0);
        for j in 0..n {
            row_idx.push(j);
            values.push(1.0);
            if j + 1 < n {
                row_idx.push(j + 1);
                values.push(-1.0);
            }
            col_ptr.push(row_idx.len());
        }
        return CscMatrix::from_parts(n, col_ptr, row_idx, values);
    }

    // Build the strictly-lower pattern column by column, reserving slot 0 of
    // each column for the diagonal, and fill diagonals once row sums are known.
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    let mut row_abs_sum = vec![0.0f64; n];
    col_ptr.push(0);
    let amp = spec.off_diag_max;
    let mut push_off = |row_idx: &mut Vec<usize>, values: &mut Vec<f64>, rng: &mut ChaCha8Rng, i: usize| {
        let v = rng.gen_range(-amp..=amp);
        row_abs_sum[i] += v.abs();
        row_idx.push(i);
        values.push(v);
    };

    for j in 0..n {
        row_idx.push(j);
        values.push(0.0);
        match spec.kind {
            SyntheticKind::Diagonal | SyntheticKind::Bidiagonal => {}
            SyntheticKind::RandomBanded { bandwidth, density } => {
                let end = (j + bandwidth + 1).min(n);
                if density >= 1.0 {
                    for i in j + 1..end {
                        push_off(&mut row_idx, &mut values, &mut rng, i);
                    }
                } else {
                    // Geometric skipping: gaps between kept rows are
                    // Geometric(density), so sparse bands cost O(kept).
                    let log_q = (1.0 - density).ln();
                    let mut i = j;
                    loop {
                        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                        let skip = (u.ln() / log_q).floor();
                        if !skip.is_finite() || skip >= (end - i) as f64 {
                            break;
                        }
                        i += 1 + skip as usize;
                        if i >= end {
                            break;
                        }
                        push_off(&mut row_idx, &mut values, &mut rng, i);
                    }
                }
            }
            SyntheticKind::BlockDiagonal { block } => {
                let end = ((j / block + 1) * block).min(n);
                for i in j + 1..end {
                    push_off(&mut row_idx, &mut values, &mut rng, i);
                }
            }
            SyntheticKind::DenseLower => {
                for i in j + 1..n {
                    push_off(&mut row_idx, &mut values, &mut rng, i);
                }
            }
        }
        col_ptr.push(row_idx.len());
    }

    for j in 0..n {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let scale: f64 = rng.gen_range(1.0..2.0);
        values[col_ptr[j]] = sign * scale * (1.0 + row_abs_sum[j]);
    }
    CscMatrix::from_parts(n, col_ptr, row_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate_lower_triangular;

    #[test]
    fn diagonal_has_n_entries() {
        let m = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Diagonal, 4, 1)).unwrap();
        assert_eq!(m.nnz(), 4);
        assert!(validate_lower_triangular(&m).is_empty());
    }

    #[test]
    fn bidiagonal_values() {
        let m = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Bidiagonal, 5, 0)).unwrap();
        assert_eq!(m.nnz(), 9);
        for (r, c, v) in m.triplets() {
            assert_eq!(v, if r == c { 1.0 } else { -1.0 });
            assert!(r == c || r == c + 1);
        }
    }

    #[test]
    fn block_diagonal_pattern() {
        let m = generate_synthetic(&SyntheticSpec::new(SyntheticKind::BlockDiagonal { block: 2 }, 8, 3)).unwrap();
        // four dense 2x2 lower blocks
        assert_eq!(m.nnz(), 4 * 3);
        let m = generate_synthetic(&SyntheticSpec::new(SyntheticKind::BlockDiagonal { block: 3 }, 7, 3)).unwrap();
        assert_eq!(m.nnz(), 6 + 6 + 1);
    }

    #[test]
    fn dense_lower_is_full() {
        let m = generate_synthetic(&SyntheticSpec::new(SyntheticKind::DenseLower, 10, 3)).unwrap();
        assert_eq!(m.nnz(), 55);
    }

    #[test]
    fn banded_respects_bandwidth() {
        let spec = SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 3, density: 0.7 }, 200, 9);
        let m = generate_synthetic(&spec).unwrap();
        assert!(m.triplets().all(|(r, c, _)| r >= c && r - c <= 3));
        assert!(m.nnz() > 200);
        let full = SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 3, density: 1.0 }, 10, 9);
        assert_eq!(generate_synthetic(&full).unwrap().nnz(), 10 + 3 * 7 + 2 + 1);
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 99, density: 0.1 }, 100, 42);
        assert_eq!(generate_synthetic(&spec).unwrap(), generate_synthetic(&spec).unwrap());
        let other = SyntheticSpec { seed: 43, ..spec };
        assert_ne!(generate_synthetic(&spec).unwrap(), generate_synthetic(&other).unwrap());
    }

    #[test]
    fn diagonally_dominant() {
        let spec = SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 49, density: 0.5 }, 50, 5);
        let m = generate_synthetic(&spec).unwrap();
        let mut off = vec![0.0; 50];
        for (r, c, v) in m.triplets() {
            if r != c {
                assert!(v.abs() <= 1.0);
                off[r] += v.abs();
            }
        }
        for (j, s) in off.iter().enumerate() {
            assert!(m.diagonal(j).abs() >= 1.0 + s);
        }
    }

    #[test]
    fn invalid_specs() {
        let cases = [
            SyntheticSpec::new(SyntheticKind::Diagonal, 0, 0),
            SyntheticSpec::new(SyntheticKind::BlockDiagonal { block: 0 }, 4, 0),
            SyntheticSpec::new(SyntheticKind::BlockDiagonal { block: 5 }, 4, 0),
            SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 4, density: 0.5 }, 4, 0),
            SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 2, density: 0.0 }, 4, 0),
            SyntheticSpec::new(SyntheticKind::RandomBanded { bandwidth: 2, density: 1.5 }, 4, 0),
            SyntheticSpec { off_diag_max: -1.0, ..SyntheticSpec::new(SyntheticKind::Diagonal, 4, 0) },
        ];
        for spec in cases {
            assert!(matches!(generate_synthetic(&spec), Err(MatrixError::InvalidSpec(_))), "{spec:?}");
        }
    }
}
