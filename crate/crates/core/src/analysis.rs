//! Dependency structure: in-degrees, level sets and the summary metrics
//! `parallelism = ⌊n_rows / n_levels⌋` and `dependency = nnz / n_rows`.

use serde::{Deserialize, Serialize};

use crate::matrix::CscMatrix;

/// Number of stored off-diagonal entries in each row, i.e. how many earlier
/// components each component waits on. Explicit zeros count.
pub fn compute_in_degrees(l: &CscMatrix) -> Vec<usize> {
    let mut deg = vec![0usize; l.n()];
    for j in 0..l.n() {
        let (rows, _) = l.column(j);
        for &r in rows.iter().filter(|&&r| r != j) {
            deg[r] += 1;
        }
    }
    deg
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSchedule {
    pub level_of: Vec<usize>,
    pub levels: Vec<Vec<usize>>,
    pub n_levels: usize,
}

/// Earliest-level assignment: a component with no dependencies sits in level
/// 0, anything else one level after its deepest dependency.
pub fn compute_level_schedule(l: &CscMatrix) -> LevelSchedule {
    let n = l.n();
    let mut level_of = vec![0usize; n];
    // Columns ascend, so level_of[j] is final by the time column j is read.
    for j in 0..n {
        let next = level_of[j] + 1;
        let (rows, _) = l.column(j);
        for &r in rows.iter().filter(|&&r| r > j) {
            if level_of[r] < next {
                level_of[r] = next;
            }
        }
    }
    let n_levels = level_of.iter().max().map_or(0, |m| m + 1);
    let mut levels = vec![Vec::new(); n_levels];
    for (i, &lv) in level_of.iter().enumerate() {
        levels[lv].push(i);
    }
    LevelSchedule { level_of, levels, n_levels }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixStats {
    pub n_rows: usize,
    pub nnz: usize,
    pub n_levels: usize,
    pub parallelism: usize,
    pub dependency: f64,
}

impl MatrixStats {
    /// Derives the metrics from raw counts. `n_levels` must be nonzero
    /// whenever `n_rows` is.
    pub fn from_counts(n_rows: usize, nnz: usize, n_levels: usize) -> Self {
        let parallelism = n_rows.checked_div(n_levels).unwrap_or(0);
        let dependency = if n_rows == 0 { 0.0 } else { nnz as f64 / n_rows as f64 };
        MatrixStats { n_rows, nnz, n_levels, parallelism, dependency }
    }
}

pub fn compute_stats(l: &CscMatrix) -> MatrixStats {
    MatrixStats::from_counts(l.n(), l.nnz(), compute_level_schedule(l).n_levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_synthetic, SyntheticKind, SyntheticSpec};

    fn synth(kind: SyntheticKind, n: usize) -> CscMatrix {
        generate_synthetic(&SyntheticSpec::new(kind, n, 11)).unwrap()
    }

    #[test]
    fn in_degrees() {
        assert_eq!(compute_in_degrees(&synth(SyntheticKind::Diagonal, 5)), vec![0; 5]);
        assert_eq!(compute_in_degrees(&synth(SyntheticKind::Bidiagonal, 4)), vec![0, 1, 1, 1]);
    }

    /// Column 0 feeds rows 1, 3, 5 and 7, in the shape of the classic
    /// eight-component illustration.
    #[test]
    fn fan_out_from_first_column() {
        let mut t: Vec<_> = (0..8).map(|i| (i, i, 1.0)).collect();
        t.extend([(1, 0, 1.0), (3, 0, 1.0), (5, 0, 1.0), (7, 0, 1.0)]);
        let l = CscMatrix::from_triplets(8, t).unwrap();
        let deg = compute_in_degrees(&l);
        for i in [1, 3, 5, 7] {
            assert!(deg[i] >= 1);
        }
        let s = compute_level_schedule(&l);
        assert_eq!(s.level_of[0], 0);
        for i in [1, 3, 5] {
            assert_eq!(s.level_of[i], 1);
        }
    }

    #[test]
    fn level_schedules() {
        let s = compute_level_schedule(&synth(SyntheticKind::Diagonal, 6));
        assert_eq!(s.n_levels, 1);
        assert_eq!(s.levels, vec![(0..6).collect::<Vec<_>>()]);

        let s = compute_level_schedule(&synth(SyntheticKind::Bidiagonal, 5));
        assert_eq!(s.n_levels, 5);
        assert!(s.levels.iter().enumerate().all(|(k, lv)| lv == &vec![k]));

        let s = compute_level_schedule(&synth(SyntheticKind::Diagonal, 4));
        assert_eq!(s.n_levels, 1);
    }

    #[test]
    fn block_diagonal_parallelism() {
        // 8x8 with dense 2x2 lower blocks: levels {0,2,4,6} and {1,3,5,7}
        let l = synth(SyntheticKind::BlockDiagonal { block: 2 }, 8);
        let s = compute_level_schedule(&l);
        assert_eq!(s.levels, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
        assert_eq!(compute_stats(&l).parallelism, 4);
    }

    #[test]
    fn stats_from_counts() {
        assert_eq!(MatrixStats::from_counts(8_345_600, 118_931_856, 2).parallelism, 4_172_800);
        assert_eq!(MatrixStats::from_counts(116_835, 441_781, 14).parallelism, 8_345);
        let d = MatrixStats::from_counts(20_082, 150_616, 534).dependency;
        assert!((d - 7.500_049_795_837_068).abs() < 1e-12);
    }

    #[test]
    fn stats_of_synthetic() {
        let s = compute_stats(&synth(SyntheticKind::Bidiagonal, 100));
        assert_eq!((s.n_levels, s.parallelism), (100, 1));
        assert!((s.dependency - 1.99).abs() < 1e-15);
        let s = compute_stats(&synth(SyntheticKind::Diagonal, 100));
        assert_eq!((s.n_levels, s.parallelism, s.dependency), (1, 100, 1.0));
    }
}
