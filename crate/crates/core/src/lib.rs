//! Synchronization-free sparse lower-triangular solve (`Lx = b`) across
//! several processing elements (PEs).
//!
//! Each PE is a team of host threads that owns a slice of the components of
//! `x` and a published memory segment. Two engines are provided:
//!
//! * [`engine::solve_shared_atomics`]: every PE updates one set of shared
//!   counters and partial sums with atomic read-modify-write operations.
//! * [`engine::solve_partitioned`]: every PE writes only its own segment;
//!   other PEs read it (one-sided gets) and reduce the per-PE contributions.
//!
//! Supporting modules cover the CSC data model and Matrix Market IO
//! ([`matrix`]), the serial forward-substitution oracle ([`reference`]),
//! dependency and level-set analysis ([`analysis`]) and workload
//! distribution ([`partition`]).

pub mod analysis;
pub mod engine;
pub mod matrix;
pub mod partition;
pub mod reference;

pub use analysis::{compute_in_degrees, compute_level_schedule, compute_stats, LevelSchedule, MatrixStats};
pub use engine::{
    reduce_contributions, solve, solve_partitioned, solve_shared_atomics, Backoff, EngineKind, PeStats,
    SolveError, SolveReport, SolverConfig,
};
pub use matrix::{
    extract_lower_triangular, generate_synthetic, parse_matrix_market, spmv_lower, validate_lower_triangular,
    write_matrix_market, CscMatrix, DiagonalPolicy, MatrixError, SyntheticKind, SyntheticSpec, Violation,
};
pub use partition::{block_partition, task_round_robin_partition, PartitionError, PartitionKind, PartitionPlan, TaskRange};
pub use reference::{compare_solutions, residual_norm, solve_serial, SolutionComparison};
