//! Shared-atomics engine: one in-degree/left-sum pair for the whole system,
//! updated by every PE with atomic read-modify-writes, plus PE-private
//! arrays for dependencies that stay on one PE.
//!
//! `s_in_degree[i]` starts at the number of stored entries of row `i`
//! including the diagonal (`dep(i) + 1`) and is decremented once per
//! dependency satisfied from another PE; `d_in_degree[i]` on the owner
//! counts dependencies satisfied locally. Component `i` is ready exactly
//! when `d_in_degree[i] + 1 == s_in_degree[i]`.

use std::sync::atomic::{AtomicI64, Ordering::*};

use super::atomic::{zeroed_f64, AtomicF64};
use super::{check_inputs, run_team, Aborted, EngineKind, Layout, PeStats, SolveError, SolveReport, SolverConfig};
use crate::matrix::CscMatrix;
use crate::partition::PartitionPlan;

struct PrivateArrays {
    d_in_degree: Vec<AtomicI64>,
    d_left_sum: Vec<AtomicF64>,
}

pub fn solve_shared_atomics(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    check_inputs(l, b, plan, cfg, EngineKind::SharedAtomics)?;
    let n = l.n();
    let layout = Layout::new(plan);
    let owners = plan.owners();

    let s_in_degree: Vec<AtomicI64> = (0..n).map(|_| AtomicI64::new(0)).collect();
    let s_left_sum = zeroed_f64(n);
    let private: Vec<PrivateArrays> = layout
        .owned
        .iter()
        .map(|o| PrivateArrays {
            d_in_degree: (0..o.len()).map(|_| AtomicI64::new(0)).collect(),
            d_left_sum: zeroed_f64(o.len()),
        })
        .collect();
    let x = zeroed_f64(n);

    let (per_pe, timing) = run_team(cfg, |worker| {
        let (pe, workers) = (worker.pe, cfg.workers_per_pe);
        let mine = &private[pe];

        for j in layout.worker_share(pe, worker.index, workers) {
            for &r in l.column(j).0 {
                s_in_degree[r].fetch_add(1, Relaxed);
            }
        }
        worker.setup_done();

        let mut stats = PeStats::default();
        for i in layout.worker_share(pe, worker.index, workers) {
            let li = layout.local_index[i];
            worker.waiter.reset();
            loop {
                let local = mine.d_in_degree[li].load(Acquire);
                let shared = s_in_degree[i].load(Acquire);
                stats.remote_reads_issued += 1;
                if local + 1 == shared {
                    break;
                }
                stats.lock_wait_spins += 1;
                worker.waiter.pause()?;
            }

            let (rows, vals) = l.column(i);
            let remote_sum = s_left_sum[i].load(Acquire);
            stats.remote_reads_issued += 1;
            let xi = (b[i] - mine.d_left_sum[li].load(Acquire) - remote_sum) / vals[0];
            x[i].store(xi, Relaxed);
            stats.components_solved += 1;

            for (&rid, &v) in rows[1..].iter().zip(&vals[1..]) {
                if owners[rid] == pe {
                    let lr = layout.local_index[rid];
                    mine.d_left_sum[lr].fetch_add(v * xi, Relaxed);
                    mine.d_in_degree[lr].fetch_add(1, Release);
                    stats.local_updates += 1;
                } else {
                    s_left_sum[rid].fetch_add(v * xi, Relaxed);
                    s_in_degree[rid].fetch_sub(1, Release);
                    stats.remote_updates += 1;
                }
            }
        }
        Ok::<_, Aborted>(stats)
    })?;

    let x = x.iter().map(|v| v.load(Relaxed)).collect();
    let report = SolveReport {
        engine: EngineKind::SharedAtomics,
        n_pes: cfg.n_pes,
        workers_per_pe: cfg.workers_per_pe,
        setup_time: timing.setup_time,
        solve_time: timing.solve_time,
        wall_time: timing.setup_time + timing.solve_time,
        per_pe,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{generate_synthetic, SyntheticKind, SyntheticSpec};
    use crate::partition::{block_partition, task_round_robin_partition};
    use crate::reference::{compare_solutions, solve_serial};

    fn cfg(n_pes: usize, workers: usize) -> SolverConfig {
        SolverConfig::new(EngineKind::SharedAtomics, n_pes, workers)
    }

    #[test]
    fn identity_returns_rhs() {
        let b: Vec<f64> = (0..10).map(|i| i as f64 - 3.5).collect();
        let plan = task_round_robin_partition(10, 3, 2).unwrap();
        let (x, report) = solve_shared_atomics(&CscMatrix::identity(10), &b, &plan, &cfg(3, 2)).unwrap();
        assert_eq!(x, b);
        assert_eq!(report.total().lock_wait_spins, 0);
        assert_eq!(report.total().components_solved, 10);
    }

    #[test]
    fn three_by_three_on_two_pes() {
        let l = CscMatrix::from_triplets(3, [(0, 0, 2.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 3.0), (2, 2, 4.0)]).unwrap();
        let (x, _) = solve_shared_atomics(&l, &[2.0, 2.0, 7.0], &block_partition(3, 2).unwrap(), &cfg(2, 1)).unwrap();
        assert!(compare_solutions(&x, &[1.0, 1.0, 1.0], 1e-12).unwrap().within_tol);
    }

    #[test]
    fn bidiagonal_chain_waits() {
        let l = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Bidiagonal, 1000, 0)).unwrap();
        let b: Vec<f64> = (0..1000).map(|i| ((i * 7) % 11) as f64).collect();
        let plan = task_round_robin_partition(1000, 4, 4).unwrap();
        let (x, report) = solve_shared_atomics(&l, &b, &plan, &cfg(4, 1)).unwrap();
        let oracle = solve_serial(&l, &b).unwrap();
        assert!(compare_solutions(&x, &oracle, 1e-9).unwrap().within_tol);
        let later: u64 = report.per_pe[1..].iter().map(|s| s.lock_wait_spins).sum();
        assert!(later > 0, "{report:?}");
        assert!(report.total().remote_updates >= 15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = CscMatrix::identity(3);
        let plan = block_partition(3, 1).unwrap();
        assert!(matches!(
            solve_shared_atomics(&l, &[1.0], &plan, &cfg(1, 1)),
            Err(SolveError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            solve_shared_atomics(&l, &[1.0; 3], &plan, &cfg(2, 1)),
            Err(SolveError::InvalidConfig(_))
        ));
        let z = CscMatrix::from_triplets(2, [(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(
            solve_shared_atomics(&z, &[1.0; 2], &block_partition(2, 1).unwrap(), &cfg(1, 1)),
            Err(SolveError::ZeroDiagonal(1))
        );
        let wrong_engine = SolverConfig::new(EngineKind::PartitionedReadOnly, 1, 1);
        assert!(solve_shared_atomics(&l, &[1.0; 3], &plan, &wrong_engine).is_err());
    }
}
