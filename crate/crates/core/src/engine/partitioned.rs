//! Partitioned engine with read-only communication between PEs.
//!
//! Every PE owns a published segment (`s_in_degree`, `s_left_sum`, length
//! `n`) and private arrays over its own components. A PE only ever writes
//! its own segment; other PEs fetch values from it and reduce the per-PE
//! contributions themselves.
//!
//! Setup: PE `p` sets `s_in_degree[p][r]` to the number of entries of row
//! `r` stored in `p`'s columns, diagonal included, so that
//! `Σ_q s_in_degree[q][i] = dep(i) + 1` with no cross-PE traffic.
//!
//! Solving component `i` on its owner `p`:
//! 1. fetch `s_in_degree[q][i]` from every PE `q` (skipping any already seen
//!    at 0 when caching is on) and reduce; wait until
//!    `d_in_degree[i] + 1` equals the reduced count;
//! 2. fetch and reduce `s_left_sum[q][i]`;
//! 3. `x_i = (b_i − d_left_sum[i] − Σ_q s_left_sum[q][i]) / l_ii`;
//! 4. for each dependent row `r`: on `p`, add into `d_left_sum[r]` and bump
//!    `d_in_degree[r]`; elsewhere, add into `p`'s own `s_left_sum[r]`, then
//!    decrement `p`'s own `s_in_degree[r]` with release ordering so that a
//!    reader that sees the decrement also sees the sum.
//!
//! Published in-degrees only ever decrease after setup, so a cached zero
//! stays valid.

use std::sync::atomic::{AtomicI64, Ordering::*};

use serde::Serialize;

use super::atomic::{zeroed_f64, AtomicF64};
use super::reduce::reduce_in_place;
use super::{check_inputs, run_team, Aborted, EngineKind, Layout, PeStats, SolveError, SolveReport, SolverConfig};
use crate::matrix::CscMatrix;
use crate::partition::PartitionPlan;

/// One PE's published segment and private arrays.
struct PeSymmetricState {
    owner: usize,
    s_in_degree: Vec<AtomicI64>,
    s_left_sum: Vec<AtomicF64>,
    d_in_degree: Vec<AtomicI64>,
    d_left_sum: Vec<AtomicF64>,
}

impl PeSymmetricState {
    fn new(owner: usize, n: usize, n_owned: usize) -> Self {
        PeSymmetricState {
            owner,
            s_in_degree: (0..n).map(|_| AtomicI64::new(0)).collect(),
            s_left_sum: zeroed_f64(n),
            d_in_degree: (0..n_owned).map(|_| AtomicI64::new(0)).collect(),
            d_left_sum: zeroed_f64(n_owned),
        }
    }

    /// Write handle; only the owning PE may hold one.
    fn local(&self, pe: usize) -> LocalSegment<'_> {
        debug_assert_eq!(self.owner, pe, "PE {pe} asked for write access to PE {}'s segment", self.owner);
        LocalSegment(self)
    }

    fn remote(&self) -> RemoteSegment<'_> {
        RemoteSegment(self)
    }
}

/// Read-only view of another PE's published arrays.
#[derive(Clone, Copy)]
struct RemoteSegment<'a>(&'a PeSymmetricState);

impl RemoteSegment<'_> {
    #[inline]
    fn get_in_degree(&self, i: usize) -> i64 {
        self.0.s_in_degree[i].load(Acquire)
    }

    #[inline]
    fn get_left_sum(&self, i: usize) -> f64 {
        self.0.s_left_sum[i].load(Acquire)
    }
}

struct LocalSegment<'a>(&'a PeSymmetricState);

impl LocalSegment<'_> {
    #[inline]
    fn count_entry(&self, row: usize) {
        self.0.s_in_degree[row].fetch_add(1, Relaxed);
    }

    /// Publishes one satisfied dependency of a component owned elsewhere.
    #[inline]
    fn publish(&self, row: usize, contribution: f64) {
        self.0.s_left_sum[row].fetch_add(contribution, Relaxed);
        self.0.s_in_degree[row].fetch_sub(1, Release);
    }

    #[inline]
    fn satisfy_local(&self, slot: usize, contribution: f64) {
        self.0.d_left_sum[slot].fetch_add(contribution, Relaxed);
        self.0.d_in_degree[slot].fetch_add(1, Release);
    }

    #[inline]
    fn local_in_degree(&self, slot: usize) -> i64 {
        self.0.d_in_degree[slot].load(Acquire)
    }

    #[inline]
    fn local_left_sum(&self, slot: usize) -> f64 {
        self.0.d_left_sum[slot].load(Acquire)
    }
}

/// Final contents of one PE's arrays after a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeSnapshot {
    pub s_in_degree: Vec<i64>,
    pub s_left_sum: Vec<f64>,
    /// Indexed like `PartitionedSnapshot::owned[pe]`.
    pub d_in_degree: Vec<i64>,
    pub d_left_sum: Vec<f64>,
}

/// Per-PE array contents after a partitioned solve, for checking the
/// in-degree and left-sum accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionedSnapshot {
    pub owned: Vec<Vec<usize>>,
    pub owner_of: Vec<usize>,
    pub local_index: Vec<usize>,
    pub pes: Vec<PeSnapshot>,
}

impl PartitionedSnapshot {
    /// `Σ_q s_in_degree[q][i]`.
    pub fn published_in_degree(&self, i: usize) -> i64 {
        self.pes.iter().map(|p| p.s_in_degree[i]).sum()
    }

    pub fn published_left_sum(&self, i: usize) -> f64 {
        self.pes.iter().map(|p| p.s_left_sum[i]).sum()
    }

    pub fn local_in_degree(&self, i: usize) -> i64 {
        self.pes[self.owner_of[i]].d_in_degree[self.local_index[i]]
    }

    pub fn local_left_sum(&self, i: usize) -> f64 {
        self.pes[self.owner_of[i]].d_left_sum[self.local_index[i]]
    }
}

pub fn solve_partitioned(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    run(l, b, plan, cfg).map(|(x, report, _)| (x, report))
}

/// [`solve_partitioned`] that also returns the final per-PE arrays.
pub fn solve_partitioned_traced(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport, PartitionedSnapshot), SolveError> {
    let (x, report, (layout, states)) = run(l, b, plan, cfg)?;
    let pes = states
        .iter()
        .map(|s| PeSnapshot {
            s_in_degree: s.s_in_degree.iter().map(|v| v.load(Relaxed)).collect(),
            s_left_sum: s.s_left_sum.iter().map(|v| v.load(Relaxed)).collect(),
            d_in_degree: s.d_in_degree.iter().map(|v| v.load(Relaxed)).collect(),
            d_left_sum: s.d_left_sum.iter().map(|v| v.load(Relaxed)).collect(),
        })
        .collect();
    let snapshot = PartitionedSnapshot {
        owned: layout.owned,
        owner_of: plan.owners().to_vec(),
        local_index: layout.local_index,
        pes,
    };
    Ok((x, report, snapshot))
}

#[allow(clippy::type_complexity)]
fn run(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport, (Layout, Vec<PeSymmetricState>)), SolveError> {
    check_inputs(l, b, plan, cfg, EngineKind::PartitionedReadOnly)?;
    let n = l.n();
    let n_pes = cfg.n_pes;
    let layout = Layout::new(plan);
    let owners = plan.owners();
    let states: Vec<PeSymmetricState> =
        (0..n_pes).map(|p| PeSymmetricState::new(p, n, layout.owned[p].len())).collect();
    let x = zeroed_f64(n);
    const UNREAD: i64 = -1;

    let (per_pe, timing) = run_team(cfg, |worker| {
        let (pe, workers) = (worker.pe, cfg.workers_per_pe);
        let local = states[pe].local(pe);
        let segments: Vec<RemoteSegment<'_>> = states.iter().map(PeSymmetricState::remote).collect();

        for j in layout.worker_share(pe, worker.index, workers) {
            for &r in l.column(j).0 {
                local.count_entry(r);
            }
        }
        worker.setup_done();

        let mut stats = PeStats::default();
        let mut r_in_degree = vec![UNREAD; n_pes];
        let mut scratch_int = vec![0i64; n_pes];
        let mut r_left_sum = vec![0.0f64; n_pes];

        for i in layout.worker_share(pe, worker.index, workers) {
            let li = layout.local_index[i];

            r_in_degree.fill(UNREAD);
            worker.waiter.reset();
            loop {
                for (q, seg) in segments.iter().enumerate() {
                    if cfg.remote_read_caching && r_in_degree[q] == 0 {
                        if q != pe {
                            stats.remote_reads_skipped += 1;
                        }
                        continue;
                    }
                    let v = seg.get_in_degree(i);
                    debug_assert!(
                        r_in_degree[q] == UNREAD || v <= r_in_degree[q],
                        "published in-degree of component {i} on PE {q} grew from {} to {v}",
                        r_in_degree[q]
                    );
                    r_in_degree[q] = v;
                    if q != pe {
                        stats.remote_reads_issued += 1;
                    }
                }
                scratch_int.copy_from_slice(&r_in_degree);
                let published = reduce_in_place(&mut scratch_int);
                if local.local_in_degree(li) + 1 == published {
                    break;
                }
                stats.lock_wait_spins += 1;
                worker.waiter.pause()?;
            }

            for (q, seg) in segments.iter().enumerate() {
                r_left_sum[q] = seg.get_left_sum(i);
                if q != pe {
                    stats.remote_reads_issued += 1;
                }
            }
            let remote_sum = reduce_in_place(&mut r_left_sum);

            let (rows, vals) = l.column(i);
            let xi = (b[i] - local.local_left_sum(li) - remote_sum) / vals[0];
            x[i].store(xi, Relaxed);
            stats.components_solved += 1;

            for (&rid, &v) in rows[1..].iter().zip(&vals[1..]) {
                if owners[rid] == pe {
                    local.satisfy_local(layout.local_index[rid], v * xi);
                    stats.local_updates += 1;
                } else {
                    local.publish(rid, v * xi);
                    stats.remote_updates += 1;
                }
            }
        }
        Ok::<_, Aborted>(stats)
    })?;

    let x = x.iter().map(|v| v.load(Relaxed)).collect();
    let report = SolveReport {
        engine: EngineKind::PartitionedReadOnly,
        n_pes,
        workers_per_pe: cfg.workers_per_pe,
        setup_time: timing.setup_time,
        solve_time: timing.solve_time,
        wall_time: timing.setup_time + timing.solve_time,
        per_pe,
    };
    Ok((x, report, (layout, states)))
}
