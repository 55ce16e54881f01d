//! Concurrent synchronization-free solvers.
//!
//! Both engines run one team of `workers_per_pe` threads per PE. Every
//! component goes through two phases: *lock-wait*, spinning until all of its
//! column dependencies have been satisfied, then *solve-update*, computing
//! `x_i` and pushing `l_ri * x_i` into the partial sums of each dependent
//! row `r`.
//!
//! Within a PE the owned components (ascending) are dealt to workers with a
//! stride, and each worker handles its share in ascending order. Since every
//! dependency points from a lower to a higher index, the smallest unsolved
//! component always has a worker parked on it with its inputs ready, so a
//! solve on a valid matrix cannot deadlock.

mod atomic;
mod partitioned;
mod reduce;
mod shared;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Barrier, OnceLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use atomic::AtomicF64;
pub use partitioned::{solve_partitioned, solve_partitioned_traced, PeSnapshot, PartitionedSnapshot};
pub use reduce::{reduce_contributions, reduce_in_place, reduction_depth};
pub use shared::solve_shared_atomics;

use crate::matrix::{validate_lower_triangular, CscMatrix, Violation};
use crate::partition::PartitionPlan;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Timeout: solve did not finish within {0:?}")]
    Timeout(Duration),
    #[error("ZeroDiagonal: column {0} has a zero diagonal entry")]
    ZeroDiagonal(usize),
    #[error("DimensionMismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("InvalidMatrix: {0}")]
    InvalidMatrix(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    SharedAtomics,
    PartitionedReadOnly,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::SharedAtomics => "shared",
            EngineKind::PartitionedReadOnly => "partitioned",
        })
    }
}

/// Lock-wait pacing: busy-pause `initial_pause` iterations, doubling up to
/// `max_pause`, after which every further failed check yields the thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Backoff {
    pub initial_pause: u32,
    pub max_pause: u32,
}

impl Default for Backoff {
    fn default() -> Self {
        Backoff { initial_pause: 1, max_pause: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub engine: EngineKind,
    pub n_pes: usize,
    pub workers_per_pe: usize,
    pub spin_backoff: Backoff,
    pub timeout: Duration,
    /// Skip re-reading a PE's published in-degree once it has been seen at 0.
    pub remote_read_caching: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            engine: EngineKind::PartitionedReadOnly,
            n_pes: 1,
            workers_per_pe: 1,
            spin_backoff: Backoff::default(),
            timeout: Duration::from_secs(60),
            remote_read_caching: true,
        }
    }
}

impl SolverConfig {
    pub fn new(engine: EngineKind, n_pes: usize, workers_per_pe: usize) -> Self {
        SolverConfig { engine, n_pes, workers_per_pe, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.n_pes == 0 {
            return Err(SolveError::InvalidConfig("n_pes must be at least 1".into()));
        }
        if self.workers_per_pe == 0 {
            return Err(SolveError::InvalidConfig("workers_per_pe must be at least 1".into()));
        }
        if self.timeout.is_zero() {
            return Err(SolveError::InvalidConfig("timeout must be positive".into()));
        }
        if self.spin_backoff.initial_pause == 0 || self.spin_backoff.initial_pause > self.spin_backoff.max_pause {
            return Err(SolveError::InvalidConfig("backoff needs 1 <= initial_pause <= max_pause".into()));
        }
        Ok(())
    }
}

/// Per-PE counters gathered by the workers of one PE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeStats {
    pub components_solved: u64,
    /// Failed lock-wait checks.
    pub lock_wait_spins: u64,
    /// Loads of memory another PE writes: foreign segments for the
    /// partitioned engine, the shared arrays for the shared-atomics engine.
    pub remote_reads_issued: u64,
    pub remote_reads_skipped: u64,
    pub local_updates: u64,
    pub remote_updates: u64,
}

impl PeStats {
    fn merge(&mut self, o: &PeStats) {
        self.components_solved += o.components_solved;
        self.lock_wait_spins += o.lock_wait_spins;
        self.remote_reads_issued += o.remote_reads_issued;
        self.remote_reads_skipped += o.remote_reads_skipped;
        self.local_updates += o.local_updates;
        self.remote_updates += o.remote_updates;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub engine: EngineKind,
    pub n_pes: usize,
    pub workers_per_pe: usize,
    /// In-degree construction, up to the rendezvous.
    pub setup_time: Duration,
    /// Lock-wait / solve-update phase.
    pub solve_time: Duration,
    /// `setup_time + solve_time`.
    pub wall_time: Duration,
    pub per_pe: Vec<PeStats>,
}

impl SolveReport {
    pub fn total(&self) -> PeStats {
        let mut t = PeStats::default();
        for s in &self.per_pe {
            t.merge(s);
        }
        t
    }
}

/// Runs the engine selected by `cfg.engine`.
pub fn solve(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolveError> {
    match cfg.engine {
        EngineKind::SharedAtomics => solve_shared_atomics(l, b, plan, cfg),
        EngineKind::PartitionedReadOnly => solve_partitioned(l, b, plan, cfg),
    }
}

pub(crate) fn check_inputs(
    l: &CscMatrix,
    b: &[f64],
    plan: &PartitionPlan,
    cfg: &SolverConfig,
    expected: EngineKind,
) -> Result<(), SolveError> {
    cfg.validate()?;
    if cfg.engine != expected {
        return Err(SolveError::InvalidConfig(format!("config selects {} engine, called {expected}", cfg.engine)));
    }
    if b.len() != l.n() {
        return Err(SolveError::DimensionMismatch { expected: l.n(), actual: b.len() });
    }
    if plan.n() != l.n() {
        return Err(SolveError::DimensionMismatch { expected: l.n(), actual: plan.n() });
    }
    if plan.n_pes() != cfg.n_pes {
        return Err(SolveError::InvalidConfig(format!(
            "plan has {} PEs but config asks for {}",
            plan.n_pes(),
            cfg.n_pes
        )));
    }
    match validate_lower_triangular(l).into_iter().next() {
        None => Ok(()),
        Some(Violation::ZeroDiagonal(j)) => Err(SolveError::ZeroDiagonal(j)),
        Some(v) => Err(SolveError::InvalidMatrix(v.to_string())),
    }
}

/// Owned component lists per PE plus each component's slot in its owner's
/// private arrays.
pub(crate) struct Layout {
    pub owned: Vec<Vec<usize>>,
    pub local_index: Vec<usize>,
}

impl Layout {
    pub fn new(plan: &PartitionPlan) -> Self {
        let mut owned = vec![Vec::new(); plan.n_pes()];
        let mut local_index = vec![0usize; plan.n()];
        for task in plan.tasks() {
            let list = &mut owned[task.owner_pe];
            for i in task.components() {
                local_index[i] = list.len();
                list.push(i);
            }
        }
        Layout { owned, local_index }
    }

    /// Components handled by worker `w` of `pe`, ascending.
    pub fn worker_share(&self, pe: usize, w: usize, workers: usize) -> impl Iterator<Item = usize> + '_ {
        self.owned[pe].iter().copied().skip(w).step_by(workers)
    }
}

#[derive(Debug)]
pub(crate) struct Aborted;

pub(crate) struct Waiter<'a> {
    backoff: Backoff,
    pause: u32,
    abort: &'a AtomicBool,
    deadline: Instant,
}

impl Waiter<'_> {
    #[inline]
    pub fn reset(&mut self) {
        self.pause = self.backoff.initial_pause;
    }

    /// One failed lock-wait check.
    #[inline]
    pub fn pause(&mut self) -> Result<(), Aborted> {
        if self.abort.load(Ordering::Relaxed) {
            return Err(Aborted);
        }
        if self.pause < self.backoff.max_pause {
            for _ in 0..self.pause {
                std::hint::spin_loop();
            }
            self.pause = (self.pause * 2).min(self.backoff.max_pause);
        } else {
            if Instant::now() >= self.deadline {
                self.abort.store(true, Ordering::Relaxed);
                return Err(Aborted);
            }
            std::thread::yield_now();
        }
        Ok(())
    }
}

pub(crate) struct Worker<'a> {
    pub pe: usize,
    pub index: usize,
    pub waiter: Waiter<'a>,
    barrier: &'a Barrier,
    solve_start: &'a OnceLock<Instant>,
}

impl Worker<'_> {
    /// Rendezvous between in-degree construction and the solve phase.
    pub fn setup_done(&self) {
        if self.barrier.wait().is_leader() {
            let _ = self.solve_start.set(Instant::now());
        }
    }
}

pub(crate) struct TeamTiming {
    pub setup_time: Duration,
    pub solve_time: Duration,
}

/// Spawns `n_pes * workers_per_pe` workers running `body` and folds their
/// stats per PE. `body` must call [`Worker::setup_done`] exactly once.
pub(crate) fn run_team<F>(cfg: &SolverConfig, body: F) -> Result<(Vec<PeStats>, TeamTiming), SolveError>
where
    F: Fn(&mut Worker<'_>) -> Result<PeStats, Aborted> + Sync,
{
    let n_workers = cfg.n_pes * cfg.workers_per_pe;
    let barrier = Barrier::new(n_workers);
    let solve_start = OnceLock::new();
    let abort = AtomicBool::new(false);
    let start = Instant::now();
    let deadline = start + cfg.timeout;

    let results: Vec<(usize, Result<PeStats, Aborted>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.n_pes)
            .flat_map(|pe| (0..cfg.workers_per_pe).map(move |w| (pe, w)))
            .map(|(pe, index)| {
                let (body, barrier, solve_start, abort) = (&body, &barrier, &solve_start, &abort);
                s.spawn(move || {
                    let mut worker = Worker {
                        pe,
                        index,
                        waiter: Waiter { backoff: cfg.spin_backoff, pause: cfg.spin_backoff.initial_pause, abort, deadline },
                        barrier,
                        solve_start,
                    };
                    (pe, body(&mut worker))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver worker panicked")).collect()
    });
    let end = Instant::now();

    let mut per_pe = vec![PeStats::default(); cfg.n_pes];
    for (pe, r) in results {
        match r {
            Ok(stats) => per_pe[pe].merge(&stats),
            Err(Aborted) => return Err(SolveError::Timeout(cfg.timeout)),
        }
    }
    let mid = *solve_start.get().unwrap_or(&start);
    Ok((per_pe, TeamTiming { setup_time: mid - start, solve_time: end - mid }))
}
