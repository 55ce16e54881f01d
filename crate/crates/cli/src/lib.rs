//! Library side of the `sptrsv` command-line tool: matrix and right-hand-side
//! sources, benchmark runs over solver configurations, and report records.

pub mod record;
pub mod source;

use std::fmt;
use std::time::Duration;

use sptrsv::matrix::DiagonalPolicy;
use sptrsv::partition::{block_partition, task_round_robin_partition, PartitionPlan};
use sptrsv::{compare_solutions, compute_stats, solve, solve_serial, EngineKind, PeStats, SolveError, SolverConfig};

use record::{BenchRecord, StatsRecord};
use source::{load_matrix, load_rhs, LoadedMatrix, MatrixSource, RhsSource};

/// Relative error bound for a verified run.
pub const VERIFY_TOL: f64 = 1e-9;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Input,
    Verification,
    Timeout,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Input => 1,
            FailureKind::Verification => 2,
            FailureKind::Timeout => 3,
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub kind: FailureKind,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { kind: FailureKind::Input, error: error.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl std::error::Error for Failure {}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure::input(error)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let kind = match e {
            SolveError::Timeout(_) => FailureKind::Timeout,
            _ => FailureKind::Input,
        };
        Failure { kind, error: e.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanSpec {
    Block,
    RoundRobin { tasks_per_pe: usize },
}

impl PlanSpec {
    fn build(self, n: usize, n_pes: usize) -> Result<PartitionPlan, Failure> {
        match self {
            PlanSpec::Block => block_partition(n, n_pes),
            PlanSpec::RoundRobin { tasks_per_pe } => task_round_robin_partition(n, n_pes, tasks_per_pe),
        }
        .map_err(Failure::input)
    }

    fn label(self) -> &'static str {
        match self {
            PlanSpec::Block => "block",
            PlanSpec::RoundRobin { .. } => "round_robin",
        }
    }
}

/// Everything a `solve` run needs. Sweeps vary `n_pes` and the plan.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub matrix: MatrixSource,
    pub rhs: RhsSource,
    pub seed: u64,
    pub diagonal_policy: DiagonalPolicy,
    pub engine: EngineKind,
    pub n_pes: usize,
    pub workers_per_pe: usize,
    pub plan: PlanSpec,
    pub repeats: usize,
    pub verify: bool,
    pub timeout: Duration,
    pub remote_read_caching: bool,
}

impl RunSpec {
    pub fn new(matrix: MatrixSource) -> Self {
        RunSpec {
            matrix,
            rhs: RhsSource::Ones,
            seed: 0,
            diagonal_policy: DiagonalPolicy::RequireExplicit,
            engine: EngineKind::PartitionedReadOnly,
            n_pes: 1,
            workers_per_pe: 1,
            plan: PlanSpec::RoundRobin { tasks_per_pe: 1 },
            repeats: 10,
            verify: true,
            timeout: Duration::from_secs(60),
            remote_read_caching: true,
        }
    }

    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.engine, self.n_pes, self.workers_per_pe);
        cfg.timeout = self.timeout;
        cfg.remote_read_caching = self.remote_read_caching;
        cfg
    }
}

/// How many times each solver ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunCounters {
    pub engine_runs: usize,
    pub oracle_runs: usize,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<BenchRecord>,
    /// Solution of the last engine run of the last configuration.
    pub solution: Vec<f64>,
    pub counters: RunCounters,
}

impl RunOutcome {
    /// Fails with [`FailureKind::Verification`] if any record is unverified.
    pub fn check_verified(&self) -> Result<(), Failure> {
        match self.records.iter().find(|r| r.verified == Some(false)) {
            None => Ok(()),
            Some(r) => Err(Failure {
                kind: FailureKind::Verification,
                error: anyhow::anyhow!(
                    "VerificationFailed: {} on {} PEs x {} tasks: max relative error {:e} exceeds {VERIFY_TOL:e}",
                    r.engine,
                    r.n_pes,
                    r.tasks_per_pe,
                    r.max_rel_error.unwrap_or(f64::NAN)
                ),
            }),
        }
    }
}

pub fn cmd_analyze(matrix: &MatrixSource, seed: u64, policy: DiagonalPolicy) -> Result<StatsRecord, Failure> {
    let m = load_matrix(matrix, seed, policy)?;
    Ok(StatsRecord::new(&m.name, &compute_stats(&m.l)))
}

/// The matrix, right-hand side and (when verifying) oracle solution shared
/// by every configuration of one invocation.
struct Problem {
    m: LoadedMatrix,
    b: Vec<f64>,
    oracle: Option<Vec<f64>>,
}

fn load_problem(spec: &RunSpec, counters: &mut RunCounters) -> Result<Problem, Failure> {
    if spec.repeats == 0 {
        return Err(Failure::input(anyhow::anyhow!("InvalidConfig: repeats must be at least 1")));
    }
    let m = load_matrix(&spec.matrix, spec.seed, spec.diagonal_policy)?;
    let b = load_rhs(&spec.rhs, m.l.n(), spec.seed)?;
    let oracle = if spec.verify {
        counters.oracle_runs += 1;
        Some(solve_serial(&m.l, &b).map_err(Failure::input)?)
    } else {
        None
    };
    Ok(Problem { m, b, oracle })
}

fn run_config(problem: &Problem, spec: &RunSpec, counters: &mut RunCounters) -> Result<(BenchRecord, Vec<f64>), Failure> {
    let n = problem.m.l.n();
    let plan = spec.plan.build(n, spec.n_pes)?;
    let cfg = spec.config();

    let mut walls = Vec::with_capacity(spec.repeats);
    let mut setups = Vec::with_capacity(spec.repeats);
    let mut totals = PeStats::default();
    let mut per_pe_components = vec![0u64; spec.n_pes];
    let mut max_rel_error: Option<f64> = None;
    let mut x = Vec::new();
    for _ in 0..spec.repeats {
        let (sol, report) = solve(&problem.m.l, &problem.b, &plan, &cfg)?;
        counters.engine_runs += 1;
        walls.push(report.solve_time.as_secs_f64());
        setups.push(report.setup_time.as_secs_f64());
        accumulate(&mut totals, &report.total());
        for (acc, pe) in per_pe_components.iter_mut().zip(&report.per_pe) {
            *acc += pe.components_solved;
        }
        if let Some(oracle) = &problem.oracle {
            let cmp = compare_solutions(&sol, oracle, VERIFY_TOL).map_err(Failure::input)?;
            max_rel_error = Some(max_rel_error.map_or(cmp.max_rel_error, |m: f64| m.max(cmp.max_rel_error)));
        }
        x = sol;
    }

    let repeats = spec.repeats as u64;
    let stats = compute_stats(&problem.m.l);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mean_wall_time = mean(&walls);
    let mean_setup_time = mean(&setups);
    let record = BenchRecord {
        matrix: problem.m.name.clone(),
        n,
        nnz: stats.nnz,
        n_levels: stats.n_levels,
        parallelism: stats.parallelism,
        dependency: stats.dependency,
        engine: spec.engine.to_string(),
        partition: spec.plan.label().to_owned(),
        n_pes: spec.n_pes,
        tasks_per_pe: plan.tasks_per_pe(),
        workers_per_pe: spec.workers_per_pe,
        remote_read_caching: spec.remote_read_caching,
        repeats: spec.repeats,
        mean_wall_time,
        min_wall_time: walls.iter().copied().fold(f64::INFINITY, f64::min),
        max_wall_time: walls.iter().copied().fold(0.0, f64::max),
        mean_setup_time,
        mean_combined_time: mean_wall_time + mean_setup_time,
        max_rel_error,
        verified: max_rel_error.map(|e| e <= VERIFY_TOL),
        min_pe_components: per_pe_components.iter().min().copied().unwrap_or(0) / repeats,
        max_pe_components: per_pe_components.iter().max().copied().unwrap_or(0) / repeats,
        lock_wait_spins: totals.lock_wait_spins,
        remote_reads_issued: totals.remote_reads_issued,
        remote_reads_skipped: totals.remote_reads_skipped,
        local_updates: totals.local_updates,
        remote_updates: totals.remote_updates,
    };
    Ok((record, x))
}

fn accumulate(acc: &mut PeStats, s: &PeStats) {
    acc.components_solved += s.components_solved;
    acc.lock_wait_spins += s.lock_wait_spins;
    acc.remote_reads_issued += s.remote_reads_issued;
    acc.remote_reads_skipped += s.remote_reads_skipped;
    acc.local_updates += s.local_updates;
    acc.remote_updates += s.remote_updates;
}

fn run_all(spec: &RunSpec, variants: &[(usize, PlanSpec)]) -> Result<RunOutcome, Failure> {
    let mut counters = RunCounters::default();
    let problem = load_problem(spec, &mut counters)?;
    let n = problem.m.l.n();
    // reject bad configurations before spending time on any of them
    for &(n_pes, plan) in variants {
        plan.build(n, n_pes)?;
    }
    let mut records = Vec::with_capacity(variants.len());
    let mut solution = Vec::new();
    for &(n_pes, plan) in variants {
        let s = RunSpec { n_pes, plan, ..spec.clone() };
        let (record, x) = run_config(&problem, &s, &mut counters)?;
        records.push(record);
        solution = x;
    }
    Ok(RunOutcome { records, solution, counters })
}

pub fn cmd_solve(spec: &RunSpec) -> Result<RunOutcome, Failure> {
    run_all(spec, &[(spec.n_pes, spec.plan)])
}

/// One record per `tasks_per_pe` value at `spec.n_pes` PEs.
pub fn cmd_sweep_tasks(spec: &RunSpec, tasks: &[usize]) -> Result<RunOutcome, Failure> {
    let variants: Vec<_> = tasks.iter().map(|&t| (spec.n_pes, PlanSpec::RoundRobin { tasks_per_pe: t })).collect();
    run_all(spec, &variants)
}

/// Tasks per PE for a PE sweep: either fixed, or `total / n_pes`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskCount {
    PerPe(usize),
    FixedTotal(usize),
}

pub fn cmd_sweep_pes(spec: &RunSpec, pes: &[usize], tasks: TaskCount) -> Result<RunOutcome, Failure> {
    let mut variants = Vec::with_capacity(pes.len());
    for &p in pes {
        if p == 0 {
            return Err(Failure::input(anyhow::anyhow!("InvalidPeCount: PE counts must be at least 1")));
        }
        let tasks_per_pe = match tasks {
            TaskCount::PerPe(t) => t,
            TaskCount::FixedTotal(total) if total % p == 0 => total / p,
            TaskCount::FixedTotal(total) => {
                return Err(Failure::input(anyhow::anyhow!(
                    "IndivisibleTaskTotal: {total} tasks cannot be split evenly over {p} PEs"
                )))
            }
        };
        variants.push((p, PlanSpec::RoundRobin { tasks_per_pe }));
    }
    run_all(spec, &variants)
}
