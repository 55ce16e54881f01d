use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sptrsv::matrix::DiagonalPolicy;
use sptrsv::EngineKind;
use sptrsv_bench::record::{write_records, OutputFormat};
use sptrsv_bench::source::{MatrixSource, RhsSource, SyntheticShape};
use sptrsv_bench::{
    cmd_analyze, cmd_solve, cmd_sweep_pes, cmd_sweep_tasks, Failure, PlanSpec, RunOutcome, RunSpec, TaskCount,
};

/// Multi-PE synchronization-free sparse triangular solve benchmarks.
#[derive(Parser)]
#[command(name = "sptrsv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print level-set statistics of a matrix as one JSON record.
    Analyze {
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Solve with one configuration.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        pes: usize,
        /// Round-robin tasks per PE; omit for one contiguous block per PE.
        #[arg(long)]
        tasks_per_pe: Option<usize>,
        /// Write the solution vector, one value per line.
        #[arg(long, value_name = "PATH")]
        solution_out: Option<PathBuf>,
    },
    /// One record per tasks-per-PE value.
    SweepTasks {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        pes: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        tasks_per_pe: Vec<usize>,
    },
    /// One record per PE count.
    SweepPes {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        pes: Vec<usize>,
        #[arg(long, default_value_t = 8, conflicts_with = "fixed_total_tasks")]
        tasks_per_pe: usize,
        /// Split this many tasks evenly over the PEs of each configuration.
        #[arg(long)]
        fixed_total_tasks: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MatrixInput {
    /// Matrix Market file; its lower triangle is used.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// KIND:N[:PARAMS], e.g. diagonal:100, bidiagonal:100, block:4096:32,
    /// banded:1000:8:0.5, random:1000:0.01, dense:500.
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<SyntheticShape>,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    input: MatrixInput,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// What to do with a missing diagonal entry in a matrix file.
    #[arg(long, value_enum, default_value_t = DiagArg::Require)]
    diag: DiagArg,
}

impl MatrixArgs {
    fn source(&self) -> MatrixSource {
        match (&self.input.matrix, self.input.synthetic) {
            (Some(path), _) => MatrixSource::File(path.clone()),
            (None, Some(shape)) => MatrixSource::Synthetic(shape),
            (None, None) => unreachable!("clap requires one matrix source"),
        }
    }

    fn policy(&self) -> DiagonalPolicy {
        match self.diag {
            DiagArg::Require => DiagonalPolicy::RequireExplicit,
            DiagArg::InsertUnit => DiagonalPolicy::InsertUnit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagArg {
    Require,
    InsertUnit,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Shared,
    Partitioned,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, value_enum, default_value_t = EngineArg::Partitioned)]
    engine: EngineArg,
    #[arg(long, default_value_t = 1)]
    workers_per_pe: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// ones, random, random:SEED or a file of whitespace-separated values.
    #[arg(long, default_value = "ones")]
    rhs: RhsSource,
    #[arg(long)]
    no_verify: bool,
    #[arg(long)]
    no_remote_cache: bool,
    #[arg(long, default_value_t = 60.0)]
    timeout_secs: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write records here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn spec(&self) -> Result<RunSpec, Failure> {
        let timeout = Duration::try_from_secs_f64(self.timeout_secs)
            .map_err(|_| anyhow::anyhow!("InvalidConfig: bad --timeout-secs {}", self.timeout_secs))?;
        Ok(RunSpec {
            rhs: self.rhs.clone(),
            seed: self.matrix.seed,
            diagonal_policy: self.matrix.policy(),
            engine: match self.engine {
                EngineArg::Shared => EngineKind::SharedAtomics,
                EngineArg::Partitioned => EngineKind::PartitionedReadOnly,
            },
            workers_per_pe: self.workers_per_pe,
            repeats: self.repeats,
            verify: !self.no_verify,
            timeout,
            remote_read_caching: !self.no_remote_cache,
            ..RunSpec::new(self.matrix.source())
        })
    }

    fn emit(&self, outcome: &RunOutcome) -> Result<(), Failure> {
        match &self.out {
            Some(path) => {
                let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
                write_records(&outcome.records, self.format, BufWriter::new(file))?;
            }
            None => write_records(&outcome.records, self.format, io::stdout().lock())?,
        }
        outcome.check_verified()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { matrix } => {
            let rec = cmd_analyze(&matrix.source(), matrix.seed, matrix.policy())?;
            println!("{}", serde_json::to_string(&rec).map_err(anyhow::Error::from)?);
            Ok(())
        }
        Command::Solve { run, pes, tasks_per_pe, solution_out } => {
            let spec = RunSpec {
                n_pes: pes,
                plan: tasks_per_pe.map_or(PlanSpec::Block, |t| PlanSpec::RoundRobin { tasks_per_pe: t }),
                ..run.spec()?
            };
            let outcome = cmd_solve(&spec)?;
            if let Some(path) = solution_out {
                write_solution(&path, &outcome.solution)?;
            }
            run.emit(&outcome)
        }
        Command::SweepTasks { run, pes, tasks_per_pe } => {
            let spec = RunSpec { n_pes: pes, ..run.spec()? };
            run.emit(&cmd_sweep_tasks(&spec, &tasks_per_pe)?)
        }
        Command::SweepPes { run, pes, tasks_per_pe, fixed_total_tasks } => {
            let tasks = fixed_total_tasks.map_or(TaskCount::PerPe(tasks_per_pe), TaskCount::FixedTotal);
            run.emit(&cmd_sweep_pes(&run.spec()?, &pes, tasks)?)
        }
    }
}

fn write_solution(path: &PathBuf, x: &[f64]) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    for v in x {
        writeln!(w, "{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.kind.exit_code() as u8)
        }
    }
}
