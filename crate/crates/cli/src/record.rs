//! Report records and their line-delimited JSON / CSV encodings.
//!
//! The field list is described by `docs/bench_record.schema.json`; both encodings
//! carry exactly the fields of [`BenchRecord`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use sptrsv::MatrixStats;

/// `analyze` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub name: String,
    pub n_rows: usize,
    pub nnz: usize,
    pub n_levels: usize,
    pub parallelism: usize,
    pub dependency: f64,
}

impl StatsRecord {
    pub fn new(name: &str, s: &MatrixStats) -> Self {
        StatsRecord {
            name: name.to_owned(),
            n_rows: s.n_rows,
            nnz: s.nnz,
            n_levels: s.n_levels,
            parallelism: s.parallelism,
            dependency: s.dependency,
        }
    }
}

/// One configuration run `repeats` times. Times are seconds; `*_wall_time`
/// covers the solve phase only, `mean_setup_time` the in-degree build and
/// `mean_combined_time` their sum. Counter fields are summed over PEs and
/// repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub matrix: String,
    pub n: usize,
    pub nnz: usize,
    pub n_levels: usize,
    pub parallelism: usize,
    pub dependency: f64,
    pub engine: String,
    pub partition: String,
    pub n_pes: usize,
    pub tasks_per_pe: usize,
    pub workers_per_pe: usize,
    pub remote_read_caching: bool,
    pub repeats: usize,
    pub mean_wall_time: f64,
    pub min_wall_time: f64,
    pub max_wall_time: f64,
    pub mean_setup_time: f64,
    pub mean_combined_time: f64,
    pub max_rel_error: Option<f64>,
    pub verified: Option<bool>,
    pub min_pe_components: u64,
    pub max_pe_components: u64,
    pub lock_wait_spins: u64,
    pub remote_reads_issued: u64,
    pub remote_reads_skipped: u64,
    pub local_updates: u64,
    pub remote_updates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

pub fn write_records<W: Write>(records: &[BenchRecord], format: OutputFormat, mut out: W) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => {
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                writeln!(out)?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for r in records {
                w.serialize(r)?;
            }
            if records.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_json_records(text: &str) -> anyhow::Result<Vec<BenchRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

pub fn read_csv_records(text: &str) -> anyhow::Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|rec| Ok(rec?)).collect()
}

/// Column order of the CSV encoding.
pub const CSV_HEADER: [&str; 27] = [
    "matrix",
    "n",
    "nnz",
    "n_levels",
    "parallelism",
    "dependency",
    "engine",
    "partition",
    "n_pes",
    "tasks_per_pe",
    "workers_per_pe",
    "remote_read_caching",
    "repeats",
    "mean_wall_time",
    "min_wall_time",
    "max_wall_time",
    "mean_setup_time",
    "mean_combined_time",
    "max_rel_error",
    "verified",
    "min_pe_components",
    "max_pe_components",
    "lock_wait_spins",
    "remote_reads_issued",
    "remote_reads_skipped",
    "local_updates",
    "remote_updates",
];

#[cfg(test)]
pub(crate) fn sample_record() -> BenchRecord {
    BenchRecord {
        matrix: "bidiagonal_n8".into(),
        n: 8,
        nnz: 15,
        n_levels: 8,
        parallelism: 1,
        dependency: 1.875,
        engine: "partitioned".into(),
        partition: "round_robin".into(),
        n_pes: 2,
        tasks_per_pe: 2,
        workers_per_pe: 1,
        remote_read_caching: true,
        repeats: 3,
        mean_wall_time: 2e-5,
        min_wall_time: 1e-5,
        max_wall_time: 3e-5,
        mean_setup_time: 1e-6,
        mean_combined_time: 2.1e-5,
        max_rel_error: Some(0.0),
        verified: Some(true),
        min_pe_components: 4,
        max_pe_components: 4,
        lock_wait_spins: 12,
        remote_reads_issued: 40,
        remote_reads_skipped: 0,
        local_updates: 12,
        remote_updates: 9,
    }
}
