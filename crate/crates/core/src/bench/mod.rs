//! Benchmark harness: seeded synthetic or YUV-fed per-CTU workloads across
//! the implemented decoder stages, per-stage wall timing, cross-variant
//! verification, tier/thread sweeps, and text/CSV/JSON report emission.
//!
//! Workload content is drawn entirely from tagged splitmix64 streams, so a
//! `(spec, kernel semantics)` pair fully determines the output frames: the
//! report's `frame_hash` never varies with tier or worker count, only the
//! timing fields do.

mod workload;

pub use workload::{run_bench, run_sweep};

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::dispatch::{verify_variants, KernelId, MismatchReport};
use crate::error::{Error, Result};
use crate::frame::BitDepth;

/// One timed pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Dequantization plus 2-D inverse transform on seeded coefficients.
    Iqit,
    /// Luma and chroma fractional-sample interpolation at seeded motion.
    Mc,
    /// ALF classification and clipped diamond filtering.
    Alf,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Iqit, Stage::Mc, Stage::Alf];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Iqit => "iqit",
            Stage::Mc => "mc",
            Stage::Alf => "alf",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Stage::Iqit => 0,
            Stage::Mc => 1,
            Stage::Alf => 2,
        }
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}; expected iqit, mc, alf")))
    }
}

/// Parses a comma-separated stage list, deduplicating while preserving the
/// canonical iqit, mc, alf order.
pub fn parse_stages(s: &str) -> Result<Vec<Stage>> {
    let mut requested = [false; 3];
    for tok in s.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        requested[tok.parse::<Stage>()?.index()] = true;
    }
    let stages: Vec<Stage> = Stage::ALL
        .into_iter()
        .filter(|st| requested[st.index()])
        .collect();
    if stages.is_empty() {
        return Err(Error::Config("stage list must be nonempty".into()));
    }
    Ok(stages)
}

/// Where frame content comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorkloadSource {
    Synthetic,
    Yuv(PathBuf),
}

/// Everything that determines a benchmark workload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub depth: BitDepth,
    pub seed: u64,
    pub qp: u8,
    pub ctu_size: usize,
    pub source: WorkloadSource,
    pub stages: Vec<Stage>,
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::contract("frame dimensions must be at least 1x1"));
        }
        if self.frames == 0 {
            return Err(Error::contract("frame count must be at least 1"));
        }
        if self.qp > 63 {
            return Err(Error::contract("qp outside 0..=63"));
        }
        if self.ctu_size < 4 || !self.ctu_size.is_multiple_of(4) {
            return Err(Error::contract("CTU size must be a positive multiple of 4"));
        }
        if self.stages.is_empty() {
            return Err(Error::contract("stage set must be nonempty"));
        }
        Ok(())
    }

    pub fn has_stage(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }
}

/// Serializable description of a workload, embedded in report metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadDesc {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub depth: u32,
    pub seed: u64,
    pub qp: u8,
    pub ctu_size: usize,
    pub source: String,
    pub stages: Vec<String>,
}

impl From<&WorkloadSpec> for WorkloadDesc {
    fn from(spec: &WorkloadSpec) -> Self {
        Self {
            width: spec.width,
            height: spec.height,
            frames: spec.frames,
            depth: spec.depth.bits(),
            seed: spec.seed,
            qp: spec.qp,
            ctu_size: spec.ctu_size,
            source: match &spec.source {
                WorkloadSource::Synthetic => "synthetic".to_string(),
                WorkloadSource::Yuv(path) => path.display().to_string(),
            },
            stages: spec.stages.iter().map(|s| s.name().to_string()).collect(),
        }
    }
}

/// Run metadata common to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field that varies between
    /// byte-identical reports.
    pub timestamp: u64,
    pub host: String,
    pub tier: String,
    pub workers: usize,
    pub workload: WorkloadDesc,
}

/// Per-stage timing record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageStat {
    pub name: String,
    pub total_ns: u64,
    pub calls: u64,
    pub percent: f64,
}

/// One cell of a tier/worker sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tier: String,
    pub workers: usize,
    pub makespan_ns: u64,
    pub speedup: f64,
}

/// Unified report document: `stages` for benchmark runs, `sweep` for
/// tier/thread sweeps, both sharing the metadata and workload hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: RunMeta,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageStat>,
    /// 16 hex digits over every produced frame's logical samples.
    pub frame_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

pub(crate) fn run_meta(spec: &WorkloadSpec, tier: String, workers: usize) -> RunMeta {
    let cores = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    RunMeta {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        host: format!(
            "{} {} ({cores} cores)",
            std::env::consts::OS,
            std::env::consts::ARCH
        ),
        tier,
        workers,
        workload: WorkloadDesc::from(spec),
    }
}

/// Output encoding for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; expected text, csv, or json"
            ))),
        }
    }
}

/// Writes a report to the sink. Output is byte-stable for identical
/// reports except the timestamp metadata field.
pub fn emit_report(report: &Report, format: ReportFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report)
                .map_err(|e| Error::format(format!("json: {e}")))?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            if let Some(sweep) = &report.sweep {
                writeln!(out, "tier,workers,makespan_ns,speedup")?;
                for row in sweep {
                    writeln!(
                        out,
                        "{},{},{},{:.4}",
                        row.tier, row.workers, row.makespan_ns, row.speedup
                    )?;
                }
            } else {
                writeln!(out, "stage,total_ns,calls,percent")?;
                for s in &report.stages {
                    writeln!(
                        out,
                        "{},{},{},{:.2}",
                        s.name, s.total_ns, s.calls, s.percent
                    )?;
                }
            }
        }
        ReportFormat::Text => {
            let m = &report.meta;
            writeln!(
                out,
                "vvckit {} | {} | tier {} | {} workers",
                m.tool_version, m.host, m.tier, m.workers
            )?;
            let w = &m.workload;
            writeln!(
                out,
                "workload: {}x{} {}f depth {} seed {} qp {} ctu {} source {} stages {}",
                w.width,
                w.height,
                w.frames,
                w.depth,
                w.seed,
                w.qp,
                w.ctu_size,
                w.source,
                w.stages.join(",")
            )?;
            writeln!(out, "frame_hash: {}", report.frame_hash)?;
            if !report.stages.is_empty() {
                writeln!(
                    out,
                    "{:<8} {:>14} {:>8} {:>9}",
                    "stage", "total_ns", "calls", "percent"
                )?;
                for s in &report.stages {
                    writeln!(
                        out,
                        "{:<8} {:>14} {:>8} {:>8.2}%",
                        s.name, s.total_ns, s.calls, s.percent
                    )?;
                }
            }
            if let Some(sweep) = &report.sweep {
                writeln!(
                    out,
                    "{:<12} {:>8} {:>14} {:>8}",
                    "tier", "workers", "makespan_ns", "speedup"
                )?;
                for row in sweep {
                    writeln!(
                        out,
                        "{:<12} {:>8} {:>14} {:>8.3}",
                        row.tier, row.workers, row.makespan_ns, row.speedup
                    )?;
                }
            }
        }
    }
    Ok(())
}

/// Aggregated verification outcome across every kernel id.
#[derive(Debug, Clone)]
pub struct VerifySummary {
    pub seed: u64,
    pub trials: u64,
    pub reports: Vec<MismatchReport>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.clean())
    }

    pub fn total_mismatched_samples(&self) -> u64 {
        self.reports.iter().map(|r| r.mismatched_samples).sum()
    }
}

/// Sweeps [`crate::dispatch::verify_variants`] over every registered kernel
/// id. The process exit protocol is: status 0 iff zero mismatches.
pub fn run_verify(seed: u64, trials: u64) -> VerifySummary {
    let reports = KernelId::all()
        .into_iter()
        .map(|id| verify_variants(id, seed, trials))
        .collect();
    VerifySummary {
        seed,
        trials,
        reports,
    }
}

#[cfg(test)]
mod tests;
