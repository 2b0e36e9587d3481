//! Benchmark CLI for the vvckit decoder kernels.
//!
//! Subcommands: `bench` (per-stage runtime breakdown), `verify`
//! (scalar-vs-vector bit-exactness sweep), `sweep` (tier and worker-count
//! scaling table). Exit codes: 0 success, 1 verification mismatch, 2
//! invalid arguments or I/O failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vvckit::bench::{
    emit_report, parse_stages, run_bench, run_sweep, run_verify, Report, ReportFormat,
    WorkloadSource, WorkloadSpec,
};
use vvckit::dispatch::{detect_capabilities, VariantTier};
use vvckit::{BitDepth, Error};

#[derive(Parser)]
#[command(
    name = "vvckit",
    version,
    about = "VVC decoder kernel benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time the decoder stages on a seeded workload and report shares.
    Bench(BenchArgs),
    /// Check every vector kernel against the scalar reference.
    Verify(VerifyArgs),
    /// Sweep tier and worker-count combinations on one workload.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long, default_value_t = 1920)]
    width: usize,
    #[arg(long, default_value_t = 1080)]
    height: usize,
    #[arg(long, default_value_t = 8)]
    frames: usize,
    /// Sample bit depth: 8 or 10.
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    qp: u8,
    #[arg(long, default_value_t = 128)]
    ctu_size: usize,
    /// Comma-separated subset of iqit,mc,alf.
    #[arg(long, default_value = "iqit,mc,alf")]
    stages: String,
    /// Raw YUV 4:2:0 input file; overrides the synthetic source.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl WorkloadArgs {
    fn spec(&self) -> Result<WorkloadSpec, Error> {
        Ok(WorkloadSpec {
            width: self.width,
            height: self.height,
            frames: self.frames,
            depth: BitDepth::from_bits(self.depth)?,
            seed: self.seed,
            qp: self.qp,
            ctu_size: self.ctu_size,
            source: match &self.input {
                Some(path) => WorkloadSource::Yuv(path.clone()),
                None => WorkloadSource::Synthetic,
            },
            stages: parse_stages(&self.stages)?,
        })
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report encoding: text, csv, or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, report: &Report) -> Result<(), Error> {
        let format: ReportFormat = self.format.parse()?;
        match &self.out {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                emit_report(report, format, &mut file)?;
                file.flush()?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                emit_report(report, format, &mut lock)?;
            }
        }
        Ok(())
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Kernel tier: scalar, vector128, vector256, or auto.
    #[arg(long, default_value = "auto")]
    tier: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seeded random inputs per kernel id.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Comma-separated tiers, or auto for every detected tier.
    #[arg(long, default_value = "auto")]
    tier: String,
    /// Comma-separated worker counts.
    #[arg(long, default_value = "1,2,4")]
    workers: String,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_tier(s: &str) -> Result<Option<VariantTier>, Error> {
    if s == "auto" {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

fn parse_tier_list(s: &str) -> Result<Vec<VariantTier>, Error> {
    if s == "auto" {
        return Ok(detect_capabilities().tiers().to_vec());
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse())
        .collect()
}

fn parse_worker_list(s: &str) -> Result<Vec<usize>, Error> {
    let counts: Vec<usize> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad worker count {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if counts.is_empty() {
        return Err(Error::Config("worker list must be nonempty".into()));
    }
    Ok(counts)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, Error> {
    let spec = args.workload.spec()?;
    let report = run_bench(&spec, parse_tier(&args.tier)?, args.workers)?;
    args.output.emit(&report)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    if args.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let summary = run_verify(args.seed, args.trials);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(
        out,
        "verify: seed {} trials {} capabilities {}",
        summary.seed,
        summary.trials,
        detect_capabilities()
    )?;
    for report in &summary.reports {
        let tiers: Vec<&str> = report.compared_tiers.iter().map(|t| t.name()).collect();
        let status = if report.clean() { "ok" } else { "MISMATCH" };
        write!(
            out,
            "{:<18} vs [{:<21}] units {:>8} mismatched samples {:>6} {status}",
            report.id.to_string(),
            tiers.join(","),
            report.units,
            report.mismatched_samples,
        )?;
        if let Some(f) = &report.first_failure {
            write!(
                out,
                "  first failure: trial {} seed {:#018x} tier {} sample {}",
                f.trial, f.input_seed, f.tier, f.sample_index
            )?;
        }
        writeln!(out)?;
    }
    if summary.passed() {
        writeln!(out, "verify: PASS")?;
        Ok(ExitCode::SUCCESS)
    } else {
        writeln!(
            out,
            "verify: FAIL ({} mismatched samples)",
            summary.total_mismatched_samples()
        )?;
        Ok(ExitCode::from(1))
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode, Error> {
    let spec = args.workload.spec()?;
    let tiers = parse_tier_list(&args.tier)?;
    let workers = parse_worker_list(&args.workers)?;
    let report = run_sweep(&spec, &workers, &tiers)?;
    args.output.emit(&report)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        // A closed pipe on our output is the reader's choice, not a failure.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("vvckit: {err}");
            ExitCode::from(2)
        }
    }
}
