//! Workload execution: builds per-CTU decode-style work over the wavefront
//! executor and accumulates per-stage wall time.
//!
//! Reconstruction runs in two phases per frame. Phase 1 (mc + iqit) walks
//! the CTU grid under wavefront dependencies: each CTU predicts its
//! rectangle by fractional-sample interpolation from the source frame (or
//! copies it when mc is disabled), then adds inverse-transformed seeded
//! residuals. Phase 2 (alf) filters the completed reconstruction with an
//! independent per-CTU task per node, since ALF reads across CTU
//! boundaries. Every random draw is tagged by (purpose, frame, node, tile),
//! so content is identical at any tier or worker count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::alf::{
    self, AlfClassification, AlfFilterSet, CtuGrid, ResolvedChromaFilter, ResolvedLumaFilter,
};
use crate::dispatch::{build_registry, KernelTable, VariantTier};
use crate::error::{Error, Result};
use crate::frame::{load_yuv420, BitDepth, BlockRect, ContentHasher, Frame, Plane};
use crate::interp::{ChromaFilterTable, FracPos, LumaFilterTable};
use crate::rng::SplitMix64;
use crate::wavefront::{execute, wpp_dependencies, NodeId, NodeWork, PlaneCell, TaskGraph};
use crate::xform::{dequant, CoeffBlock, XformKind};

use super::{run_meta, Report, RunMeta, Stage, StageStat, SweepRow, WorkloadSource, WorkloadSpec};

const TAG_SOURCE: u64 = 0x5C;
const TAG_ALF_SET: u64 = 0xA1;
const TAG_MC: u64 = 0x3C;
const TAG_IQIT: u64 = 0x19;
const TAG_ALF_CHROMA: u64 = 0xAC;

const LUMA_TILE: usize = 16;
const CHROMA_TILE: usize = 8;

struct StageClock {
    totals: [AtomicU64; 3],
    calls: [AtomicU64; 3],
}

impl StageClock {
    fn new() -> Self {
        Self {
            totals: Default::default(),
            calls: Default::default(),
        }
    }

    fn add(&self, stage: Stage, ns: u64) {
        self.totals[stage.index()].fetch_add(ns, Ordering::Relaxed);
        self.calls[stage.index()].fetch_add(1, Ordering::Relaxed);
    }

    fn stats(&self, stages: &[Stage]) -> Vec<StageStat> {
        let sum: u64 = stages
            .iter()
            .map(|s| self.totals[s.index()].load(Ordering::Relaxed))
            .sum();
        stages
            .iter()
            .map(|&s| {
                let total = self.totals[s.index()].load(Ordering::Relaxed);
                StageStat {
                    name: s.name().to_string(),
                    total_ns: total,
                    calls: self.calls[s.index()].load(Ordering::Relaxed),
                    percent: if sum == 0 {
                        0.0
                    } else {
                        100.0 * total as f64 / sum as f64
                    },
                }
            })
            .collect()
    }
}

/// Greedy decomposition of a span into supported transform sizes; slivers
/// under 4 samples carry no residual.
fn xform_tiles(len: usize) -> Vec<(usize, usize)> {
    let mut tiles = Vec::new();
    let mut off = 0;
    while len - off >= 4 {
        let size = [32usize, 16, 8, 4]
            .into_iter()
            .find(|&s| s <= len - off)
            .unwrap();
        tiles.push((off, size));
        off += size;
    }
    tiles
}

/// Splits a span into fixed-size tiles with a clipped tail.
fn tiles(len: usize, tile: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..len.div_ceil(tile)).map(move |i| (i * tile, tile.min(len - i * tile)))
}

/// All (class, transpose) filter combinations resolved once per run.
struct ResolvedSet {
    luma: Vec<ResolvedLumaFilter>,
    chroma: Vec<ResolvedChromaFilter>,
}

impl ResolvedSet {
    fn new(set: &AlfFilterSet, depth: BitDepth) -> Self {
        let clip = set.clip_table(depth);
        let mut luma = Vec::with_capacity(25 * 4);
        for class in 0..25 {
            for t in 0..4 {
                let transposed = alf::alf_transpose_luma(&set.luma[class], t);
                luma.push(alf::resolve_luma(&transposed, clip));
            }
        }
        let chroma = set
            .chroma
            .iter()
            .map(|f| alf::resolve_chroma(f, clip))
            .collect();
        Self { luma, chroma }
    }

    fn luma(&self, cls: AlfClassification) -> ResolvedLumaFilter {
        self.luma[cls.class_idx as usize * 4 + cls.transpose_idx as usize]
    }
}

struct FrameJob<'a> {
    spec: &'a WorkloadSpec,
    kernels: &'a KernelTable,
    clock: &'a StageClock,
    luma_table: LumaFilterTable,
    chroma_table: ChromaFilterTable,
    resolved: ResolvedSet,
    chroma_filters: usize,
    workers: usize,
}

impl FrameJob<'_> {
    /// Per-plane CTU rectangle; chroma planes use the half-size grid cell.
    fn plane_rect(&self, plane: &Plane, cx: usize, cy: usize, ctu: usize) -> Option<BlockRect> {
        let x = cx * ctu;
        let y = cy * ctu;
        if x >= plane.width() || y >= plane.height() {
            return None;
        }
        Some(BlockRect::new(
            x,
            y,
            ctu.min(plane.width() - x),
            ctu.min(plane.height() - y),
        ))
    }

    /// Motion-compensated prediction of one CTU rectangle into `buf`.
    fn predict_rect(
        &self,
        src: &Plane,
        rect: BlockRect,
        buf: &mut [u16],
        is_luma: bool,
        frame: usize,
        node: NodeId,
        plane_tag: u64,
    ) {
        let depth = src.depth();
        let tile = if is_luma { LUMA_TILE } else { CHROMA_TILE };
        let steps = if is_luma { 16u64 } else { 32 };
        let mut tmp = vec![0u16; tile * tile];
        let mut tile_idx = 0u64;
        for (ty, th) in tiles(rect.h, tile) {
            for (tx, tw) in tiles(rect.w, tile) {
                let mut rng = SplitMix64::derive(
                    self.spec.seed,
                    &[TAG_MC, frame as u64, node as u64, plane_tag, tile_idx],
                );
                tile_idx += 1;
                let mv_range = if is_luma { 8 } else { 4 };
                let dx = rng.range_i32(-mv_range, mv_range);
                let dy = rng.range_i32(-mv_range, mv_range);
                let rx = (rect.x + tx) as i64 + dx as i64;
                let ry = (rect.y + ty) as i64 + dy as i64;
                let block = BlockRect::new(
                    rx.clamp(0, (src.width() - tw) as i64) as usize,
                    ry.clamp(0, (src.height() - th) as i64) as usize,
                    tw,
                    th,
                );
                let frac = FracPos {
                    fx: rng.below(steps) as u8,
                    fy: rng.below(steps) as u8,
                    hpel_alt: rng.bool(),
                };
                let out = &mut tmp[..tw * th];
                if is_luma {
                    self.kernels.interp_luma(depth)(src, block, frac, &self.luma_table, out);
                } else {
                    self.kernels.interp_chroma(depth)(src, block, frac, &self.chroma_table, out);
                }
                for r in 0..th {
                    buf[(ty + r) * rect.w + tx..(ty + r) * rect.w + tx + tw]
                        .copy_from_slice(&out[r * tw..(r + 1) * tw]);
                }
            }
        }
    }

    /// Adds seeded dequantized inverse-transform residuals onto `buf`.
    fn add_residuals(
        &self,
        rect: BlockRect,
        depth: BitDepth,
        buf: &mut [u16],
        frame: usize,
        node: NodeId,
        plane_tag: u64,
    ) {
        let max = depth.max_value() as i32;
        let mut out = vec![0i16; 32 * 32];
        let mut tile_idx = 0u64;
        for (ty, th) in xform_tiles(rect.h) {
            for (tx, tw) in xform_tiles(rect.w) {
                let mut rng = SplitMix64::derive(
                    self.spec.seed,
                    &[TAG_IQIT, frame as u64, node as u64, plane_tag, tile_idx],
                );
                tile_idx += 1;
                let kind_h = *rng.pick(&XformKind::ALL);
                let kind_v = *rng.pick(&XformKind::ALL);
                let levels = CoeffBlock::random(tw, th, 192, rng.next_u64()).unwrap();
                let coeffs = dequant(&levels, self.spec.qp).unwrap();
                let residual = &mut out[..tw * th];
                self.kernels.xform_inv(depth)(&coeffs, kind_h, kind_v, depth, residual);
                for r in 0..th {
                    for c in 0..tw {
                        let o = (ty + r) * rect.w + tx + c;
                        let v = buf[o] as i32 + residual[r * tw + c] as i32;
                        buf[o] = v.clamp(0, max) as u16;
                    }
                }
            }
        }
    }

    /// Phase 1: per-CTU prediction + residual reconstruction under the
    /// wavefront dependency pattern.
    fn reconstruct(
        &self,
        frame_idx: usize,
        src: &Frame,
        graph: &TaskGraph,
        cols: usize,
    ) -> Result<Frame> {
        let spec = self.spec;
        let depth = spec.depth;
        let cells = [
            PlaneCell::new(Plane::new(src.luma.width(), src.luma.height(), depth)?),
            PlaneCell::new(Plane::new(src.cb.width(), src.cb.height(), depth)?),
            PlaneCell::new(Plane::new(src.cr.width(), src.cr.height(), depth)?),
        ];
        let planes = [&src.luma, &src.cb, &src.cr];
        let do_mc = spec.has_stage(Stage::Mc);
        let do_iqit = spec.has_stage(Stage::Iqit);

        let work = |node: NodeId| {
            let (cy, cx) = (node as usize / cols, node as usize % cols);
            for (pi, (&plane, cell)) in planes.iter().zip(&cells).enumerate() {
                let ctu = if pi == 0 {
                    spec.ctu_size
                } else {
                    spec.ctu_size / 2
                };
                let Some(rect) = self.plane_rect(plane, cx, cy, ctu) else {
                    continue;
                };
                let mut buf = vec![0u16; rect.area()];
                if do_mc {
                    let t0 = Instant::now();
                    self.predict_rect(plane, rect, &mut buf, pi == 0, frame_idx, node, pi as u64);
                    self.clock.add(Stage::Mc, t0.elapsed().as_nanos() as u64);
                } else {
                    for r in 0..rect.h {
                        let row = &plane.row(rect.y + r)[rect.x..rect.x + rect.w];
                        buf[r * rect.w..(r + 1) * rect.w].copy_from_slice(row);
                    }
                }
                if do_iqit {
                    let t0 = Instant::now();
                    self.add_residuals(rect, depth, &mut buf, frame_idx, node, pi as u64);
                    self.clock.add(Stage::Iqit, t0.elapsed().as_nanos() as u64);
                }
                // SAFETY: the wavefront grid assigns each CTU rectangle to
                // exactly one node, so writes never overlap.
                unsafe { cell.write_rect(rect, &buf) };
            }
        };
        execute(graph, self.workers, NodeWork::Run(&work))?;
        let [luma, cb, cr] = cells;
        Ok(Frame {
            luma: luma.into_plane(),
            cb: cb.into_plane(),
            cr: cr.into_plane(),
        })
    }

    /// Phase 2: per-CTU ALF over the finished reconstruction.
    fn filter_alf(
        &self,
        frame_idx: usize,
        recon: &Frame,
        rows: usize,
        cols: usize,
    ) -> Result<Frame> {
        let spec = self.spec;
        let depth = spec.depth;
        let cells = [
            PlaneCell::new(Plane::new(recon.luma.width(), recon.luma.height(), depth)?),
            PlaneCell::new(Plane::new(recon.cb.width(), recon.cb.height(), depth)?),
            PlaneCell::new(Plane::new(recon.cr.width(), recon.cr.height(), depth)?),
        ];
        let planes = [&recon.luma, &recon.cb, &recon.cr];
        let classify = self.kernels.alf_classify(depth);
        let filter_luma = self.kernels.alf_luma(depth);
        let filter_chroma = self.kernels.alf_chroma(depth);

        // ALF reads across CTU boundaries, so tasks are independent.
        let mut graph = TaskGraph::new();
        for _ in 0..rows * cols {
            graph.add_node(0);
        }

        let work = |node: NodeId| {
            let (cy, cx) = (node as usize / cols, node as usize % cols);
            let t0 = Instant::now();
            for (pi, (&plane, cell)) in planes.iter().zip(&cells).enumerate() {
                let ctu = if pi == 0 {
                    spec.ctu_size
                } else {
                    spec.ctu_size / 2
                };
                let Some(rect) = self.plane_rect(plane, cx, cy, ctu) else {
                    continue;
                };
                // The 4x4-aligned subregion gets filtered; rim samples copy.
                let (cw, ch) = (rect.w & !3, rect.h & !3);
                if cw > 0 && ch > 0 {
                    let region = BlockRect::new(rect.x, rect.y, cw, ch);
                    let mut out = vec![0u16; region.area()];
                    if pi == 0 {
                        let blocks = (cw / 4) * (ch / 4);
                        let mut cls = vec![AlfClassification::PLAIN; blocks];
                        classify(plane, region, &mut cls);
                        let filters: Vec<ResolvedLumaFilter> =
                            cls.iter().map(|&c| self.resolved.luma(c)).collect();
                        filter_luma(plane, region, &filters, &mut out);
                    } else {
                        let mut rng = SplitMix64::derive(
                            spec.seed,
                            &[TAG_ALF_CHROMA, frame_idx as u64, node as u64, pi as u64],
                        );
                        let f =
                            &self.resolved.chroma[rng.below(self.chroma_filters as u64) as usize];
                        filter_chroma(plane, region, f, &mut out);
                    }
                    // SAFETY: per-node CTU rectangles are disjoint.
                    unsafe { cell.write_rect(region, &out) };
                }
                // Copy sub-4x4 rims inside this CTU rect.
                for (rx, ry, rw, rh) in [
                    (rect.x + cw, rect.y, rect.w - cw, rect.h),
                    (rect.x, rect.y + ch, cw, rect.h - ch),
                ] {
                    if rw > 0 && rh > 0 {
                        let rim = BlockRect::new(rx, ry, rw, rh);
                        let mut buf = vec![0u16; rim.area()];
                        for r in 0..rh {
                            let row = &plane.row(ry + r)[rx..rx + rw];
                            buf[r * rw..(r + 1) * rw].copy_from_slice(row);
                        }
                        // SAFETY: rims stay inside this node's rectangle.
                        unsafe { cell.write_rect(rim, &buf) };
                    }
                }
            }
            self.clock.add(Stage::Alf, t0.elapsed().as_nanos() as u64);
        };
        execute(&graph, self.workers, NodeWork::Run(&work))?;
        let [luma, cb, cr] = cells;
        Ok(Frame {
            luma: luma.into_plane(),
            cb: cb.into_plane(),
            cr: cr.into_plane(),
        })
    }

    fn run_frame(
        &self,
        frame_idx: usize,
        src: &Frame,
        graph: &TaskGraph,
        rows: usize,
        cols: usize,
    ) -> Result<Frame> {
        let recon = if self.spec.has_stage(Stage::Mc) || self.spec.has_stage(Stage::Iqit) {
            self.reconstruct(frame_idx, src, graph, cols)?
        } else {
            src.clone()
        };
        if self.spec.has_stage(Stage::Alf) {
            self.filter_alf(frame_idx, &recon, rows, cols)
        } else {
            Ok(recon)
        }
    }
}

fn source_frame(spec: &WorkloadSpec, loaded: &[Frame], index: usize) -> Result<Frame> {
    match &spec.source {
        WorkloadSource::Synthetic => Frame::random(
            spec.width,
            spec.height,
            spec.depth,
            SplitMix64::derive(spec.seed, &[TAG_SOURCE, index as u64]).next_u64(),
        ),
        WorkloadSource::Yuv(_) => Ok(loaded[index % loaded.len()].clone()),
    }
}

struct WorkloadRun {
    stages: Vec<StageStat>,
    frame_hash: u64,
    elapsed_ns: u64,
}

fn run_workload(spec: &WorkloadSpec, kernels: &KernelTable, workers: usize) -> Result<WorkloadRun> {
    let loaded = match &spec.source {
        WorkloadSource::Yuv(path) => {
            let frames = load_yuv420(path, spec.width, spec.height, spec.depth, spec.frames)?;
            if frames.is_empty() {
                return Err(Error::format(format!(
                    "{}: no complete frames",
                    path.display()
                )));
            }
            frames
        }
        WorkloadSource::Synthetic => Vec::new(),
    };
    let set = AlfFilterSet::random(SplitMix64::derive(spec.seed, &[TAG_ALF_SET]).next_u64(), 4);
    let clock = StageClock::new();
    let job = FrameJob {
        spec,
        kernels,
        clock: &clock,
        luma_table: LumaFilterTable::default(),
        chroma_table: ChromaFilterTable::default(),
        chroma_filters: set.chroma.len(),
        resolved: ResolvedSet::new(&set, spec.depth),
        workers,
    };
    let grid = CtuGrid::new(spec.width, spec.height, spec.ctu_size)?;
    let graph = wpp_dependencies(grid.rows, grid.cols)?;

    let started = Instant::now();
    let mut hasher = ContentHasher::new();
    for index in 0..spec.frames {
        let src = source_frame(spec, &loaded, index)?;
        let out = job.run_frame(index, &src, &graph, grid.rows, grid.cols)?;
        hasher.update_frame(&out);
    }
    Ok(WorkloadRun {
        stages: clock.stats(&spec.stages),
        frame_hash: hasher.finish(),
        elapsed_ns: started.elapsed().as_nanos() as u64,
    })
}

/// Runs the workload once and reports per-stage times. `tier` of `None`
/// resolves to the environment default or the highest detected tier;
/// `workers` is the wavefront pool size.
pub fn run_bench(spec: &WorkloadSpec, tier: Option<VariantTier>, workers: usize) -> Result<Report> {
    spec.validate()?;
    if workers == 0 {
        return Err(Error::contract("worker count must be at least 1"));
    }
    let kernels = build_registry(tier)?;
    let run = run_workload(spec, &kernels, workers)?;
    Ok(Report {
        meta: run_meta(spec, kernels.tier().to_string(), workers),
        stages: run.stages,
        frame_hash: format!("{:016x}", run.frame_hash),
        sweep: None,
    })
}

/// Runs the cross product of tiers and worker counts on the identical
/// workload and reports speedups relative to the (scalar, 1 worker)
/// baseline. The baseline cell always runs, whether or not requested; it
/// appears in the rows only when requested. Output hashes must agree across
/// every cell, enforcing the workload-determinism contract.
pub fn run_sweep(
    spec: &WorkloadSpec,
    worker_counts: &[usize],
    tiers: &[VariantTier],
) -> Result<Report> {
    spec.validate()?;
    if worker_counts.is_empty() || tiers.is_empty() {
        return Err(Error::contract(
            "sweep needs at least one tier and worker count",
        ));
    }
    if worker_counts.contains(&0) {
        return Err(Error::contract("worker count must be at least 1"));
    }

    let mut rows = Vec::new();
    let mut common_hash: Option<u64> = None;
    let mut baseline_ns = None;

    let mut run_cell = |tier: VariantTier, workers: usize| -> Result<u64> {
        let kernels = build_registry(Some(tier))?;
        let run = run_workload(spec, &kernels, workers)?;
        match common_hash {
            None => common_hash = Some(run.frame_hash),
            Some(h) if h != run.frame_hash => {
                return Err(Error::Contract(format!(
                    "workload hash diverged at tier {tier}, {workers} workers: \
                     {:016x} vs {:016x}",
                    run.frame_hash, h
                )));
            }
            _ => {}
        }
        Ok(run.elapsed_ns)
    };

    let requested_baseline = tiers.contains(&VariantTier::Scalar) && worker_counts.contains(&1);
    if !requested_baseline {
        baseline_ns = Some(run_cell(VariantTier::Scalar, 1)?);
    }
    for &tier in tiers {
        for &workers in worker_counts {
            let ns = run_cell(tier, workers)?;
            if tier == VariantTier::Scalar && workers == 1 && baseline_ns.is_none() {
                baseline_ns = Some(ns);
            }
            rows.push(SweepRow {
                tier: tier.to_string(),
                workers,
                makespan_ns: ns,
                speedup: 0.0,
            });
        }
    }
    let baseline = baseline_ns.expect("baseline always runs");
    for row in &mut rows {
        row.speedup = if row.tier == VariantTier::Scalar.name() && row.workers == 1 {
            1.0
        } else {
            baseline as f64 / row.makespan_ns.max(1) as f64
        };
    }

    let tier_names: Vec<&str> = tiers.iter().map(|t| t.name()).collect();
    let meta = RunMeta {
        workers: *worker_counts.iter().max().unwrap(),
        ..run_meta(spec, tier_names.join(","), 1)
    };
    Ok(Report {
        meta,
        stages: Vec::new(),
        frame_hash: format!("{:016x}", common_hash.unwrap_or(0)),
        sweep: Some(rows),
    })
}
