//! Adaptive loop filter: per-4x4 gradient classification into 25 classes,
//! geometric filter transposition, and clipped diamond filtering.
//!
//! Luma uses a 7x7 diamond (25 taps, 13 unique coefficients thanks to point
//! symmetry; the center is implicit) and picks one of 25 filters per 4x4
//! block, optionally transposed by one of four geometric transforms. Chroma
//! uses a 5x5 diamond (13 taps, 7 unique) with no classification and no
//! transposition. Each neighbor contributes through a clipped difference
//! against the center sample:
//!
//! ```text
//! out = clip_pixel(cur + (sum_i c_i * (K(R(+off_i) - cur, b_i)
//!                                    + K(R(-off_i) - cur, b_i)) + 64) >> 7)
//! ```
//!
//! with `K(d, b) = clamp(d, -b, b)` and `b_i` drawn from a per-depth clip
//! table. Vector variants process multiple horizontally adjacent 4x4 blocks
//! per step and are bit-exact with block-at-a-time scalar evaluation.

pub(crate) mod avx2;
pub(crate) mod sse41;

use std::sync::OnceLock;

use crate::dispatch::KernelTable;
use crate::error::{Error, Result};
use crate::frame::{BitDepth, BlockRect, Plane};
use crate::rng::SplitMix64;

pub const ALF_NUM_CLASSES: usize = 25;
pub const ALF_LUMA_COEFFS: usize = 12;
pub const ALF_CHROMA_COEFFS: usize = 6;
/// Luma neighborhood radius; chroma uses 2.
pub const ALF_LUMA_RADIUS: usize = 3;
pub const ALF_CHROMA_RADIUS: usize = 2;

/// Unique-coefficient offsets of the upper half of the 7x7 luma diamond,
/// in coefficient-index order. The point-symmetric offset `(-dx, -dy)`
/// shares the index of `(dx, dy)`; index 12 is the implicit center.
pub const LUMA_OFFSETS: [(i32, i32); ALF_LUMA_COEFFS] = [
    (0, -3),
    (-1, -2),
    (0, -2),
    (1, -2),
    (-2, -1),
    (-1, -1),
    (0, -1),
    (1, -1),
    (2, -1),
    (-3, 0),
    (-2, 0),
    (-1, 0),
];

/// Upper half of the 5x5 chroma diamond; index 6 is the implicit center.
pub const CHROMA_OFFSETS: [(i32, i32); ALF_CHROMA_COEFFS] =
    [(0, -2), (-1, -1), (0, -1), (1, -1), (-2, 0), (-1, 0)];

/// Coefficient index carried by a diamond offset, honoring point symmetry;
/// the center maps to `offsets.len()`.
fn diamond_index(offsets: &[(i32, i32)], off: (i32, i32)) -> Option<usize> {
    if off == (0, 0) {
        return Some(offsets.len());
    }
    offsets
        .iter()
        .position(|&o| o == off || o == (-off.0, -off.1))
}

/// The four geometric transforms: identity, axis swap, vertical flip, and
/// their composition (a 90-degree rotation).
fn transform_offset(t: u8, (dx, dy): (i32, i32)) -> (i32, i32) {
    match t {
        0 => (dx, dy),
        1 => (dy, dx),
        2 => (dx, -dy),
        3 => (dy, -dx),
        _ => unreachable!("transpose index {t} outside 0..4"),
    }
}

fn build_perms<const N: usize>(offsets: &[(i32, i32); N]) -> [[usize; N]; 4] {
    let mut perms = [[0usize; N]; 4];
    for (t, perm) in perms.iter_mut().enumerate() {
        for (i, &off) in offsets.iter().enumerate() {
            let mapped = transform_offset(t as u8, off);
            perm[i] = diamond_index(offsets, mapped)
                .expect("diamond closed under the geometric transforms");
        }
    }
    perms
}

fn luma_perms() -> &'static [[usize; ALF_LUMA_COEFFS]; 4] {
    static PERMS: OnceLock<[[usize; ALF_LUMA_COEFFS]; 4]> = OnceLock::new();
    PERMS.get_or_init(|| build_perms(&LUMA_OFFSETS))
}

fn chroma_perms() -> &'static [[usize; ALF_CHROMA_COEFFS]; 4] {
    static PERMS: OnceLock<[[usize; ALF_CHROMA_COEFFS]; 4]> = OnceLock::new();
    PERMS.get_or_init(|| build_perms(&CHROMA_OFFSETS))
}

/// One 7x7 diamond luma filter: 12 coefficients (center implicit) plus a
/// clip-strength index per tap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlfLumaFilter {
    pub coeff: [i16; ALF_LUMA_COEFFS],
    pub clip_idx: [u8; ALF_LUMA_COEFFS],
}

/// One 5x5 diamond chroma filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlfChromaFilter {
    pub coeff: [i16; ALF_CHROMA_COEFFS],
    pub clip_idx: [u8; ALF_CHROMA_COEFFS],
}

fn check_filter(coeff: &[i16], clip_idx: &[u8], what: &str) -> Result<()> {
    for &c in coeff {
        if c.abs() > 127 {
            return Err(Error::format(format!(
                "{what}: coefficient {c} outside +-127"
            )));
        }
    }
    for &k in clip_idx {
        if k > 3 {
            return Err(Error::format(format!(
                "{what}: clip index {k} outside 0..4"
            )));
        }
    }
    Ok(())
}

impl AlfLumaFilter {
    pub const ZERO: AlfLumaFilter = AlfLumaFilter {
        coeff: [0; ALF_LUMA_COEFFS],
        clip_idx: [0; ALF_LUMA_COEFFS],
    };

    pub fn validate(&self) -> Result<()> {
        check_filter(&self.coeff, &self.clip_idx, "luma filter")
    }
}

impl AlfChromaFilter {
    pub const ZERO: AlfChromaFilter = AlfChromaFilter {
        coeff: [0; ALF_CHROMA_COEFFS],
        clip_idx: [0; ALF_CHROMA_COEFFS],
    };

    pub fn validate(&self) -> Result<()> {
        check_filter(&self.coeff, &self.clip_idx, "chroma filter")
    }
}

/// Per-depth clip magnitudes: `clip_table[n] = 1 << (depth - 1 - 2n)`,
/// i.e. `{128, 32, 8, 2}` at depth 8.
pub fn default_clip_table(depth: BitDepth) -> [i16; 4] {
    let bits = depth.bits();
    [
        1 << (bits - 1),
        1 << (bits - 3),
        1 << (bits - 5),
        1 << (bits - 7),
    ]
}

/// A complete filter set: 25 classified luma filters, 1..=8 chroma filters,
/// and per-depth clip tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlfFilterSet {
    pub luma: [AlfLumaFilter; ALF_NUM_CLASSES],
    pub chroma: Vec<AlfChromaFilter>,
    clip_table: [[i16; 4]; 2],
}

impl AlfFilterSet {
    pub fn new(
        luma: [AlfLumaFilter; ALF_NUM_CLASSES],
        chroma: Vec<AlfChromaFilter>,
    ) -> Result<Self> {
        let set = Self {
            luma,
            chroma,
            clip_table: [
                default_clip_table(BitDepth::Eight),
                default_clip_table(BitDepth::Ten),
            ],
        };
        set.validate()?;
        Ok(set)
    }

    pub fn with_clip_table(mut self, depth: BitDepth, table: [i16; 4]) -> Result<Self> {
        self.clip_table[depth.index()] = table;
        self.validate()?;
        Ok(self)
    }

    pub fn clip_table(&self, depth: BitDepth) -> [i16; 4] {
        self.clip_table[depth.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.chroma.is_empty() || self.chroma.len() > 8 {
            return Err(Error::format(format!(
                "{} chroma filters, expected 1..=8",
                self.chroma.len()
            )));
        }
        for f in &self.luma {
            f.validate()?;
        }
        for f in &self.chroma {
            f.validate()?;
        }
        for table in &self.clip_table {
            if !table.windows(2).all(|w| w[0] > w[1]) || table[3] < 1 {
                return Err(Error::format("clip table must be strictly decreasing"));
            }
        }
        Ok(())
    }

    /// All-zero filters: filtering becomes the identity.
    pub fn zero() -> Self {
        Self::new(
            [AlfLumaFilter::ZERO; ALF_NUM_CLASSES],
            vec![AlfChromaFilter::ZERO],
        )
        .unwrap()
    }

    /// Seeded random filter set for synthetic workloads.
    pub fn random(seed: u64, chroma_count: usize) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut luma = [AlfLumaFilter::ZERO; ALF_NUM_CLASSES];
        for f in &mut luma {
            for c in &mut f.coeff {
                *c = rng.range_i32(-127, 127) as i16;
            }
            for k in &mut f.clip_idx {
                *k = rng.below(4) as u8;
            }
        }
        let chroma = (0..chroma_count.clamp(1, 8))
            .map(|_| {
                let mut f = AlfChromaFilter::ZERO;
                for c in &mut f.coeff {
                    *c = rng.range_i32(-127, 127) as i16;
                }
                for k in &mut f.clip_idx {
                    *k = rng.below(4) as u8;
                }
                f
            })
            .collect();
        Self::new(luma, chroma).unwrap()
    }

    /// Parses a text resource: 25 luma lines of `12 coefficients ; 12 clip
    /// indices`, then 1..=8 chroma lines of `6 coefficients ; 6 clip
    /// indices`. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        fn parse_line(line: &str, n: usize, lineno: usize) -> Result<(Vec<i16>, Vec<u8>)> {
            let (a, b) = line.split_once(';').ok_or_else(|| {
                Error::format(format!("line {lineno}: expected `coeffs ; clip indices`"))
            })?;
            let coeff: Vec<i16> = a
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::format(format!("line {lineno}: bad coefficient {t:?}")))
                })
                .collect::<Result<_>>()?;
            let clips: Vec<u8> = b
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::format(format!("line {lineno}: bad clip index {t:?}")))
                })
                .collect::<Result<_>>()?;
            if coeff.len() != n || clips.len() != n {
                return Err(Error::format(format!(
                    "line {lineno}: expected {n} coefficients and {n} clip indices"
                )));
            }
            Ok((coeff, clips))
        }

        let mut luma = [AlfLumaFilter::ZERO; ALF_NUM_CLASSES];
        let mut chroma = Vec::new();
        let mut index = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if index < ALF_NUM_CLASSES {
                let (c, k) = parse_line(line, ALF_LUMA_COEFFS, i + 1)?;
                luma[index].coeff.copy_from_slice(&c);
                luma[index].clip_idx.copy_from_slice(&k);
            } else {
                let (c, k) = parse_line(line, ALF_CHROMA_COEFFS, i + 1)?;
                let mut f = AlfChromaFilter::ZERO;
                f.coeff.copy_from_slice(&c);
                f.clip_idx.copy_from_slice(&k);
                chroma.push(f);
            }
            index += 1;
        }
        if index < ALF_NUM_CLASSES + 1 {
            return Err(Error::format(format!(
                "filter set has {index} lines, expected 25 luma + 1..=8 chroma"
            )));
        }
        Self::new(luma, chroma)
    }

    /// Serializes in the [`AlfFilterSet::from_text`] format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[i16]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let join_u8 = |v: &[u8]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        for f in &self.luma {
            out.push_str(&format!("{} ; {}\n", join(&f.coeff), join_u8(&f.clip_idx)));
        }
        for f in &self.chroma {
            out.push_str(&format!("{} ; {}\n", join(&f.coeff), join_u8(&f.clip_idx)));
        }
        out
    }
}

/// Result of classifying one 4x4 block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlfClassification {
    /// `5 * direction + activity`, 0..=24.
    pub class_idx: u8,
    /// Geometric transform to apply to the class filter, 0..=3.
    pub transpose_idx: u8,
}

impl AlfClassification {
    pub const PLAIN: AlfClassification = AlfClassification {
        class_idx: 0,
        transpose_idx: 0,
    };
}

const ACTIVITY_TABLE: [u8; 16] = [0, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3, 4];

/// Turns the four Laplacian gradient sums into a classification.
///
/// Direction uses integer-exact ratio comparisons (`a > 4.5 b` as
/// `2a > 9b`); a zero min with a positive max counts as infinite ratio and
/// `0/0` as ratio 1. Activity buckets `(GV + GH) >> (depth + 2)` through a
/// 16-entry monotone table; the shift is sized so single-direction textures
/// can reach the top activity level (the 8x8 window bounds `GV + GH` by
/// `2^(depth + 9)`, so a larger shift would tie level 4 to near-isotropic
/// blocks only).
pub(crate) fn resolve_class(
    gv: u64,
    gh: u64,
    gd0: u64,
    gd1: u64,
    depth: BitDepth,
) -> AlfClassification {
    let (hv_min, hv_max) = if gv < gh { (gv, gh) } else { (gh, gv) };
    let (d_min, d_max) = if gd0 < gd1 { (gd0, gd1) } else { (gd1, gd0) };
    let direction = if hv_max <= 2 * hv_min && d_max <= 2 * d_min {
        0
    } else if hv_max * d_min > d_max * hv_min {
        // Horizontal/vertical structure dominates.
        if 2 * hv_max <= 9 * hv_min {
            1
        } else {
            2
        }
    } else if 2 * d_max <= 9 * d_min {
        3
    } else {
        4
    };
    let activity = gv + gh;
    let idx16 = (activity >> (depth.bits() + 2)).min(15) as usize;
    let transpose = (if gd1 > gd0 { 2 } else { 0 }) + (if gh > gv { 1 } else { 0 });
    AlfClassification {
        class_idx: 5 * direction + ACTIVITY_TABLE[idx16],
        transpose_idx: transpose as u8,
    }
}

/// Scalar gradient accumulation over the 8x8 window centered on the 4x4
/// block at `(bx, by)`, with edge replication.
pub(crate) fn classify_4x4_at(p: &Plane, bx: usize, by: usize) -> AlfClassification {
    let (mut gv, mut gh, mut gd0, mut gd1) = (0u64, 0u64, 0u64, 0u64);
    for wy in -2i64..6 {
        for wx in -2i64..6 {
            let x = bx as isize + wx as isize;
            let y = by as isize + wy as isize;
            let c2 = 2 * p.read_clamped(x, y) as i64;
            let up = p.read_clamped(x, y - 1) as i64;
            let down = p.read_clamped(x, y + 1) as i64;
            let left = p.read_clamped(x - 1, y) as i64;
            let right = p.read_clamped(x + 1, y) as i64;
            let ul = p.read_clamped(x - 1, y - 1) as i64;
            let ur = p.read_clamped(x + 1, y - 1) as i64;
            let dl = p.read_clamped(x - 1, y + 1) as i64;
            let dr = p.read_clamped(x + 1, y + 1) as i64;
            gv += (c2 - up - down).unsigned_abs();
            gh += (c2 - left - right).unsigned_abs();
            gd0 += (c2 - ul - dr).unsigned_abs();
            gd1 += (c2 - ur - dl).unsigned_abs();
        }
    }
    resolve_class(gv, gh, gd0, gd1, p.depth())
}

/// Classifies one 4x4 block from the local gradient field.
pub fn alf_classify_4x4(p: &Plane, block: BlockRect) -> Result<AlfClassification> {
    if block.w != 4 || block.h != 4 {
        return Err(Error::contract("classification operates on 4x4 blocks"));
    }
    block.check_within(p.width(), p.height())?;
    Ok(classify_4x4_at(p, block.x, block.y))
}

/// Applies a geometric transform to a luma filter by permuting coefficients
/// and clip indices along the diamond layout.
pub fn alf_transpose_luma(f: &AlfLumaFilter, transpose_idx: u8) -> AlfLumaFilter {
    assert!(transpose_idx < 4, "transpose index outside 0..4");
    let perm = &luma_perms()[transpose_idx as usize];
    let mut out = AlfLumaFilter::ZERO;
    for i in 0..ALF_LUMA_COEFFS {
        out.coeff[i] = f.coeff[perm[i]];
        out.clip_idx[i] = f.clip_idx[perm[i]];
    }
    out
}

/// Chroma analog of [`alf_transpose_luma`]; the filter-plane path never
/// rotates chroma, but the transform itself is defined for both shapes.
pub fn alf_transpose_chroma(f: &AlfChromaFilter, transpose_idx: u8) -> AlfChromaFilter {
    assert!(transpose_idx < 4, "transpose index outside 0..4");
    let perm = &chroma_perms()[transpose_idx as usize];
    let mut out = AlfChromaFilter::ZERO;
    for i in 0..ALF_CHROMA_COEFFS {
        out.coeff[i] = f.coeff[perm[i]];
        out.clip_idx[i] = f.clip_idx[perm[i]];
    }
    out
}

/// A filter ready to run: transposition applied and clip indices resolved
/// to magnitudes for a concrete depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedLumaFilter {
    pub coeff: [i16; ALF_LUMA_COEFFS],
    pub clip: [i16; ALF_LUMA_COEFFS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedChromaFilter {
    pub coeff: [i16; ALF_CHROMA_COEFFS],
    pub clip: [i16; ALF_CHROMA_COEFFS],
}

pub(crate) fn resolve_luma(f: &AlfLumaFilter, clip_table: [i16; 4]) -> ResolvedLumaFilter {
    let mut clip = [0i16; ALF_LUMA_COEFFS];
    for (c, &k) in clip.iter_mut().zip(&f.clip_idx) {
        *c = clip_table[k as usize];
    }
    ResolvedLumaFilter {
        coeff: f.coeff,
        clip,
    }
}

pub(crate) fn resolve_chroma(f: &AlfChromaFilter, clip_table: [i16; 4]) -> ResolvedChromaFilter {
    let mut clip = [0i16; ALF_CHROMA_COEFFS];
    for (c, &k) in clip.iter_mut().zip(&f.clip_idx) {
        *c = clip_table[k as usize];
    }
    ResolvedChromaFilter {
        coeff: f.coeff,
        clip,
    }
}

#[inline]
fn clipped_pair(p: &Plane, x: isize, y: isize, dx: i32, dy: i32, cur: i32, bound: i32) -> i32 {
    let a = p.read_clamped(x + dx as isize, y + dy as isize) as i32 - cur;
    let b = p.read_clamped(x - dx as isize, y - dy as isize) as i32 - cur;
    a.clamp(-bound, bound) + b.clamp(-bound, bound)
}

pub(crate) fn luma_filtered_sample(src: &Plane, x: usize, y: usize, f: &ResolvedLumaFilter) -> u16 {
    let cur = src.get(x, y) as i32;
    let (xi, yi) = (x as isize, y as isize);
    let mut acc = 0i32;
    for i in 0..ALF_LUMA_COEFFS {
        let (dx, dy) = LUMA_OFFSETS[i];
        acc += f.coeff[i] as i32 * clipped_pair(src, xi, yi, dx, dy, cur, f.clip[i] as i32);
    }
    (cur + ((acc + 64) >> 7)).clamp(0, src.max_value() as i32) as u16
}

pub(crate) fn chroma_filtered_sample(
    src: &Plane,
    x: usize,
    y: usize,
    f: &ResolvedChromaFilter,
) -> u16 {
    let cur = src.get(x, y) as i32;
    let (xi, yi) = (x as isize, y as isize);
    let mut acc = 0i32;
    for i in 0..ALF_CHROMA_COEFFS {
        let (dx, dy) = CHROMA_OFFSETS[i];
        acc += f.coeff[i] as i32 * clipped_pair(src, xi, yi, dx, dy, cur, f.clip[i] as i32);
    }
    (cur + ((acc + 64) >> 7)).clamp(0, src.max_value() as i32) as u16
}

fn check_filter_block_args(src: &Plane, dst: &Plane, block: BlockRect) -> Result<()> {
    if !src.same_geometry(dst) {
        return Err(Error::contract("src and dst must share geometry"));
    }
    if block.w != 4 || block.h != 4 {
        return Err(Error::contract("block filtering operates on 4x4 blocks"));
    }
    block.check_within(src.width(), src.height())
}

/// Filters one 4x4 luma block with an already-transposed filter.
pub fn alf_filter_block_luma(
    src: &Plane,
    dst: &mut Plane,
    block: BlockRect,
    f: &AlfLumaFilter,
    clip_table: [i16; 4],
) -> Result<()> {
    check_filter_block_args(src, dst, block)?;
    let rf = resolve_luma(f, clip_table);
    for y in block.y..block.y + block.h {
        for x in block.x..block.x + block.w {
            let v = luma_filtered_sample(src, x, y, &rf);
            dst.set(x, y, v);
        }
    }
    Ok(())
}

/// Filters one 4x4 chroma block; chroma never classifies or transposes.
pub fn alf_filter_block_chroma(
    src: &Plane,
    dst: &mut Plane,
    block: BlockRect,
    f: &AlfChromaFilter,
    clip_table: [i16; 4],
) -> Result<()> {
    check_filter_block_args(src, dst, block)?;
    let rf = resolve_chroma(f, clip_table);
    for y in block.y..block.y + block.h {
        for x in block.x..block.x + block.w {
            let v = chroma_filtered_sample(src, x, y, &rf);
            dst.set(x, y, v);
        }
    }
    Ok(())
}

/// Plane component selector for [`alf_filter_plane`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlfComponent {
    Luma,
    Chroma,
}

pub(crate) struct CtuGrid {
    pub cols: usize,
    pub rows: usize,
    pub ctu_size: usize,
}

impl CtuGrid {
    pub fn new(width: usize, height: usize, ctu_size: usize) -> Result<Self> {
        if ctu_size < 4 || !ctu_size.is_multiple_of(4) {
            return Err(Error::contract("CTU size must be a positive multiple of 4"));
        }
        Ok(Self {
            cols: width.div_ceil(ctu_size),
            rows: height.div_ceil(ctu_size),
            ctu_size,
        })
    }

    /// CTU rect clipped to the plane.
    pub fn rect(&self, cx: usize, cy: usize, width: usize, height: usize) -> BlockRect {
        let x = cx * self.ctu_size;
        let y = cy * self.ctu_size;
        BlockRect::new(
            x,
            y,
            self.ctu_size.min(width - x),
            self.ctu_size.min(height - y),
        )
    }

    /// CTU rect further clipped to the 4x4 coverage grid; `None` if no
    /// whole 4x4 block starts inside.
    pub fn covered_rect(
        &self,
        cx: usize,
        cy: usize,
        width: usize,
        height: usize,
    ) -> Option<BlockRect> {
        let r = self.rect(cx, cy, width, height);
        let x1 = (r.x + r.w).min(width & !3);
        let y1 = (r.y + r.h).min(height & !3);
        if r.x >= x1 || r.y >= y1 {
            return None;
        }
        Some(BlockRect::new(r.x, r.y, x1 - r.x, y1 - r.y))
    }
}

fn check_plane_filter_args(
    src: &Plane,
    dst: &Plane,
    ctu_enable: &[bool],
    grid: &CtuGrid,
) -> Result<()> {
    if !src.same_geometry(dst) {
        return Err(Error::contract("src and dst must share geometry"));
    }
    if ctu_enable.len() != grid.cols * grid.rows {
        return Err(Error::contract(format!(
            "enable map has {} entries for a {}x{} CTU grid",
            ctu_enable.len(),
            grid.cols,
            grid.rows
        )));
    }
    Ok(())
}

/// Copies the right/bottom rims that the 4x4 grid cannot cover.
fn copy_uncovered_rims(src: &Plane, dst: &mut Plane) -> Result<()> {
    let (w, h) = (src.width(), src.height());
    let (cw, ch) = (w & !3, h & !3);
    if cw < w {
        dst.copy_rect_from(src, BlockRect::new(cw, 0, w - cw, h))?;
    }
    if ch < h && cw > 0 {
        dst.copy_rect_from(src, BlockRect::new(0, ch, cw, h - ch))?;
    }
    Ok(())
}

/// Scalar reference for whole-plane filtering: for each enabled CTU, every
/// 4x4 block is classified (luma), its class filter transposedable and
/// applied; disabled CTUs are copied verbatim. Chroma uses filter 0 with no
/// classification. Sample rims not covered by the 4x4 grid are copied.
pub fn alf_filter_plane(
    src: &Plane,
    dst: &mut Plane,
    set: &AlfFilterSet,
    component: AlfComponent,
    ctu_enable: &[bool],
    ctu_size: usize,
) -> Result<()> {
    let grid = CtuGrid::new(src.width(), src.height(), ctu_size)?;
    check_plane_filter_args(src, dst, ctu_enable, &grid)?;
    set.validate()?;
    let clip_table = set.clip_table(src.depth());
    copy_uncovered_rims(src, dst)?;
    for cy in 0..grid.rows {
        for cx in 0..grid.cols {
            // CTUs entirely inside the uncovered rims were already copied.
            let Some(region) = grid.covered_rect(cx, cy, src.width(), src.height()) else {
                continue;
            };
            if !ctu_enable[cy * grid.cols + cx] {
                dst.copy_rect_from(src, region)?;
                continue;
            }
            for by in (region.y..region.y + region.h).step_by(4) {
                for bx in (region.x..region.x + region.w).step_by(4) {
                    let block = BlockRect::new(bx, by, 4, 4);
                    match component {
                        AlfComponent::Luma => {
                            let cls = classify_4x4_at(src, bx, by);
                            let filter = alf_transpose_luma(
                                &set.luma[cls.class_idx as usize],
                                cls.transpose_idx,
                            );
                            alf_filter_block_luma(src, dst, block, &filter, clip_table)?;
                        }
                        AlfComponent::Chroma => {
                            alf_filter_block_chroma(src, dst, block, &set.chroma[0], clip_table)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Registry-accelerated whole-plane filtering; bit-exact with
/// [`alf_filter_plane`].
pub fn alf_filter_plane_with(
    kernels: &KernelTable,
    src: &Plane,
    dst: &mut Plane,
    set: &AlfFilterSet,
    component: AlfComponent,
    ctu_enable: &[bool],
    ctu_size: usize,
) -> Result<()> {
    let grid = CtuGrid::new(src.width(), src.height(), ctu_size)?;
    check_plane_filter_args(src, dst, ctu_enable, &grid)?;
    set.validate()?;
    let depth = src.depth();
    let clip_table = set.clip_table(depth);
    copy_uncovered_rims(src, dst)?;

    let classify = kernels.alf_classify(depth);
    let filter_luma = kernels.alf_luma(depth);
    let filter_chroma = kernels.alf_chroma(depth);
    let mut cache = ResolvedFilterCache::new(set, clip_table);
    let mut classifications = Vec::new();
    let mut filters = Vec::new();
    let mut out = Vec::new();

    for cy in 0..grid.rows {
        for cx in 0..grid.cols {
            let Some(region) = grid.covered_rect(cx, cy, src.width(), src.height()) else {
                continue;
            };
            if !ctu_enable[cy * grid.cols + cx] {
                dst.copy_rect_from(src, region)?;
                continue;
            }
            out.clear();
            out.resize(region.area(), 0);
            match component {
                AlfComponent::Luma => {
                    let blocks = (region.w / 4) * (region.h / 4);
                    classifications.clear();
                    classifications.resize(blocks, AlfClassification::PLAIN);
                    classify(src, region, &mut classifications);
                    filters.clear();
                    filters.extend(classifications.iter().map(|c| *cache.luma(c)));
                    filter_luma(src, region, &filters, &mut out);
                }
                AlfComponent::Chroma => {
                    let rf = resolve_chroma(&set.chroma[0], clip_table);
                    filter_chroma(src, region, &rf, &mut out);
                }
            }
            dst.write_rect(region, &out)?;
        }
    }
    Ok(())
}

/// Lazily resolved (class, transpose) filter table for one plane pass.
pub(crate) struct ResolvedFilterCache<'a> {
    set: &'a AlfFilterSet,
    clip_table: [i16; 4],
    cache: [[Option<ResolvedLumaFilter>; 4]; ALF_NUM_CLASSES],
}

impl<'a> ResolvedFilterCache<'a> {
    pub fn new(set: &'a AlfFilterSet, clip_table: [i16; 4]) -> Self {
        Self {
            set,
            clip_table,
            cache: [[None; 4]; ALF_NUM_CLASSES],
        }
    }

    pub fn luma(&mut self, cls: &AlfClassification) -> &ResolvedLumaFilter {
        let slot = &mut self.cache[cls.class_idx as usize][cls.transpose_idx as usize];
        if slot.is_none() {
            let transposed =
                alf_transpose_luma(&self.set.luma[cls.class_idx as usize], cls.transpose_idx);
            *slot = Some(resolve_luma(&transposed, self.clip_table));
        }
        slot.as_ref().unwrap()
    }
}

// ---------------------------------------------------------------------------
// Region kernels (the dispatchable units). The region rect must be 4-aligned
// in position and extent and lie inside the plane; outputs are compact
// row-major buffers of region.w * region.h samples.
// ---------------------------------------------------------------------------

/// Classification kernel: one entry per 4x4 block, row-major.
pub type AlfClassifyFn = fn(&Plane, BlockRect, &mut [AlfClassification]);
/// Luma region filter: one resolved filter per 4x4 block, row-major.
pub type AlfLumaFilterFn = fn(&Plane, BlockRect, &[ResolvedLumaFilter], &mut [u16]);
/// Chroma region filter: one resolved filter for the whole region.
pub type AlfChromaFilterFn = fn(&Plane, BlockRect, &ResolvedChromaFilter, &mut [u16]);

pub(crate) fn debug_check_region(p: &Plane, region: BlockRect) {
    debug_assert!(region.x.is_multiple_of(4) && region.y.is_multiple_of(4));
    debug_assert!(region.w.is_multiple_of(4) && region.h.is_multiple_of(4));
    debug_assert!(region.x + region.w <= p.width() && region.y + region.h <= p.height());
}

pub(crate) fn classify_region_scalar(p: &Plane, region: BlockRect, out: &mut [AlfClassification]) {
    debug_check_region(p, region);
    let bw = region.w / 4;
    for by in 0..region.h / 4 {
        for bx in 0..bw {
            out[by * bw + bx] = classify_4x4_at(p, region.x + 4 * bx, region.y + 4 * by);
        }
    }
}

pub(crate) fn filter_region_luma_scalar(
    src: &Plane,
    region: BlockRect,
    filters: &[ResolvedLumaFilter],
    out: &mut [u16],
) {
    debug_check_region(src, region);
    let bw = region.w / 4;
    for (bi, f) in filters.iter().enumerate() {
        let bx = region.x + 4 * (bi % bw);
        let by = region.y + 4 * (bi / bw);
        for y in 0..4 {
            for x in 0..4 {
                let v = luma_filtered_sample(src, bx + x, by + y, f);
                out[(by + y - region.y) * region.w + (bx + x - region.x)] = v;
            }
        }
    }
}

pub(crate) fn filter_region_chroma_scalar(
    src: &Plane,
    region: BlockRect,
    f: &ResolvedChromaFilter,
    out: &mut [u16],
) {
    debug_check_region(src, region);
    for y in 0..region.h {
        for x in 0..region.w {
            out[y * region.w + x] = chroma_filtered_sample(src, region.x + x, region.y + y, f);
        }
    }
}

#[cfg(test)]
mod tests;
