//! 128-bit ALF kernels.
//!
//! The filter processes two horizontally adjacent 4x4 blocks per step: a row
//! of eight 16-bit samples fills one 128-bit register, with per-half
//! coefficient and clip vectors carrying each block's filter. The region is
//! first copied into a padded buffer (radius 3 plus right slack for 8-lane
//! loads) so neighbor taps become plain unaligned loads.

use std::arch::x86_64::*;

use crate::frame::{extract_window_i16, BlockRect, Plane};

use super::{
    debug_check_region, resolve_class, AlfClassification, ResolvedChromaFilter, ResolvedLumaFilter,
    ALF_CHROMA_COEFFS, ALF_LUMA_COEFFS, CHROMA_OFFSETS, LUMA_OFFSETS,
};

pub(super) const PAD_LEFT: usize = 3;
pub(super) const PAD_TOP: usize = 3;
/// Right slack covers 16-lane loads that begin inside the last few region
/// columns, plus tap reach.
pub(super) const PAD_RIGHT: usize = 16;
pub(super) const PAD_BOTTOM: usize = 3;

/// Region copy with replicated plane borders; all kernel loads index this.
pub(super) struct PaddedRegion {
    pub buf: Vec<i16>,
    pub stride: usize,
}

impl PaddedRegion {
    pub fn new(src: &Plane, region: BlockRect) -> Self {
        let stride = region.w + PAD_LEFT + PAD_RIGHT;
        let height = region.h + PAD_TOP + PAD_BOTTOM;
        let buf = extract_window_i16(
            src,
            region.x as isize - PAD_LEFT as isize,
            region.y as isize - PAD_TOP as isize,
            stride,
            height,
        );
        Self { buf, stride }
    }

    /// Pointer to region-local sample (x, y); negative offsets up to the pad
    /// radius are valid.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> *const i16 {
        let idx = (y + PAD_TOP) * self.stride + x + PAD_LEFT;
        debug_assert!(idx < self.buf.len());
        unsafe { self.buf.as_ptr().add(idx) }
    }
}

#[inline]
#[target_feature(enable = "sse4.1")]
unsafe fn hsum_epi32(v: __m128i) -> i32 {
    let hi = _mm_add_epi32(v, _mm_shuffle_epi32(v, 0b00_00_11_10));
    let s = _mm_add_epi32(hi, _mm_shuffle_epi32(hi, 0b00_00_00_01));
    _mm_cvtsi128_si32(s)
}

/// Classifies every 4x4 block of the region: vectorized gradient rows, the
/// same integer decision logic as the scalar path.
///
/// # Safety
/// Region 4-aligned and inside the plane; SSE4.1 available.
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn classify_region(p: &Plane, region: BlockRect, out: &mut [AlfClassification]) {
    debug_check_region(p, region);
    let pad = PaddedRegion::new(p, region);
    let stride = pad.stride;
    let bw = region.w / 4;
    debug_assert_eq!(out.len(), bw * (region.h / 4));
    let ones = _mm_set1_epi16(1);
    for by in 0..region.h / 4 {
        for bx in 0..bw {
            let mut accv = _mm_setzero_si128();
            let mut acch = _mm_setzero_si128();
            let mut accd0 = _mm_setzero_si128();
            let mut accd1 = _mm_setzero_si128();
            // 8x8 window centered on the block: rows/cols -2..6.
            let base = pad.at(bx * 4, by * 4).sub(2 * stride + 2);
            for wy in 0..8 {
                let row = base.add(wy * stride);
                let c = _mm_loadu_si128(row as *const __m128i);
                let c2 = _mm_add_epi16(c, c);
                let up = _mm_loadu_si128(row.sub(stride) as *const __m128i);
                let dn = _mm_loadu_si128(row.add(stride) as *const __m128i);
                let lf = _mm_loadu_si128(row.sub(1) as *const __m128i);
                let rt = _mm_loadu_si128(row.add(1) as *const __m128i);
                let ul = _mm_loadu_si128(row.sub(stride + 1) as *const __m128i);
                let ur = _mm_loadu_si128(row.sub(stride - 1) as *const __m128i);
                let dl = _mm_loadu_si128(row.add(stride - 1) as *const __m128i);
                let dr = _mm_loadu_si128(row.add(stride + 1) as *const __m128i);
                accv = _mm_add_epi16(
                    accv,
                    _mm_abs_epi16(_mm_sub_epi16(_mm_sub_epi16(c2, up), dn)),
                );
                acch = _mm_add_epi16(
                    acch,
                    _mm_abs_epi16(_mm_sub_epi16(_mm_sub_epi16(c2, lf), rt)),
                );
                accd0 = _mm_add_epi16(
                    accd0,
                    _mm_abs_epi16(_mm_sub_epi16(_mm_sub_epi16(c2, ul), dr)),
                );
                accd1 = _mm_add_epi16(
                    accd1,
                    _mm_abs_epi16(_mm_sub_epi16(_mm_sub_epi16(c2, ur), dl)),
                );
            }
            let gv = hsum_epi32(_mm_madd_epi16(accv, ones)) as u64;
            let gh = hsum_epi32(_mm_madd_epi16(acch, ones)) as u64;
            let gd0 = hsum_epi32(_mm_madd_epi16(accd0, ones)) as u64;
            let gd1 = hsum_epi32(_mm_madd_epi16(accd1, ones)) as u64;
            out[by * bw + bx] = resolve_class(gv, gh, gd0, gd1, p.depth());
        }
    }
}

/// Per-tap lane constants for a pair of adjacent blocks: low half carries
/// the left block's filter, high half the right's.
#[inline]
pub(super) fn pair_tap_vectors<const N: usize>(
    left: (&[i16; N], &[i16; N]),
    right: (&[i16; N], &[i16; N]),
) -> ([[i16; 8]; N], [[i16; 8]; N]) {
    let mut coeff = [[0i16; 8]; N];
    let mut clip = [[0i16; 8]; N];
    for i in 0..N {
        for l in 0..4 {
            coeff[i][l] = left.0[i];
            clip[i][l] = left.1[i];
            coeff[i][l + 4] = right.0[i];
            clip[i][l + 4] = right.1[i];
        }
    }
    (coeff, clip)
}

/// Filters one row of 8 samples spanning two adjacent 4x4 blocks.
///
/// # Safety
/// `cur_ptr` and tap offsets must stay inside the padded buffer; SSE4.1.
#[inline]
#[target_feature(enable = "sse4.1")]
pub(super) unsafe fn filter_row8_luma(
    pad: &PaddedRegion,
    x: usize,
    y: usize,
    coeff: &[[i16; 8]; ALF_LUMA_COEFFS],
    clip: &[[i16; 8]; ALF_LUMA_COEFFS],
    max: __m128i,
) -> __m128i {
    let stride = pad.stride as isize;
    let cur_ptr = pad.at(x, y);
    let cur = _mm_loadu_si128(cur_ptr as *const __m128i);
    let zero = _mm_setzero_si128();
    let mut acc_lo = _mm_set1_epi32(64);
    let mut acc_hi = _mm_set1_epi32(64);
    for i in 0..ALF_LUMA_COEFFS {
        let (dx, dy) = LUMA_OFFSETS[i];
        let off = dy as isize * stride + dx as isize;
        let p0 = _mm_loadu_si128(cur_ptr.offset(off) as *const __m128i);
        let p1 = _mm_loadu_si128(cur_ptr.offset(-off) as *const __m128i);
        let b = _mm_loadu_si128(clip[i].as_ptr() as *const __m128i);
        let nb = _mm_sub_epi16(zero, b);
        let d0 = _mm_min_epi16(_mm_max_epi16(_mm_sub_epi16(p0, cur), nb), b);
        let d1 = _mm_min_epi16(_mm_max_epi16(_mm_sub_epi16(p1, cur), nb), b);
        let s = _mm_add_epi16(d0, d1);
        let c = _mm_loadu_si128(coeff[i].as_ptr() as *const __m128i);
        let lo = _mm_mullo_epi16(s, c);
        let hi = _mm_mulhi_epi16(s, c);
        acc_lo = _mm_add_epi32(acc_lo, _mm_unpacklo_epi16(lo, hi));
        acc_hi = _mm_add_epi32(acc_hi, _mm_unpackhi_epi16(lo, hi));
    }
    let cur_lo = _mm_unpacklo_epi16(cur, zero);
    let cur_hi = _mm_unpackhi_epi16(cur, zero);
    let res_lo = _mm_add_epi32(_mm_srai_epi32(acc_lo, 7), cur_lo);
    let res_hi = _mm_add_epi32(_mm_srai_epi32(acc_hi, 7), cur_hi);
    let packed = _mm_packs_epi32(res_lo, res_hi);
    _mm_min_epi16(_mm_max_epi16(packed, zero), max)
}

/// Luma region filter over pairs of adjacent 4x4 blocks.
///
/// # Safety
/// Region 4-aligned and inside the plane; `filters` has one entry per 4x4
/// block; `out` holds `region.area()` samples; SSE4.1 available.
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn filter_region_luma(
    src: &Plane,
    region: BlockRect,
    filters: &[ResolvedLumaFilter],
    out: &mut [u16],
) {
    debug_check_region(src, region);
    let pad = PaddedRegion::new(src, region);
    let bw = region.w / 4;
    debug_assert_eq!(filters.len(), bw * (region.h / 4));
    let max = _mm_set1_epi16(src.max_value() as i16);
    for by in 0..region.h / 4 {
        let mut bx = 0usize;
        while bx < bw {
            let fl = &filters[by * bw + bx];
            let pair = bx + 1 < bw;
            let fr = if pair { &filters[by * bw + bx + 1] } else { fl };
            let (coeff, clip) = pair_tap_vectors((&fl.coeff, &fl.clip), (&fr.coeff, &fr.clip));
            for y in 0..4 {
                let row = by * 4 + y;
                let v = filter_row8_luma(&pad, bx * 4, row, &coeff, &clip, max);
                let dst = out.as_mut_ptr().add(row * region.w + bx * 4);
                if pair {
                    _mm_storeu_si128(dst as *mut __m128i, v);
                } else {
                    _mm_storel_epi64(dst as *mut __m128i, v);
                }
            }
            bx += 2;
        }
    }
}

/// Chroma region filter: one filter for the whole region, so the tap
/// constants hoist out of the sample loops entirely.
///
/// # Safety
/// As [`filter_region_luma`]; SSE4.1 available.
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn filter_region_chroma(
    src: &Plane,
    region: BlockRect,
    f: &ResolvedChromaFilter,
    out: &mut [u16],
) {
    debug_check_region(src, region);
    let pad = PaddedRegion::new(src, region);
    let stride = pad.stride as isize;
    let zero = _mm_setzero_si128();
    let max = _mm_set1_epi16(src.max_value() as i16);
    let mut coeff = [_mm_setzero_si128(); ALF_CHROMA_COEFFS];
    let mut bound = [_mm_setzero_si128(); ALF_CHROMA_COEFFS];
    for i in 0..ALF_CHROMA_COEFFS {
        coeff[i] = _mm_set1_epi16(f.coeff[i]);
        bound[i] = _mm_set1_epi16(f.clip[i]);
    }
    for y in 0..region.h {
        let mut x = 0usize;
        while x < region.w {
            let cur_ptr = pad.at(x, y);
            let cur = _mm_loadu_si128(cur_ptr as *const __m128i);
            let mut acc_lo = _mm_set1_epi32(64);
            let mut acc_hi = _mm_set1_epi32(64);
            for i in 0..ALF_CHROMA_COEFFS {
                let (dx, dy) = CHROMA_OFFSETS[i];
                let off = dy as isize * stride + dx as isize;
                let p0 = _mm_loadu_si128(cur_ptr.offset(off) as *const __m128i);
                let p1 = _mm_loadu_si128(cur_ptr.offset(-off) as *const __m128i);
                let b = bound[i];
                let nb = _mm_sub_epi16(zero, b);
                let d0 = _mm_min_epi16(_mm_max_epi16(_mm_sub_epi16(p0, cur), nb), b);
                let d1 = _mm_min_epi16(_mm_max_epi16(_mm_sub_epi16(p1, cur), nb), b);
                let s = _mm_add_epi16(d0, d1);
                let lo = _mm_mullo_epi16(s, coeff[i]);
                let hi = _mm_mulhi_epi16(s, coeff[i]);
                acc_lo = _mm_add_epi32(acc_lo, _mm_unpacklo_epi16(lo, hi));
                acc_hi = _mm_add_epi32(acc_hi, _mm_unpackhi_epi16(lo, hi));
            }
            let cur_lo = _mm_unpacklo_epi16(cur, zero);
            let cur_hi = _mm_unpackhi_epi16(cur, zero);
            let res_lo = _mm_add_epi32(_mm_srai_epi32(acc_lo, 7), cur_lo);
            let res_hi = _mm_add_epi32(_mm_srai_epi32(acc_hi, 7), cur_hi);
            let packed = _mm_min_epi16(_mm_max_epi16(_mm_packs_epi32(res_lo, res_hi), zero), max);
            let dst = out.as_mut_ptr().add(y * region.w + x);
            if x + 8 <= region.w {
                _mm_storeu_si128(dst as *mut __m128i, packed);
            } else {
                _mm_storel_epi64(dst as *mut __m128i, packed);
            }
            x += 8;
        }
    }
}
