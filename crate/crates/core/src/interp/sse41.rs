//! 128-bit interpolation kernels.
//!
//! Same window extraction and tap trimming as the specialized scalar path;
//! rows are processed in groups of 8 lanes, then 4, then scalar. All
//! arithmetic is exact integer math, so results are bit-identical to the
//! scalar reference.

use std::arch::x86_64::*;

use crate::frame::{extract_window_i16, BlockRect, Plane};

use super::scalar;
use super::{
    bilinear_row, coeff_window, ChromaFilterTable, FracPos, LumaFilterTable, BILINEAR_TAP_ANCHOR,
    CHROMA_TAP_ANCHOR, LUMA_TAP_ANCHOR,
};

/// Multiply-accumulate 8 lanes of i16 against scalar taps spaced `step`
/// apart, widening to two i32x4 accumulators.
#[inline]
#[target_feature(enable = "sse4.1")]
unsafe fn conv8(ptr: *const i16, step: usize, coeffs: &[i16]) -> (__m128i, __m128i) {
    let mut acc_lo = _mm_setzero_si128();
    let mut acc_hi = _mm_setzero_si128();
    for (i, &c) in coeffs.iter().enumerate() {
        let v = _mm_loadu_si128(ptr.add(i * step) as *const __m128i);
        let cv = _mm_set1_epi16(c);
        let lo = _mm_mullo_epi16(v, cv);
        let hi = _mm_mulhi_epi16(v, cv);
        acc_lo = _mm_add_epi32(acc_lo, _mm_unpacklo_epi16(lo, hi));
        acc_hi = _mm_add_epi32(acc_hi, _mm_unpackhi_epi16(lo, hi));
    }
    (acc_lo, acc_hi)
}

/// 4-lane variant of [`conv8`]; only the low accumulator is meaningful.
#[inline]
#[target_feature(enable = "sse4.1")]
unsafe fn conv4(ptr: *const i16, step: usize, coeffs: &[i16]) -> __m128i {
    let mut acc = _mm_setzero_si128();
    for (i, &c) in coeffs.iter().enumerate() {
        let v = _mm_loadl_epi64(ptr.add(i * step) as *const __m128i);
        let cv = _mm_set1_epi16(c);
        let lo = _mm_mullo_epi16(v, cv);
        let hi = _mm_mulhi_epi16(v, cv);
        acc = _mm_add_epi32(acc, _mm_unpacklo_epi16(lo, hi));
    }
    acc
}

/// Filters one row into 16-bit intermediates: `out[x] = conv(x) >> s1`.
///
/// # Safety
/// `src` must be readable at `x + i * step` for `x < w + 3` lane slack and
/// every tap index `i`; callers guarantee this via window sizing.
#[target_feature(enable = "sse4.1")]
pub(super) unsafe fn row_to_i16(
    src: *const i16,
    step: usize,
    coeffs: &[i16],
    out: *mut i16,
    w: usize,
    s1: i32,
) {
    let sh = _mm_cvtsi32_si128(s1);
    let mut x = 0usize;
    while x + 8 <= w {
        let (lo, hi) = conv8(src.add(x), step, coeffs);
        let packed = _mm_packs_epi32(_mm_sra_epi32(lo, sh), _mm_sra_epi32(hi, sh));
        _mm_storeu_si128(out.add(x) as *mut __m128i, packed);
        x += 8;
    }
    if x + 4 <= w {
        let lo = conv4(src.add(x), step, coeffs);
        let packed = _mm_packs_epi32(_mm_sra_epi32(lo, sh), _mm_setzero_si128());
        _mm_storel_epi64(out.add(x) as *mut __m128i, packed);
        x += 4;
    }
    if x < w {
        let rem = w - x;
        if step == 1 {
            let win = std::slice::from_raw_parts(src.add(x), rem + coeffs.len() - 1);
            let dst = std::slice::from_raw_parts_mut(out.add(x), rem);
            scalar::hrow_to_i16(win, coeffs, dst, s1 as u32);
        } else {
            for k in 0..rem {
                let mut acc = 0i32;
                for (i, &c) in coeffs.iter().enumerate() {
                    acc += c as i32 * *src.add(x + k + i * step) as i32;
                }
                *out.add(x + k) = (acc >> s1) as i16;
            }
        }
    }
}

/// Filters one row to final samples:
/// `out[x] = clamp((conv(x) + offset) >> shift, 0, max)`.
///
/// # Safety
/// As [`row_to_i16`].
#[target_feature(enable = "sse4.1")]
pub(super) unsafe fn row_to_u16(
    src: *const i16,
    step: usize,
    coeffs: &[i16],
    out: *mut u16,
    w: usize,
    offset: i32,
    shift: i32,
    max: i32,
) {
    let sh = _mm_cvtsi32_si128(shift);
    let off = _mm_set1_epi32(offset);
    let zero = _mm_setzero_si128();
    let maxv = _mm_set1_epi16(max as i16);
    let mut x = 0usize;
    while x + 8 <= w {
        let (lo, hi) = conv8(src.add(x), step, coeffs);
        let lo = _mm_sra_epi32(_mm_add_epi32(lo, off), sh);
        let hi = _mm_sra_epi32(_mm_add_epi32(hi, off), sh);
        let packed = _mm_min_epi16(_mm_max_epi16(_mm_packs_epi32(lo, hi), zero), maxv);
        _mm_storeu_si128(out.add(x) as *mut __m128i, packed);
        x += 8;
    }
    if x + 4 <= w {
        let lo = conv4(src.add(x), step, coeffs);
        let lo = _mm_sra_epi32(_mm_add_epi32(lo, off), sh);
        let packed = _mm_min_epi16(_mm_max_epi16(_mm_packs_epi32(lo, zero), zero), maxv);
        _mm_storel_epi64(out.add(x) as *mut __m128i, packed);
        x += 4;
    }
    if x < w {
        let rem = w - x;
        let span = (coeffs.len() - 1) * step + rem;
        let win = std::slice::from_raw_parts(src.add(x), span);
        let dst = std::slice::from_raw_parts_mut(out.add(x), rem);
        if step == 1 {
            scalar::hrow_to_u16(win, coeffs, dst, offset, shift as u32, max);
        } else {
            scalar::vrow_to_u16(win, step, coeffs, dst, offset, shift as u32, max);
        }
    }
}

/// Shared separable driver: extract window, trim taps, run vector rows.
///
/// # Safety
/// Caller must have validated the block against the plane and `dst` length,
/// and ensured SSE4.1 is available.
#[target_feature(enable = "sse4.1")]
unsafe fn driver(
    src: &Plane,
    block: BlockRect,
    row_h: Option<&[i16]>,
    row_v: Option<&[i16]>,
    anchor: isize,
    dst: &mut [u16],
) {
    let max = src.max_value() as i32;
    let s1 = src.depth().bits() as i32 - 8;
    let (bx, by) = (block.x as isize, block.y as isize);
    let w = block.w;
    match (row_h, row_v) {
        (None, None) => {
            for y in 0..block.h {
                let row = &src.row(block.y + y)[block.x..block.x + w];
                dst[y * w..(y + 1) * w].copy_from_slice(row);
            }
        }
        (Some(h), None) => {
            let (start, len) = coeff_window(h);
            let coeffs = &h[start..start + len];
            let ww = w + len - 1;
            let win = extract_window_i16(src, bx + anchor + start as isize, by, ww, block.h);
            for y in 0..block.h {
                row_to_u16(
                    win.as_ptr().add(y * ww),
                    1,
                    coeffs,
                    dst.as_mut_ptr().add(y * w),
                    w,
                    32,
                    6,
                    max,
                );
            }
        }
        (None, Some(v)) => {
            let (start, len) = coeff_window(v);
            let coeffs = &v[start..start + len];
            let wh = block.h + len - 1;
            let win = extract_window_i16(src, bx, by + anchor + start as isize, w, wh);
            for y in 0..block.h {
                row_to_u16(
                    win.as_ptr().add(y * w),
                    w,
                    coeffs,
                    dst.as_mut_ptr().add(y * w),
                    w,
                    32,
                    6,
                    max,
                );
            }
        }
        (Some(h), Some(v)) => {
            let (hs, hl) = coeff_window(h);
            let (vs, vl) = coeff_window(v);
            let hc = &h[hs..hs + hl];
            let vc = &v[vs..vs + vl];
            let ww = w + hl - 1;
            let wh = block.h + vl - 1;
            let win = extract_window_i16(
                src,
                bx + anchor + hs as isize,
                by + anchor + vs as isize,
                ww,
                wh,
            );
            let mut inter = vec![0i16; wh * w];
            for r in 0..wh {
                row_to_i16(
                    win.as_ptr().add(r * ww),
                    1,
                    hc,
                    inter.as_mut_ptr().add(r * w),
                    w,
                    s1,
                );
            }
            let offset = 1i32 << (11 - s1);
            let shift = 12 - s1;
            for y in 0..block.h {
                row_to_u16(
                    inter.as_ptr().add(y * w),
                    w,
                    vc,
                    dst.as_mut_ptr().add(y * w),
                    w,
                    offset,
                    shift,
                    max,
                );
            }
        }
    }
}

/// # Safety
/// Block/dst validated by the caller; SSE4.1 available.
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn interp_luma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &LumaFilterTable,
    dst: &mut [u16],
) {
    let row_h = (frac.fx != 0).then(|| &table.row(frac.fx, frac.hpel_alt)[..]);
    let row_v = (frac.fy != 0).then(|| &table.row(frac.fy, frac.hpel_alt)[..]);
    driver(src, block, row_h, row_v, LUMA_TAP_ANCHOR, dst);
}

/// # Safety
/// As [`interp_luma`].
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn interp_chroma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &ChromaFilterTable,
    dst: &mut [u16],
) {
    let row_h = (frac.fx != 0).then(|| &table.row(frac.fx)[..]);
    let row_v = (frac.fy != 0).then(|| &table.row(frac.fy)[..]);
    driver(src, block, row_h, row_v, CHROMA_TAP_ANCHOR, dst);
}

/// # Safety
/// As [`interp_luma`].
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn interp_bilinear(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    dst: &mut [u16],
) {
    let rh = bilinear_row(frac.fx);
    let rv = bilinear_row(frac.fy);
    let row_h = (frac.fx != 0).then_some(&rh[..]);
    let row_v = (frac.fy != 0).then_some(&rv[..]);
    driver(src, block, row_h, row_v, BILINEAR_TAP_ANCHOR, dst);
}
