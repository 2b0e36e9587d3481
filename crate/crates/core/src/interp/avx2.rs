//! 256-bit interpolation kernels. 16-lane row groups; remainders fall
//! through to the 128-bit helpers, which share the exact integer math.

use std::arch::x86_64::*;

use crate::frame::{extract_window_i16, BlockRect, Plane};

use super::sse41;
use super::{
    bilinear_row, coeff_window, ChromaFilterTable, FracPos, LumaFilterTable, BILINEAR_TAP_ANCHOR,
    CHROMA_TAP_ANCHOR, LUMA_TAP_ANCHOR,
};

/// Multiply-accumulate 16 lanes of i16 against scalar taps spaced `step`
/// apart. The unpack/pack pairing below keeps lane order consistent because
/// both operate per 128-bit half.
#[inline]
#[target_feature(enable = "avx2")]
unsafe fn conv16(ptr: *const i16, step: usize, coeffs: &[i16]) -> (__m256i, __m256i) {
    let mut acc_lo = _mm256_setzero_si256();
    let mut acc_hi = _mm256_setzero_si256();
    for (i, &c) in coeffs.iter().enumerate() {
        let v = _mm256_loadu_si256(ptr.add(i * step) as *const __m256i);
        let cv = _mm256_set1_epi16(c);
        let lo = _mm256_mullo_epi16(v, cv);
        let hi = _mm256_mulhi_epi16(v, cv);
        acc_lo = _mm256_add_epi32(acc_lo, _mm256_unpacklo_epi16(lo, hi));
        acc_hi = _mm256_add_epi32(acc_hi, _mm256_unpackhi_epi16(lo, hi));
    }
    (acc_lo, acc_hi)
}

/// # Safety
/// As the 128-bit variant; additionally requires AVX2.
#[target_feature(enable = "avx2")]
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
    while x + 16 <= w {
        let (lo, hi) = conv16(src.add(x), step, coeffs);
        let packed = _mm256_packs_epi32(_mm256_sra_epi32(lo, sh), _mm256_sra_epi32(hi, sh));
        _mm256_storeu_si256(out.add(x) as *mut __m256i, packed);
        x += 16;
    }
    if x < w {
        sse41::row_to_i16(src.add(x), step, coeffs, out.add(x), w - x, s1);
    }
}

/// # Safety
/// As the 128-bit variant; additionally requires AVX2.
#[target_feature(enable = "avx2")]
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
    let off = _mm256_set1_epi32(offset);
    let zero = _mm256_setzero_si256();
    let maxv = _mm256_set1_epi16(max as i16);
    let mut x = 0usize;
    while x + 16 <= w {
        let (lo, hi) = conv16(src.add(x), step, coeffs);
        let lo = _mm256_sra_epi32(_mm256_add_epi32(lo, off), sh);
        let hi = _mm256_sra_epi32(_mm256_add_epi32(hi, off), sh);
        let packed = _mm256_min_epi16(_mm256_max_epi16(_mm256_packs_epi32(lo, hi), zero), maxv);
        _mm256_storeu_si256(out.add(x) as *mut __m256i, packed);
        x += 16;
    }
    if x < w {
        sse41::row_to_u16(
            src.add(x),
            step,
            coeffs,
            out.add(x),
            w - x,
            offset,
            shift,
            max,
        );
    }
}

/// # Safety
/// Caller must have validated the block against the plane and `dst` length,
/// and ensured AVX2 is available.
#[target_feature(enable = "avx2")]
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
/// Block/dst validated by the caller; AVX2 available.
#[target_feature(enable = "avx2")]
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
#[target_feature(enable = "avx2")]
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
#[target_feature(enable = "avx2")]
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
