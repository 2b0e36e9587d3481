//! 256-bit ALF filter kernels: four adjacent 4x4 blocks per step for luma,
//! 16-lane rows for chroma. Leftover block pairs fall back to the 128-bit
//! row helper, which shares the exact integer math.

use std::arch::x86_64::*;

use crate::frame::{BlockRect, Plane};

use super::sse41::{filter_row8_luma, pair_tap_vectors, PaddedRegion};
use super::{
    debug_check_region, ResolvedChromaFilter, ResolvedLumaFilter, ALF_CHROMA_COEFFS,
    ALF_LUMA_COEFFS, CHROMA_OFFSETS, LUMA_OFFSETS,
};

/// Per-tap lane constants for four adjacent blocks (4 lanes each).
#[inline]
fn quad_tap_vectors(
    filters: [&ResolvedLumaFilter; 4],
) -> ([[i16; 16]; ALF_LUMA_COEFFS], [[i16; 16]; ALF_LUMA_COEFFS]) {
    let mut coeff = [[0i16; 16]; ALF_LUMA_COEFFS];
    let mut clip = [[0i16; 16]; ALF_LUMA_COEFFS];
    for i in 0..ALF_LUMA_COEFFS {
        for (b, f) in filters.iter().enumerate() {
            for l in 0..4 {
                coeff[i][b * 4 + l] = f.coeff[i];
                clip[i][b * 4 + l] = f.clip[i];
            }
        }
    }
    (coeff, clip)
}

/// Filters one row of 16 samples spanning four adjacent 4x4 blocks.
///
/// # Safety
/// Tap offsets must stay inside the padded buffer; AVX2 available.
#[inline]
#[target_feature(enable = "avx2")]
unsafe fn filter_row16_luma(
    pad: &PaddedRegion,
    x: usize,
    y: usize,
    coeff: &[[i16; 16]; ALF_LUMA_COEFFS],
    clip: &[[i16; 16]; ALF_LUMA_COEFFS],
    max: __m256i,
) -> __m256i {
    let stride = pad.stride as isize;
    let cur_ptr = pad.at(x, y);
    let cur = _mm256_loadu_si256(cur_ptr as *const __m256i);
    let zero = _mm256_setzero_si256();
    let mut acc_lo = _mm256_set1_epi32(64);
    let mut acc_hi = _mm256_set1_epi32(64);
    for i in 0..ALF_LUMA_COEFFS {
        let (dx, dy) = LUMA_OFFSETS[i];
        let off = dy as isize * stride + dx as isize;
        let p0 = _mm256_loadu_si256(cur_ptr.offset(off) as *const __m256i);
        let p1 = _mm256_loadu_si256(cur_ptr.offset(-off) as *const __m256i);
        let b = _mm256_loadu_si256(clip[i].as_ptr() as *const __m256i);
        let nb = _mm256_sub_epi16(zero, b);
        let d0 = _mm256_min_epi16(_mm256_max_epi16(_mm256_sub_epi16(p0, cur), nb), b);
        let d1 = _mm256_min_epi16(_mm256_max_epi16(_mm256_sub_epi16(p1, cur), nb), b);
        let s = _mm256_add_epi16(d0, d1);
        let c = _mm256_loadu_si256(coeff[i].as_ptr() as *const __m256i);
        let lo = _mm256_mullo_epi16(s, c);
        let hi = _mm256_mulhi_epi16(s, c);
        acc_lo = _mm256_add_epi32(acc_lo, _mm256_unpacklo_epi16(lo, hi));
        acc_hi = _mm256_add_epi32(acc_hi, _mm256_unpackhi_epi16(lo, hi));
    }
    let cur_lo = _mm256_unpacklo_epi16(cur, zero);
    let cur_hi = _mm256_unpackhi_epi16(cur, zero);
    let res_lo = _mm256_add_epi32(_mm256_srai_epi32(acc_lo, 7), cur_lo);
    let res_hi = _mm256_add_epi32(_mm256_srai_epi32(acc_hi, 7), cur_hi);
    let packed = _mm256_packs_epi32(res_lo, res_hi);
    _mm256_min_epi16(_mm256_max_epi16(packed, zero), max)
}

/// Luma region filter over quads of adjacent 4x4 blocks.
///
/// # Safety
/// Region 4-aligned and inside the plane; `filters` has one entry per 4x4
/// block; `out` holds `region.area()` samples; AVX2 available.
#[target_feature(enable = "avx2")]
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
    let max256 = _mm256_set1_epi16(src.max_value() as i16);
    let max128 = _mm_set1_epi16(src.max_value() as i16);
    for by in 0..region.h / 4 {
        let mut bx = 0usize;
        while bx + 4 <= bw {
            let row_f = &filters[by * bw + bx..];
            let (coeff, clip) = quad_tap_vectors([&row_f[0], &row_f[1], &row_f[2], &row_f[3]]);
            for y in 0..4 {
                let row = by * 4 + y;
                let v = filter_row16_luma(&pad, bx * 4, row, &coeff, &clip, max256);
                _mm256_storeu_si256(
                    out.as_mut_ptr().add(row * region.w + bx * 4) as *mut __m256i,
                    v,
                );
            }
            bx += 4;
        }
        while bx < bw {
            let fl = &filters[by * bw + bx];
            let pair = bx + 1 < bw;
            let fr = if pair { &filters[by * bw + bx + 1] } else { fl };
            let (coeff, clip) = pair_tap_vectors((&fl.coeff, &fl.clip), (&fr.coeff, &fr.clip));
            for y in 0..4 {
                let row = by * 4 + y;
                let v = filter_row8_luma(&pad, bx * 4, row, &coeff, &clip, max128);
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

/// Chroma region filter with 16-lane rows.
///
/// # Safety
/// As [`filter_region_luma`]; AVX2 available.
#[target_feature(enable = "avx2")]
pub(crate) unsafe fn filter_region_chroma(
    src: &Plane,
    region: BlockRect,
    f: &ResolvedChromaFilter,
    out: &mut [u16],
) {
    debug_check_region(src, region);
    let pad = PaddedRegion::new(src, region);
    let stride = pad.stride as isize;
    let zero = _mm256_setzero_si256();
    let max = _mm256_set1_epi16(src.max_value() as i16);
    let mut coeff = [_mm256_setzero_si256(); ALF_CHROMA_COEFFS];
    let mut bound = [_mm256_setzero_si256(); ALF_CHROMA_COEFFS];
    for i in 0..ALF_CHROMA_COEFFS {
        coeff[i] = _mm256_set1_epi16(f.coeff[i]);
        bound[i] = _mm256_set1_epi16(f.clip[i]);
    }
    for y in 0..region.h {
        let mut x = 0usize;
        while x < region.w {
            let cur_ptr = pad.at(x, y);
            let cur = _mm256_loadu_si256(cur_ptr as *const __m256i);
            let mut acc_lo = _mm256_set1_epi32(64);
            let mut acc_hi = _mm256_set1_epi32(64);
            for i in 0..ALF_CHROMA_COEFFS {
                let (dx, dy) = CHROMA_OFFSETS[i];
                let off = dy as isize * stride + dx as isize;
                let p0 = _mm256_loadu_si256(cur_ptr.offset(off) as *const __m256i);
                let p1 = _mm256_loadu_si256(cur_ptr.offset(-off) as *const __m256i);
                let b = bound[i];
                let nb = _mm256_sub_epi16(zero, b);
                let d0 = _mm256_min_epi16(_mm256_max_epi16(_mm256_sub_epi16(p0, cur), nb), b);
                let d1 = _mm256_min_epi16(_mm256_max_epi16(_mm256_sub_epi16(p1, cur), nb), b);
                let s = _mm256_add_epi16(d0, d1);
                let lo = _mm256_mullo_epi16(s, coeff[i]);
                let hi = _mm256_mulhi_epi16(s, coeff[i]);
                acc_lo = _mm256_add_epi32(acc_lo, _mm256_unpacklo_epi16(lo, hi));
                acc_hi = _mm256_add_epi32(acc_hi, _mm256_unpackhi_epi16(lo, hi));
            }
            let cur_lo = _mm256_unpacklo_epi16(cur, zero);
            let cur_hi = _mm256_unpackhi_epi16(cur, zero);
            let res_lo = _mm256_add_epi32(_mm256_srai_epi32(acc_lo, 7), cur_lo);
            let res_hi = _mm256_add_epi32(_mm256_srai_epi32(acc_hi, 7), cur_hi);
            let packed = _mm256_min_epi16(
                _mm256_max_epi16(_mm256_packs_epi32(res_lo, res_hi), zero),
                max,
            );
            let dst = out.as_mut_ptr().add(y * region.w + x);
            let rem = region.w - x;
            if rem >= 16 {
                _mm256_storeu_si256(dst as *mut __m256i, packed);
            } else {
                // All 16 lanes are valid; store only the in-region ones
                // (rem is a multiple of 4).
                let lo = _mm256_castsi256_si128(packed);
                if rem >= 8 {
                    _mm_storeu_si128(dst as *mut __m128i, lo);
                    if rem >= 12 {
                        let hi = _mm256_extracti128_si256::<1>(packed);
                        _mm_storel_epi64(dst.add(8) as *mut __m128i, hi);
                    }
                } else {
                    _mm_storel_epi64(dst as *mut __m128i, lo);
                }
            }
            x += 16;
        }
    }
}
