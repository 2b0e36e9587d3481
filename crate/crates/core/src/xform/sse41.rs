//! 128-bit inverse transform. Both passes are broadcast-times-row
//! multiply-accumulates over 8 (or 4) lanes; the saturating i32 -> i16 pack
//! reproduces the scalar 16-bit clips exactly.

use std::arch::x86_64::*;

use crate::frame::BitDepth;

use super::{basis_matrix, BasisMatrix, CoeffBlock, XformKind, COL_SHIFT, ROW_SHIFT_BASE};

/// One output chunk of 8 lanes: `sum_k scale_k * data[k * stride + x0..+8]`,
/// then `(acc + offset) >> shift`, packed with i16 saturation.
///
/// # Safety
/// `data` must be readable for all `k < n` at `x0..x0 + 8`; SSE4.1.
#[inline]
#[target_feature(enable = "sse4.1")]
unsafe fn mac8(
    data: *const i16,
    stride: usize,
    scales: &[i16],
    offset: i32,
    shift: i32,
) -> __m128i {
    let mut acc_lo = _mm_set1_epi32(offset);
    let mut acc_hi = _mm_set1_epi32(offset);
    for (k, &s) in scales.iter().enumerate() {
        let v = _mm_loadu_si128(data.add(k * stride) as *const __m128i);
        let sv = _mm_set1_epi16(s);
        let lo = _mm_mullo_epi16(v, sv);
        let hi = _mm_mulhi_epi16(v, sv);
        acc_lo = _mm_add_epi32(acc_lo, _mm_unpacklo_epi16(lo, hi));
        acc_hi = _mm_add_epi32(acc_hi, _mm_unpackhi_epi16(lo, hi));
    }
    let sh = _mm_cvtsi32_si128(shift);
    _mm_packs_epi32(_mm_sra_epi32(acc_lo, sh), _mm_sra_epi32(acc_hi, sh))
}

/// 4-lane variant; only the low half of the result is meaningful.
///
/// # Safety
/// As [`mac8`] with 4-lane reads.
#[inline]
#[target_feature(enable = "sse4.1")]
unsafe fn mac4(
    data: *const i16,
    stride: usize,
    scales: &[i16],
    offset: i32,
    shift: i32,
) -> __m128i {
    let mut acc = _mm_set1_epi32(offset);
    for (k, &s) in scales.iter().enumerate() {
        let v = _mm_loadl_epi64(data.add(k * stride) as *const __m128i);
        let sv = _mm_set1_epi16(s);
        let lo = _mm_mullo_epi16(v, sv);
        let hi = _mm_mulhi_epi16(v, sv);
        acc = _mm_add_epi32(acc, _mm_unpacklo_epi16(lo, hi));
    }
    let sh = _mm_cvtsi32_si128(shift);
    _mm_packs_epi32(_mm_sra_epi32(acc, sh), _mm_setzero_si128())
}

/// Column pass: `tmp[m][x] = clip16((sum_k Bv[k][m] * c[k][x] + 64) >> 7)`,
/// vectorized over x.
///
/// # Safety
/// Buffers sized `w * h`; SSE4.1.
#[target_feature(enable = "sse4.1")]
unsafe fn column_pass(levels: &[i16], w: usize, h: usize, bv: &BasisMatrix, tmp: &mut [i16]) {
    let mut col = vec![0i16; h];
    for m in 0..h {
        for (k, c) in col.iter_mut().enumerate() {
            *c = bv.entry(k, m);
        }
        let mut x = 0usize;
        while x + 8 <= w {
            let v = mac8(
                levels.as_ptr().add(x),
                w,
                &col,
                1 << (COL_SHIFT - 1),
                COL_SHIFT,
            );
            _mm_storeu_si128(tmp.as_mut_ptr().add(m * w + x) as *mut __m128i, v);
            x += 8;
        }
        if x < w {
            // Supported widths are 4 or multiples of 8.
            let v = mac4(
                levels.as_ptr().add(x),
                w,
                &col,
                1 << (COL_SHIFT - 1),
                COL_SHIFT,
            );
            _mm_storel_epi64(tmp.as_mut_ptr().add(m * w + x) as *mut __m128i, v);
        }
    }
}

/// Row pass: `out[y][m] = clip16((sum_k Bh[k][m] * tmp[y][k] + off) >> sh)`,
/// vectorized over m by broadcasting `tmp[y][k]` against basis rows.
///
/// # Safety
/// Buffers sized `w * h`; SSE4.1.
#[target_feature(enable = "sse4.1")]
unsafe fn row_pass(
    tmp: &[i16],
    w: usize,
    h: usize,
    bh: &BasisMatrix,
    offset: i32,
    shift: i32,
    out: &mut [i16],
) {
    let sh = _mm_cvtsi32_si128(shift);
    for y in 0..h {
        let row = &tmp[y * w..(y + 1) * w];
        let mut m = 0usize;
        while m + 8 <= w {
            let mut acc_lo = _mm_set1_epi32(offset);
            let mut acc_hi = _mm_set1_epi32(offset);
            for (k, &t) in row.iter().enumerate() {
                let b = _mm_loadu_si128(bh.row(k).as_ptr().add(m) as *const __m128i);
                let tv = _mm_set1_epi16(t);
                let lo = _mm_mullo_epi16(b, tv);
                let hi = _mm_mulhi_epi16(b, tv);
                acc_lo = _mm_add_epi32(acc_lo, _mm_unpacklo_epi16(lo, hi));
                acc_hi = _mm_add_epi32(acc_hi, _mm_unpackhi_epi16(lo, hi));
            }
            let v = _mm_packs_epi32(_mm_sra_epi32(acc_lo, sh), _mm_sra_epi32(acc_hi, sh));
            _mm_storeu_si128(out.as_mut_ptr().add(y * w + m) as *mut __m128i, v);
            m += 8;
        }
        if m < w {
            let mut acc = _mm_set1_epi32(offset);
            for (k, &t) in row.iter().enumerate() {
                let b = _mm_loadl_epi64(bh.row(k).as_ptr().add(m) as *const __m128i);
                let tv = _mm_set1_epi16(t);
                let lo = _mm_mullo_epi16(b, tv);
                let hi = _mm_mulhi_epi16(b, tv);
                acc = _mm_add_epi32(acc, _mm_unpacklo_epi16(lo, hi));
            }
            let v = _mm_packs_epi32(_mm_sra_epi32(acc, sh), _mm_setzero_si128());
            _mm_storel_epi64(out.as_mut_ptr().add(y * w + m) as *mut __m128i, v);
        }
    }
}

/// # Safety
/// `coeffs` validated against the kinds; `out` sized `w * h`; SSE4.1.
#[target_feature(enable = "sse4.1")]
pub(crate) unsafe fn inv_transform_2d(
    coeffs: &CoeffBlock,
    kind_h: XformKind,
    kind_v: XformKind,
    depth: BitDepth,
    out: &mut [i16],
) {
    let (w, h) = (coeffs.w, coeffs.h);
    let bv = basis_matrix(kind_v, h).expect("validated by caller");
    let bh = basis_matrix(kind_h, w).expect("validated by caller");
    let mut tmp = vec![0i16; w * h];
    column_pass(&coeffs.levels, w, h, bv, &mut tmp);
    let shift = ROW_SHIFT_BASE - depth.bits() as i32;
    row_pass(&tmp, w, h, bh, 1 << (shift - 1), shift, out);
}
