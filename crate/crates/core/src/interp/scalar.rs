//! Scalar interpolation: the naive full-tap reference every other variant
//! is verified against, plus the window-based specialized engine shared
//! with the vector kernels for their tail cases.

use crate::frame::{extract_window_i16, BlockRect, Plane};

use super::{
    bilinear_row, coeff_window, ChromaFilterTable, FracPos, LumaFilterTable, BILINEAR_TAP_ANCHOR,
    CHROMA_TAP_ANCHOR, LUMA_TAP_ANCHOR,
};

pub(crate) fn interp_luma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &LumaFilterTable,
    dst: &mut [u16],
) {
    let row_h = (frac.fx != 0).then(|| &table.row(frac.fx, frac.hpel_alt)[..]);
    let row_v = (frac.fy != 0).then(|| &table.row(frac.fy, frac.hpel_alt)[..]);
    separable_reference(src, block, row_h, row_v, LUMA_TAP_ANCHOR, dst);
}

pub(crate) fn interp_chroma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &ChromaFilterTable,
    dst: &mut [u16],
) {
    let row_h = (frac.fx != 0).then(|| &table.row(frac.fx)[..]);
    let row_v = (frac.fy != 0).then(|| &table.row(frac.fy)[..]);
    separable_reference(src, block, row_h, row_v, CHROMA_TAP_ANCHOR, dst);
}

pub(crate) fn interp_bilinear(src: &Plane, block: BlockRect, frac: FracPos, dst: &mut [u16]) {
    let rh = bilinear_row(frac.fx);
    let rv = bilinear_row(frac.fy);
    let row_h = (frac.fx != 0).then_some(&rh[..]);
    let row_v = (frac.fy != 0).then_some(&rv[..]);
    separable_reference(src, block, row_h, row_v, BILINEAR_TAP_ANCHOR, dst);
}

/// Naive two-pass evaluation straight from the precision contract. Every
/// tap is applied, zero coefficients included, through edge-replicating
/// reads. Deliberately unoptimized; this is the bit-exactness baseline.
fn separable_reference(
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
    match (row_h, row_v) {
        (None, None) => {
            for y in 0..block.h {
                for x in 0..block.w {
                    dst[y * block.w + x] = src.get(block.x + x, block.y + y);
                }
            }
        }
        (Some(h), None) => {
            for y in 0..block.h {
                for x in 0..block.w {
                    let mut acc = 0i32;
                    for (i, &c) in h.iter().enumerate() {
                        acc += c as i32
                            * src.read_clamped(
                                bx + x as isize + anchor + i as isize,
                                by + y as isize,
                            ) as i32;
                    }
                    dst[y * block.w + x] = ((acc + 32) >> 6).clamp(0, max) as u16;
                }
            }
        }
        (None, Some(v)) => {
            for y in 0..block.h {
                for x in 0..block.w {
                    let mut acc = 0i32;
                    for (j, &c) in v.iter().enumerate() {
                        acc += c as i32
                            * src.read_clamped(
                                bx + x as isize,
                                by + y as isize + anchor + j as isize,
                            ) as i32;
                    }
                    dst[y * block.w + x] = ((acc + 32) >> 6).clamp(0, max) as u16;
                }
            }
        }
        (Some(h), Some(v)) => {
            let taps_v = v.len();
            let rows = block.h + taps_v - 1;
            let mut inter = vec![0i16; rows * block.w];
            for r in 0..rows {
                let sy = by + r as isize + anchor;
                for x in 0..block.w {
                    let mut acc = 0i32;
                    for (i, &c) in h.iter().enumerate() {
                        acc += c as i32
                            * src.read_clamped(bx + x as isize + anchor + i as isize, sy) as i32;
                    }
                    let val = acc >> s1;
                    debug_assert!(val >= i16::MIN as i32 && val <= i16::MAX as i32);
                    inter[r * block.w + x] = val as i16;
                }
            }
            let offset = 1i32 << (11 - s1);
            let shift = 12 - s1;
            for y in 0..block.h {
                for x in 0..block.w {
                    let mut acc = 0i32;
                    for (j, &c) in v.iter().enumerate() {
                        acc += c as i32 * inter[(y + j) * block.w + x] as i32;
                    }
                    dst[y * block.w + x] = ((acc + offset) >> shift).clamp(0, max) as u16;
                }
            }
        }
    }
}

/// One horizontal filtering row into 16-bit intermediates:
/// `out[x] = (sum_i coeffs[i] * win[x + i]) >> s1`.
#[inline]
pub(crate) fn hrow_to_i16(win: &[i16], coeffs: &[i16], out: &mut [i16], s1: u32) {
    for (x, o) in out.iter_mut().enumerate() {
        let mut acc = 0i32;
        for (i, &c) in coeffs.iter().enumerate() {
            acc += c as i32 * win[x + i] as i32;
        }
        *o = (acc >> s1) as i16;
    }
}

/// One horizontal filtering row straight to output samples.
#[inline]
pub(crate) fn hrow_to_u16(
    win: &[i16],
    coeffs: &[i16],
    out: &mut [u16],
    offset: i32,
    shift: u32,
    max: i32,
) {
    for (x, o) in out.iter_mut().enumerate() {
        let mut acc = 0i32;
        for (i, &c) in coeffs.iter().enumerate() {
            acc += c as i32 * win[x + i] as i32;
        }
        *o = ((acc + offset) >> shift).clamp(0, max) as u16;
    }
}

/// One vertical filtering row: taps step by `stride` through `buf`.
#[inline]
pub(crate) fn vrow_to_u16(
    buf: &[i16],
    stride: usize,
    coeffs: &[i16],
    out: &mut [u16],
    offset: i32,
    shift: u32,
    max: i32,
) {
    for (x, o) in out.iter_mut().enumerate() {
        let mut acc = 0i32;
        for (j, &c) in coeffs.iter().enumerate() {
            acc += c as i32 * buf[j * stride + x] as i32;
        }
        *o = ((acc + offset) >> shift).clamp(0, max) as u16;
    }
}

/// Specialized scalar evaluation: extracts the reference window once and
/// applies only the nonzero coefficient span of each row. Bit-exact with
/// the naive reference because trimmed taps are all zero.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn interp_windowed(
    src: &Plane,
    block: BlockRect,
    row_h: Option<&[i16]>,
    row_v: Option<&[i16]>,
    anchor: isize,
    dst: &mut [u16],
) {
    let max = src.max_value() as i32;
    let s1 = src.depth().bits() - 8;
    let (bx, by) = (block.x as isize, block.y as isize);
    match (row_h, row_v) {
        (None, None) => {
            for y in 0..block.h {
                let row = &src.row(block.y + y)[block.x..block.x + block.w];
                dst[y * block.w..(y + 1) * block.w].copy_from_slice(row);
            }
        }
        (Some(h), None) => {
            let (start, len) = coeff_window(h);
            let coeffs = &h[start..start + len];
            let ww = block.w + len - 1;
            let win = extract_window_i16(src, bx + anchor + start as isize, by, ww, block.h);
            for y in 0..block.h {
                hrow_to_u16(
                    &win[y * ww..],
                    coeffs,
                    &mut dst[y * block.w..(y + 1) * block.w],
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
            let win = extract_window_i16(src, bx, by + anchor + start as isize, block.w, wh);
            for y in 0..block.h {
                vrow_to_u16(
                    &win[y * block.w..],
                    block.w,
                    coeffs,
                    &mut dst[y * block.w..(y + 1) * block.w],
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
            let ww = block.w + hl - 1;
            let wh = block.h + vl - 1;
            let win = extract_window_i16(
                src,
                bx + anchor + hs as isize,
                by + anchor + vs as isize,
                ww,
                wh,
            );
            let mut inter = vec![0i16; wh * block.w];
            for r in 0..wh {
                hrow_to_i16(
                    &win[r * ww..],
                    hc,
                    &mut inter[r * block.w..(r + 1) * block.w],
                    s1,
                );
            }
            let offset = 1i32 << (11 - s1);
            let shift = 12 - s1;
            for y in 0..block.h {
                vrow_to_u16(
                    &inter[y * block.w..],
                    block.w,
                    vc,
                    &mut dst[y * block.w..(y + 1) * block.w],
                    offset,
                    shift,
                    max,
                );
            }
        }
    }
}

/// Specialized scalar luma path (trimmed tap windows).
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn interp_luma_windowed(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &LumaFilterTable,
    dst: &mut [u16],
) {
    let row_h = (frac.fx != 0).then(|| &table.row(frac.fx, frac.hpel_alt)[..]);
    let row_v = (frac.fy != 0).then(|| &table.row(frac.fy, frac.hpel_alt)[..]);
    interp_windowed(src, block, row_h, row_v, LUMA_TAP_ANCHOR, dst);
}
