//! Inverse quantization and 2-D inverse transforms with MTS-style kernel
//! selection among DCT-2, DST-7, and DCT-8.
//!
//! Basis matrices are derived analytically from the orthonormal DCT/DST
//! bases and rounded to `512 * sqrt(n)`-scaled integers, so `B * B^T`
//! approximates `262144 * n * I`. Coupling the scale to the transform size
//! keeps coefficient magnitudes size-independent (a full-range flat
//! residual lands just inside 16 bits) and gives every basis row the same
//! relative precision, which is what bounds the reconstruction error. The
//! inverse applies the vertical basis transposed down the columns (clipping
//! intermediates to 16 bits after `(acc + 256) >> 9`), then the horizontal
//! basis across rows with a final `(acc + 2^(23 - depth)) >> (24 - depth)`.
//! Against a floating-point forward oracle this reconstructs full-range
//! 8-bit residuals within 2 LSB and 10-bit residuals within 4.

pub(crate) mod sse41;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frame::BitDepth;
use crate::rng::SplitMix64;

/// Core transform family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum XformKind {
    Dct2,
    Dst7,
    Dct8,
}

impl XformKind {
    pub const ALL: [XformKind; 3] = [XformKind::Dct2, XformKind::Dst7, XformKind::Dct8];

    pub fn supported_sizes(self) -> &'static [usize] {
        match self {
            XformKind::Dct2 => &[4, 8, 16, 32, 64],
            XformKind::Dst7 | XformKind::Dct8 => &[4, 8, 16, 32],
        }
    }

    pub fn supports(self, n: usize) -> bool {
        self.supported_sizes().contains(&n)
    }

    pub fn name(self) -> &'static str {
        match self {
            XformKind::Dct2 => "dct2",
            XformKind::Dst7 => "dst7",
            XformKind::Dct8 => "dct8",
        }
    }
}

/// A block of quantized (or dequantized) transform coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffBlock {
    pub w: usize,
    pub h: usize,
    pub levels: Vec<i16>,
}

impl CoeffBlock {
    pub fn new(w: usize, h: usize, levels: Vec<i16>) -> Result<Self> {
        if !XformKind::Dct2.supports(w) || !XformKind::Dct2.supports(h) {
            return Err(Error::contract(format!(
                "{w}x{h} is not a supported transform size"
            )));
        }
        if levels.len() != w * h {
            return Err(Error::contract("level buffer does not match block size"));
        }
        Ok(Self { w, h, levels })
    }

    pub fn zero(w: usize, h: usize) -> Result<Self> {
        Self::new(w, h, vec![0; w * h])
    }

    /// Seeded random levels in `[-bound, bound]`.
    pub fn random(w: usize, h: usize, bound: i16, seed: u64) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        let levels = (0..w * h)
            .map(|_| rng.range_i32(-(bound as i32), bound as i32) as i16)
            .collect();
        Self::new(w, h, levels)
    }
}

/// Integer basis matrix: `entries[k * n + m] = round(512 * sqrt(n) * T[k][m])`
/// for the orthonormal analytic basis `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMatrix {
    n: usize,
    entries: Vec<i16>,
}

impl BasisMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[i16] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    #[inline]
    pub fn entry(&self, k: usize, m: usize) -> i16 {
        self.entries[k * self.n + m]
    }

    fn compute(kind: XformKind, n: usize) -> Self {
        let scale = 512.0 * (n as f64).sqrt();
        let entries = (0..n * n)
            .map(|i| {
                let (k, m) = (i / n, i % n);
                (scale * analytic_basis(kind, n, k, m)).round() as i16
            })
            .collect();
        Self { n, entries }
    }
}

/// Analytic orthonormal basis element `T[k][m]`.
pub(crate) fn analytic_basis(kind: XformKind, n: usize, k: usize, m: usize) -> f64 {
    use std::f64::consts::PI;
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    match kind {
        XformKind::Dct2 => {
            let c = if k == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
            c * (2.0 / nf).sqrt() * (PI * kf * (2.0 * mf + 1.0) / (2.0 * nf)).cos()
        }
        XformKind::Dst7 => {
            (4.0 / (2.0 * nf + 1.0)).sqrt()
                * (PI * (2.0 * kf + 1.0) * (mf + 1.0) / (2.0 * nf + 1.0)).sin()
        }
        XformKind::Dct8 => {
            (4.0 / (2.0 * nf + 1.0)).sqrt()
                * (PI * (2.0 * kf + 1.0) * (2.0 * mf + 1.0) / (4.0 * nf + 2.0)).cos()
        }
    }
}

fn basis_tables() -> &'static BTreeMap<(XformKind, usize), BasisMatrix> {
    static TABLES: OnceLock<BTreeMap<(XformKind, usize), BasisMatrix>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut map = BTreeMap::new();
        for kind in XformKind::ALL {
            for &n in kind.supported_sizes() {
                map.insert((kind, n), BasisMatrix::compute(kind, n));
            }
        }
        map
    })
}

/// The cached 64-scaled integer basis for a transform kind and size.
pub fn basis_matrix(kind: XformKind, n: usize) -> Result<&'static BasisMatrix> {
    basis_tables()
        .get(&(kind, n))
        .ok_or_else(|| Error::contract(format!("{} does not support size {n}", kind.name())))
}

/// Dequantization scale ladder; the full scale is
/// `LEVEL_SCALE[qp % 6] << (qp / 6)`.
pub const LEVEL_SCALE: [i32; 6] = [40, 45, 51, 57, 64, 72];

/// Inverse quantization: `coeff = clip16((level * scale + 32) >> 6)`.
/// By construction qp = 4 (scale 64) is the exact identity.
pub fn dequant(block: &CoeffBlock, qp: u8) -> Result<CoeffBlock> {
    if qp > 63 {
        return Err(Error::contract(format!("qp {qp} outside 0..=63")));
    }
    let scale = (LEVEL_SCALE[(qp % 6) as usize] as i64) << (qp / 6);
    let levels = block
        .levels
        .iter()
        .map(|&l| ((l as i64 * scale + 32) >> 6).clamp(i16::MIN as i64, i16::MAX as i64) as i16)
        .collect();
    CoeffBlock::new(block.w, block.h, levels)
}

/// Shift after the column (vertical) pass.
pub(crate) const COL_SHIFT: i32 = 9;
/// The row (horizontal) pass shifts by `ROW_SHIFT_BASE - depth`.
pub(crate) const ROW_SHIFT_BASE: i32 = 24;

#[inline]
pub(crate) fn clip16(v: i32) -> i16 {
    v.clamp(i16::MIN as i32, i16::MAX as i32) as i16
}

/// Scalar reference for the 2-D inverse transform.
pub(crate) fn inv_transform_2d_scalar(
    coeffs: &CoeffBlock,
    kind_h: XformKind,
    kind_v: XformKind,
    depth: BitDepth,
    out: &mut [i16],
) {
    let (w, h) = (coeffs.w, coeffs.h);
    let bv = basis_matrix(kind_v, h).expect("validated by caller");
    let bh = basis_matrix(kind_h, w).expect("validated by caller");
    debug_assert_eq!(out.len(), w * h);

    // Column pass with Bv^T.
    let mut tmp = vec![0i16; w * h];
    for m in 0..h {
        for x in 0..w {
            let mut acc = 0i32;
            for k in 0..h {
                acc += bv.entry(k, m) as i32 * coeffs.levels[k * w + x] as i32;
            }
            tmp[m * w + x] = clip16((acc + (1 << (COL_SHIFT - 1))) >> COL_SHIFT);
        }
    }

    // Row pass with Bh^T.
    let shift = ROW_SHIFT_BASE - depth.bits() as i32;
    let offset = 1i32 << (shift - 1);
    for y in 0..h {
        for m in 0..w {
            let mut acc = 0i32;
            for k in 0..w {
                acc += bh.entry(k, m) as i32 * tmp[y * w + k] as i32;
            }
            out[y * w + m] = clip16((acc + offset) >> shift);
        }
    }
}

/// 2-D inverse transform of a dequantized coefficient block into spatial
/// residuals (signed 16-bit).
pub fn inv_transform_2d(
    coeffs: &CoeffBlock,
    kind_h: XformKind,
    kind_v: XformKind,
    depth: BitDepth,
) -> Result<Vec<i16>> {
    if !kind_h.supports(coeffs.w) || !kind_v.supports(coeffs.h) {
        return Err(Error::contract(format!(
            "{}x{} unsupported for {}/{}",
            coeffs.w,
            coeffs.h,
            kind_h.name(),
            kind_v.name()
        )));
    }
    let mut out = vec![0i16; coeffs.w * coeffs.h];
    inv_transform_2d_scalar(coeffs, kind_h, kind_v, depth, &mut out);
    Ok(out)
}
