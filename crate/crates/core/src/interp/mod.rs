//! Separable fractional-sample motion-compensation interpolation.
//!
//! Three filter families share one precision contract:
//!
//! - 8-tap luma filters indexed by 1/16 fractional position, with an
//!   alternate half-pel row;
//! - 4-tap chroma filters indexed by 1/32 fractional position;
//! - 2-tap bilinear filters (`[64 - 4f, 4f]`) used by motion refinement.
//!
//! The contract: the horizontal pass accumulates in 32-bit signed, shifts
//! right by `s1 = depth - 8` into signed 16-bit intermediates; the vertical
//! pass accumulates in 32-bit signed, adds `1 << (11 - s1)` and shifts right
//! by `12 - s1`, clamping to the sample range. When only one pass is active
//! it uses shift 6 with offset 32; when neither is, the block is copied.
//! Every filter row sums to 64, so constant inputs are preserved exactly.

pub(crate) mod avx2;
pub(crate) mod scalar;
pub(crate) mod sse41;

use crate::error::{Error, Result};
use crate::frame::{BitDepth, BlockRect, Plane};

/// Number of 1/16 fractional positions for luma.
pub const LUMA_FRAC_STEPS: u8 = 16;
/// Number of 1/32 fractional positions for chroma.
pub const CHROMA_FRAC_STEPS: u8 = 32;

/// Leftmost tap offset of the 8-tap luma window (taps cover -3..=+4).
pub(crate) const LUMA_TAP_ANCHOR: isize = -3;
/// Leftmost tap offset of the 4-tap chroma window (taps cover -1..=+2).
pub(crate) const CHROMA_TAP_ANCHOR: isize = -1;
/// Leftmost tap offset of the 2-tap bilinear window (taps cover 0..=+1).
pub(crate) const BILINEAR_TAP_ANCHOR: isize = 0;

const LUMA_ROWS: [[i16; 8]; 16] = [
    [0, 0, 0, 64, 0, 0, 0, 0],
    [0, 1, -3, 63, 4, -2, 1, 0],
    [-1, 2, -5, 62, 8, -3, 1, 0],
    [-1, 3, -8, 60, 13, -4, 1, 0],
    [-1, 4, -10, 58, 17, -5, 1, 0],
    [-1, 4, -11, 52, 26, -8, 3, -1],
    [-1, 3, -9, 47, 31, -10, 4, -1],
    [-1, 4, -11, 45, 34, -10, 4, -1],
    [-1, 4, -11, 40, 40, -11, 4, -1],
    [-1, 4, -10, 34, 45, -11, 4, -1],
    [-1, 4, -10, 31, 47, -9, 3, -1],
    [-1, 3, -8, 26, 52, -11, 4, -1],
    [0, 1, -5, 17, 58, -10, 4, -1],
    [0, 1, -4, 13, 60, -8, 3, -1],
    [0, 1, -3, 8, 62, -5, 2, -1],
    [0, 1, -2, 4, 63, -3, 1, 0],
];

const LUMA_ALT_HPEL: [i16; 8] = [0, 3, 9, 20, 20, 9, 3, 0];

/// Default 4-tap chroma rows at 1/32 resolution. The set satisfies the
/// structural invariants (each row sums to 64, position 0 is the identity,
/// mirrored positions hold reversed coefficients); alternates can be loaded
/// from a text resource.
const CHROMA_ROWS: [[i16; 4]; 32] = [
    [0, 64, 0, 0],
    [-1, 63, 2, 0],
    [-2, 62, 4, 0],
    [-2, 60, 7, -1],
    [-2, 58, 10, -2],
    [-3, 57, 12, -2],
    [-4, 56, 14, -2],
    [-4, 55, 15, -2],
    [-4, 54, 16, -2],
    [-5, 53, 18, -2],
    [-6, 52, 20, -2],
    [-6, 49, 24, -3],
    [-6, 46, 28, -4],
    [-5, 44, 29, -4],
    [-4, 42, 30, -4],
    [-4, 39, 33, -4],
    [-4, 36, 36, -4],
    [-4, 33, 39, -4],
    [-4, 30, 42, -4],
    [-4, 29, 44, -5],
    [-4, 28, 46, -6],
    [-3, 24, 49, -6],
    [-2, 20, 52, -6],
    [-2, 18, 53, -5],
    [-2, 16, 54, -4],
    [-2, 15, 55, -4],
    [-2, 14, 56, -4],
    [-2, 12, 57, -3],
    [-2, 10, 58, -2],
    [-1, 7, 60, -2],
    [0, 4, 62, -2],
    [0, 2, 63, -1],
];

/// 8-tap luma interpolation coefficients: rows 0..=15 plus the alternate
/// half-pel row attached to position 8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LumaFilterTable {
    rows: [[i16; 8]; 16],
    alt_hpel: [i16; 8],
}

impl Default for LumaFilterTable {
    fn default() -> Self {
        Self {
            rows: LUMA_ROWS,
            alt_hpel: LUMA_ALT_HPEL,
        }
    }
}

impl LumaFilterTable {
    /// Coefficient row for a fractional position; `hpel_alt` selects the
    /// alternate half-pel row at position 8 and is ignored elsewhere.
    #[inline]
    pub fn row(&self, frac: u8, hpel_alt: bool) -> &[i16; 8] {
        debug_assert!(frac < LUMA_FRAC_STEPS);
        if frac == 8 && hpel_alt {
            &self.alt_hpel
        } else {
            &self.rows[frac as usize]
        }
    }

    pub fn alt_hpel_row(&self) -> &[i16; 8] {
        &self.alt_hpel
    }

    /// Structural invariants: row sums of 64, identity at position 0,
    /// mirror symmetry `f[p][i] = f[16-p][7-i]`, and 16-bit safety of the
    /// horizontal intermediates for 10-bit input.
    pub fn validate(&self) -> Result<()> {
        if self.rows[0] != [0, 0, 0, 64, 0, 0, 0, 0] {
            return Err(Error::format("luma position 0 must be the identity row"));
        }
        for (p, row) in self
            .rows
            .iter()
            .chain(std::iter::once(&self.alt_hpel))
            .enumerate()
        {
            let sum: i32 = row.iter().map(|&c| c as i32).sum();
            if sum != 64 {
                return Err(Error::format(format!("luma row {p} sums to {sum}, not 64")));
            }
            let abs_sum: i32 = row.iter().map(|&c| (c as i32).abs()).sum();
            // Post-horizontal intermediates must fit i16 at depth 10.
            if (1023 * abs_sum) >> 2 >= 1 << 15 {
                return Err(Error::format(format!(
                    "luma row {p} overflows 16-bit intermediates"
                )));
            }
        }
        for p in 1..16usize {
            for i in 0..8 {
                if self.rows[p][i] != self.rows[16 - p][7 - i] {
                    return Err(Error::format(format!(
                        "luma rows {p} and {} break mirror symmetry",
                        16 - p
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Constructs the embedded default luma filter table.
pub fn luma_table_default() -> LumaFilterTable {
    LumaFilterTable::default()
}

/// 4-tap chroma interpolation coefficients at 1/32 resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaFilterTable {
    rows: [[i16; 4]; 32],
}

impl Default for ChromaFilterTable {
    fn default() -> Self {
        Self { rows: CHROMA_ROWS }
    }
}

impl ChromaFilterTable {
    #[inline]
    pub fn row(&self, frac: u8) -> &[i16; 4] {
        debug_assert!(frac < CHROMA_FRAC_STEPS);
        &self.rows[frac as usize]
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows[0] != [0, 64, 0, 0] {
            return Err(Error::format("chroma position 0 must be the identity row"));
        }
        for (p, row) in self.rows.iter().enumerate() {
            let sum: i32 = row.iter().map(|&c| c as i32).sum();
            if sum != 64 {
                return Err(Error::format(format!(
                    "chroma row {p} sums to {sum}, not 64"
                )));
            }
            let abs_sum: i32 = row.iter().map(|&c| (c as i32).abs()).sum();
            if (1023 * abs_sum) >> 2 >= 1 << 15 {
                return Err(Error::format(format!(
                    "chroma row {p} overflows 16-bit intermediates"
                )));
            }
        }
        for p in 1..32usize {
            for i in 0..4 {
                if self.rows[p][i] != self.rows[32 - p][3 - i] {
                    return Err(Error::format(format!(
                        "chroma rows {p} and {} break mirror symmetry",
                        32 - p
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses a text resource: 32 whitespace-separated lines of 4 signed
    /// integers. Blank lines and `#` comments are skipped. The parsed table
    /// is rejected unless the structural invariants hold.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = [[0i16; 4]; 32];
        let mut count = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if count >= 32 {
                return Err(Error::format("chroma table has more than 32 rows"));
            }
            let values: Vec<i16> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<i16>().map_err(|_| {
                        Error::format(format!("line {}: bad coefficient {tok:?}", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != 4 {
                return Err(Error::format(format!(
                    "line {}: expected 4 coefficients, got {}",
                    lineno + 1,
                    values.len()
                )));
            }
            rows[count].copy_from_slice(&values);
            count += 1;
        }
        if count != 32 {
            return Err(Error::format(format!(
                "chroma table has {count} rows, expected 32"
            )));
        }
        let table = Self { rows };
        table.validate()?;
        Ok(table)
    }
}

/// Fractional sample position of a motion vector: 1/16 resolution for luma
/// and bilinear (0..=15), 1/32 for chroma (0..=31). `hpel_alt` selects the
/// alternate luma half-pel row when the component equals 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FracPos {
    pub fx: u8,
    pub fy: u8,
    pub hpel_alt: bool,
}

impl FracPos {
    pub fn new(fx: u8, fy: u8) -> Self {
        Self {
            fx,
            fy,
            hpel_alt: false,
        }
    }

    pub fn with_alt_hpel(fx: u8, fy: u8) -> Self {
        Self {
            fx,
            fy,
            hpel_alt: true,
        }
    }

    fn check(&self, steps: u8) -> Result<()> {
        if self.fx >= steps || self.fy >= steps {
            return Err(Error::contract(format!(
                "fractional position ({}, {}) outside 0..{}",
                self.fx, self.fy, steps
            )));
        }
        Ok(())
    }
}

/// Smallest contiguous coefficient window containing every nonzero tap:
/// `(start, len)` within the row.
pub(crate) fn coeff_window(row: &[i16]) -> (usize, usize) {
    let first = row.iter().position(|&c| c != 0).unwrap_or(0);
    let last = row.iter().rposition(|&c| c != 0).unwrap_or(0);
    (first, last - first + 1)
}

/// Number of taps actually needed for a luma fractional position: the
/// length of the smallest window containing all nonzero coefficients
/// (7 for positions 1..=4 and 12..=15, 6 for the alternate half-pel row).
pub fn effective_taps(table: &LumaFilterTable, frac: u8, hpel_alt: bool) -> Result<usize> {
    if frac >= LUMA_FRAC_STEPS {
        return Err(Error::contract(format!("position {frac} outside 0..16")));
    }
    Ok(coeff_window(table.row(frac, hpel_alt)).1)
}

/// Which separable passes a fractional position activates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PassShape {
    Copy,
    HorizOnly,
    VertOnly,
    TwoPass,
}

impl PassShape {
    fn of(frac: FracPos) -> Self {
        match (frac.fx != 0, frac.fy != 0) {
            (false, false) => PassShape::Copy,
            (true, false) => PassShape::HorizOnly,
            (false, true) => PassShape::VertOnly,
            (true, true) => PassShape::TwoPass,
        }
    }
}

/// Identity of a specialized luma interpolation implementation. Mirrored
/// positions `p` and `16 - p` share one identifier (their rows are
/// reverses of each other), so the canonical class is `min(p, 16 - p)` and
/// the reversal lives in [`InterpSelection`]. Identifiers are distinct per
/// bit depth and pass shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InterpKernelId {
    pub shape: PassShape,
    /// Canonical fractional class per axis; 0 when the pass is inactive.
    pub canon_fx: u8,
    pub canon_fy: u8,
    /// Effective tap counts of the canonical rows; 0 when inactive.
    pub taps_x: u8,
    pub taps_y: u8,
    pub depth: BitDepth,
}

/// A resolved kernel choice: the shared identifier plus per-axis
/// coefficient-reversal flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterpSelection {
    pub id: InterpKernelId,
    pub reverse_x: bool,
    pub reverse_y: bool,
}

/// Maps a luma fractional position and bit depth to the specialized kernel
/// that serves it. Deterministic; mirrored positions resolve to the same
/// identifier with opposite reversal flags.
pub fn select_interp_kernel(frac: FracPos, depth: BitDepth) -> Result<InterpSelection> {
    frac.check(LUMA_FRAC_STEPS)?;
    let axis = |f: u8| -> (u8, u8, bool) {
        if f == 0 {
            return (0, 0, false);
        }
        let canon = f.min(16 - f);
        // Path-group width, not the per-row minimal window: positions 1..=4
        // share one 7-tap implementation (f7 = 0 on all of them), mirrored
        // positions reuse it with reversed coefficients, and the half-pel
        // positions keep 8 taps unless the alternate 6-tap row is selected.
        let taps = match canon {
            1..=4 => 7,
            8 if frac.hpel_alt => 6,
            _ => 8,
        };
        (canon, taps, f > 8)
    };
    let (canon_fx, taps_x, reverse_x) = axis(frac.fx);
    let (canon_fy, taps_y, reverse_y) = axis(frac.fy);
    Ok(InterpSelection {
        id: InterpKernelId {
            shape: PassShape::of(frac),
            canon_fx,
            canon_fy,
            taps_x,
            taps_y,
            depth,
        },
        reverse_x,
        reverse_y,
    })
}

pub(crate) fn check_block_args(src: &Plane, block: BlockRect, dst_len: usize) -> Result<()> {
    block.check_within(src.width(), src.height())?;
    if dst_len != block.area() {
        return Err(Error::contract(format!(
            "destination holds {} samples for a {}x{} block",
            dst_len, block.w, block.h
        )));
    }
    Ok(())
}

/// 8-tap luma interpolation of `block` at fractional position `frac`,
/// written into `dst` (`block.w * block.h` samples, row-major). Scalar
/// reference semantics; the out-of-block reference window replicates plane
/// edges.
pub fn interp_luma_into(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &LumaFilterTable,
    dst: &mut [u16],
) -> Result<()> {
    frac.check(LUMA_FRAC_STEPS)?;
    check_block_args(src, block, dst.len())?;
    scalar::interp_luma(src, block, frac, table, dst);
    Ok(())
}

/// Convenience wrapper allocating the prediction block.
pub fn interp_luma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &LumaFilterTable,
) -> Result<Vec<u16>> {
    let mut dst = vec![0u16; block.area()];
    interp_luma_into(src, block, frac, table, &mut dst)?;
    Ok(dst)
}

/// 4-tap chroma interpolation at 1/32 fractional resolution.
pub fn interp_chroma_into(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &ChromaFilterTable,
    dst: &mut [u16],
) -> Result<()> {
    frac.check(CHROMA_FRAC_STEPS)?;
    check_block_args(src, block, dst.len())?;
    scalar::interp_chroma(src, block, frac, table, dst);
    Ok(())
}

pub fn interp_chroma(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    table: &ChromaFilterTable,
) -> Result<Vec<u16>> {
    let mut dst = vec![0u16; block.area()];
    interp_chroma_into(src, block, frac, table, &mut dst)?;
    Ok(dst)
}

/// 2-tap bilinear interpolation (`[64 - 4f, 4f]` per axis, f in 0..=15).
pub fn interp_bilinear_into(
    src: &Plane,
    block: BlockRect,
    frac: FracPos,
    dst: &mut [u16],
) -> Result<()> {
    frac.check(LUMA_FRAC_STEPS)?;
    check_block_args(src, block, dst.len())?;
    scalar::interp_bilinear(src, block, frac, dst);
    Ok(())
}

pub fn interp_bilinear(src: &Plane, block: BlockRect, frac: FracPos) -> Result<Vec<u16>> {
    let mut dst = vec![0u16; block.area()];
    interp_bilinear_into(src, block, frac, &mut dst)?;
    Ok(dst)
}

pub(crate) fn bilinear_row(f: u8) -> [i16; 2] {
    [64 - 4 * f as i16, 4 * f as i16]
}
