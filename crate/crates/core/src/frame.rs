//! Sample planes and frames, deterministic workload fill, raw YUV 4:2:0
//! ingestion, and content hashing.
//!
//! Planes store one component as unsigned 16-bit samples regardless of bit
//! depth; kernels receive the depth explicitly. Rows are padded so the stride
//! is a multiple of 16 samples, letting vector kernels load whole lanes
//! without per-row tail handling. All semantics are defined over the logical
//! `width x height` raster; padding never contributes to hashes or I/O.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Internal sample bit depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BitDepth {
    Eight,
    Ten,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            10 => Ok(BitDepth::Ten),
            other => Err(Error::contract(format!(
                "bit depth must be 8 or 10, got {other}"
            ))),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Ten => 10,
        }
    }

    /// Largest representable sample value.
    pub fn max_value(self) -> u16 {
        (1u16 << self.bits()) - 1
    }

    /// Bytes per sample in raw YUV files: 1 for 8-bit, 2 (little-endian)
    /// for 10-bit.
    pub fn bytes_per_sample(self) -> usize {
        match self {
            BitDepth::Eight => 1,
            BitDepth::Ten => 2,
        }
    }

    /// Index into per-depth lookup tables.
    pub fn index(self) -> usize {
        match self {
            BitDepth::Eight => 0,
            BitDepth::Ten => 1,
        }
    }
}

/// Rectangular region of a plane: top-left corner plus extent, in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BlockRect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    /// Checks the rect is non-empty and inside `width x height`.
    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.w == 0 || self.h == 0 {
            return Err(Error::contract("block extent must be at least 1x1"));
        }
        if self.x.checked_add(self.w).is_none_or(|r| r > width)
            || self.y.checked_add(self.h).is_none_or(|b| b > height)
        {
            return Err(Error::contract(format!(
                "block {}x{}@({},{}) exceeds plane {}x{}",
                self.w, self.h, self.x, self.y, width, height
            )));
        }
        Ok(())
    }
}

/// Row pitch granularity, in samples.
pub const STRIDE_ALIGN: usize = 16;

/// A single-component sample raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    stride: usize,
    depth: BitDepth,
    data: Vec<u16>,
}

impl Plane {
    /// Zeroed plane with the stride rounded up to a multiple of 16 samples.
    pub fn new(width: usize, height: usize, depth: BitDepth) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::contract("plane dimensions must be at least 1x1"));
        }
        let stride = width
            .checked_add(STRIDE_ALIGN - 1)
            .map(|w| w / STRIDE_ALIGN * STRIDE_ALIGN)
            .ok_or_else(|| Error::Allocation(format!("stride overflow for width {width}")))?;
        let len = stride
            .checked_mul(height)
            .ok_or_else(|| Error::Allocation(format!("plane {width}x{height} overflows")))?;
        let mut data = Vec::new();
        data.try_reserve_exact(len)
            .map_err(|e| Error::Allocation(format!("plane {width}x{height}: {e}")))?;
        data.resize(len, 0);
        Ok(Self {
            width,
            height,
            stride,
            depth,
            data,
        })
    }

    /// Builds a plane from raw parts, e.g. to test stride independence.
    pub fn from_parts(
        width: usize,
        height: usize,
        stride: usize,
        depth: BitDepth,
        data: Vec<u16>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || stride < width {
            return Err(Error::contract("stride must be at least the width"));
        }
        if data.len() != stride * height {
            return Err(Error::contract(format!(
                "data length {} does not match stride {} x height {}",
                data.len(),
                stride,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            stride,
            depth,
            data,
        })
    }

    /// Deterministically filled plane.
    pub fn random(width: usize, height: usize, depth: BitDepth, seed: u64) -> Result<Self> {
        let mut p = Plane::new(width, height, depth)?;
        p.fill_random(seed);
        Ok(p)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn max_value(&self) -> u16 {
        self.depth.max_value()
    }

    /// Full backing store including row padding.
    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u16] {
        &mut self.data
    }

    /// Logical row `y`, without padding.
    #[inline]
    pub fn row(&self, y: usize) -> &[u16] {
        debug_assert!(y < self.height);
        &self.data[y * self.stride..y * self.stride + self.width]
    }

    #[inline]
    pub fn row_mut(&mut self, y: usize) -> &mut [u16] {
        debug_assert!(y < self.height);
        let off = y * self.stride;
        &mut self.data[off..off + self.width]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.stride + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        debug_assert!(x < self.width && y < self.height);
        debug_assert!(v <= self.max_value());
        self.data[y * self.stride + x] = v;
    }

    /// Edge-replicating read: out-of-range coordinates clamp to the nearest
    /// border sample.
    #[inline]
    pub fn read_clamped(&self, x: isize, y: isize) -> u16 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.stride + cx]
    }

    /// Same logical geometry and depth; strides may differ.
    pub fn same_geometry(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height && self.depth == other.depth
    }

    pub fn fill(&mut self, v: u16) {
        debug_assert!(v <= self.max_value());
        self.data.fill(v);
    }

    /// Deterministic fill from the splitmix64 stream seeded with `seed`:
    /// one generator output per logical sample in raster order, masked to
    /// the plane's depth.
    pub fn fill_random(&mut self, seed: u64) {
        let mask = ((1u32 << self.depth.bits()) - 1) as u64;
        let mut rng = SplitMix64::new(seed);
        for y in 0..self.height {
            let off = y * self.stride;
            for x in 0..self.width {
                self.data[off + x] = (rng.next_u64() & mask) as u16;
            }
        }
    }

    /// Copies a rectangle from `src` at the same coordinates.
    pub fn copy_rect_from(&mut self, src: &Plane, rect: BlockRect) -> Result<()> {
        if !self.same_geometry(src) {
            return Err(Error::contract("copy_rect_from requires matching geometry"));
        }
        rect.check_within(self.width, self.height)?;
        for y in rect.y..rect.y + rect.h {
            let dst_off = y * self.stride + rect.x;
            let src_off = y * src.stride + rect.x;
            self.data[dst_off..dst_off + rect.w]
                .copy_from_slice(&src.data[src_off..src_off + rect.w]);
        }
        Ok(())
    }

    /// Writes a `rect.w x rect.h` sample buffer into the plane at `rect`.
    pub fn write_rect(&mut self, rect: BlockRect, samples: &[u16]) -> Result<()> {
        rect.check_within(self.width, self.height)?;
        if samples.len() != rect.area() {
            return Err(Error::contract("sample buffer does not match rect area"));
        }
        for r in 0..rect.h {
            let off = (rect.y + r) * self.stride + rect.x;
            self.data[off..off + rect.w].copy_from_slice(&samples[r * rect.w..(r + 1) * rect.w]);
        }
        Ok(())
    }

    /// Reads a `rect.w x rect.h` rectangle into a compact buffer.
    pub fn read_rect(&self, rect: BlockRect) -> Result<Vec<u16>> {
        rect.check_within(self.width, self.height)?;
        let mut out = vec![0u16; rect.area()];
        for r in 0..rect.h {
            let off = (rect.y + r) * self.stride + rect.x;
            out[r * rect.w..(r + 1) * rect.w].copy_from_slice(&self.data[off..off + rect.w]);
        }
        Ok(out)
    }
}

/// YUV 4:2:0 frame: full-resolution luma plus two half-resolution chroma
/// planes (ceiling division for odd luma dimensions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub luma: Plane,
    pub cb: Plane,
    pub cr: Plane,
}

impl Frame {
    pub fn new(width: usize, height: usize, depth: BitDepth) -> Result<Self> {
        let cw = width.div_ceil(2);
        let ch = height.div_ceil(2);
        Ok(Self {
            luma: Plane::new(width, height, depth)?,
            cb: Plane::new(cw, ch, depth)?,
            cr: Plane::new(cw, ch, depth)?,
        })
    }

    /// Deterministically filled frame; each plane gets an independent stream.
    pub fn random(width: usize, height: usize, depth: BitDepth, seed: u64) -> Result<Self> {
        let mut f = Frame::new(width, height, depth)?;
        f.luma
            .fill_random(SplitMix64::derive(seed, &[0]).next_u64());
        f.cb.fill_random(SplitMix64::derive(seed, &[1]).next_u64());
        f.cr.fill_random(SplitMix64::derive(seed, &[2]).next_u64());
        Ok(f)
    }

    pub fn planes(&self) -> [&Plane; 3] {
        [&self.luma, &self.cb, &self.cr]
    }

    pub fn depth(&self) -> BitDepth {
        self.luma.depth()
    }
}

/// Copies a clamped window into a compact `i16` buffer (row-major, stride
/// `w`). Coordinates may lie outside the plane; border samples replicate,
/// matching [`Plane::read_clamped`]. Kernels use this to turn border logic
/// into plain loads.
pub(crate) fn extract_window_i16(p: &Plane, x0: isize, y0: isize, w: usize, h: usize) -> Vec<i16> {
    let mut out = vec![0i16; w * h];
    let pw = p.width() as isize;
    let ph = p.height() as isize;
    for r in 0..h {
        let sy = (y0 + r as isize).clamp(0, ph - 1) as usize;
        let srow = p.row(sy);
        let orow = &mut out[r * w..(r + 1) * w];
        let left = (-x0).clamp(0, w as isize) as usize;
        let in_end = (pw - x0).clamp(left as isize, w as isize) as usize;
        orow[..left].fill(srow[0] as i16);
        for (c, o) in orow[left..in_end].iter_mut().enumerate() {
            *o = srow[(x0 + (left + c) as isize) as usize] as i16;
        }
        orow[in_end..].fill(srow[p.width() - 1] as i16);
    }
    out
}

/// FNV-1a 64-bit offset basis; also the digest of an empty input.
pub const FNV_OFFSET_BASIS: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// Incremental FNV-1a over logical samples, each hashed as two
/// little-endian bytes. Stride padding never enters the digest.
#[derive(Debug, Clone, Copy)]
pub struct ContentHasher {
    state: u64,
}

impl Default for ContentHasher {
    fn default() -> Self {
        Self::new()
    }
}

impl ContentHasher {
    pub fn new() -> Self {
        Self {
            state: FNV_OFFSET_BASIS,
        }
    }

    #[inline]
    pub fn update_byte(&mut self, b: u8) {
        self.state = (self.state ^ b as u64).wrapping_mul(FNV_PRIME);
    }

    #[inline]
    pub fn update_sample(&mut self, s: u16) {
        self.update_byte(s as u8);
        self.update_byte((s >> 8) as u8);
    }

    pub fn update_plane(&mut self, p: &Plane) {
        for y in 0..p.height() {
            for &s in p.row(y) {
                self.update_sample(s);
            }
        }
    }

    pub fn update_frame(&mut self, f: &Frame) {
        for p in f.planes() {
            self.update_plane(p);
        }
    }

    pub fn finish(self) -> u64 {
        self.state
    }
}

/// Digest of one plane's logical samples.
pub fn plane_hash(p: &Plane) -> u64 {
    let mut h = ContentHasher::new();
    h.update_plane(p);
    h.finish()
}

/// Digest of a frame: planes in luma, cb, cr order, raster order within
/// each plane. Invariant under stride changes.
pub fn frame_hash(f: &Frame) -> u64 {
    let mut h = ContentHasher::new();
    h.update_frame(f);
    h.finish()
}

/// Digest of a frame sequence; the empty sequence hashes to the FNV-1a
/// offset basis.
pub fn sequence_hash(frames: &[Frame]) -> u64 {
    let mut h = ContentHasher::new();
    for f in frames {
        h.update_frame(f);
    }
    h.finish()
}

fn frame_byte_len(width: usize, height: usize, depth: BitDepth) -> usize {
    let cw = width.div_ceil(2);
    let ch = height.div_ceil(2);
    (width * height + 2 * cw * ch) * depth.bytes_per_sample()
}

fn read_plane_samples(reader: &mut impl Read, plane: &mut Plane) -> Result<()> {
    let depth = plane.depth();
    match depth {
        BitDepth::Eight => {
            let mut row = vec![0u8; plane.width()];
            for y in 0..plane.height() {
                reader.read_exact(&mut row)?;
                for (dst, &b) in plane.row_mut(y).iter_mut().zip(&row) {
                    *dst = b as u16;
                }
            }
        }
        BitDepth::Ten => {
            let mut row = vec![0u8; plane.width() * 2];
            for y in 0..plane.height() {
                reader.read_exact(&mut row)?;
                for (dst, pair) in plane.row_mut(y).iter_mut().zip(row.chunks_exact(2)) {
                    // Little-endian, top 6 bits discarded.
                    *dst = u16::from_le_bytes([pair[0], pair[1]]) & 0x3FF;
                }
            }
        }
    }
    Ok(())
}

/// Loads up to `max_frames` frames from a raw planar YUV 4:2:0 file.
///
/// The file size must be an exact multiple of one frame (1 byte per sample
/// at 8-bit, 2 little-endian bytes at 10-bit); anything else is a format
/// error. 10-bit samples are masked to their low 10 bits on read.
pub fn load_yuv420(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    depth: BitDepth,
    max_frames: usize,
) -> Result<Vec<Frame>> {
    if width == 0 || height == 0 {
        return Err(Error::contract("frame dimensions must be at least 1x1"));
    }
    let path = path.as_ref();
    let file = File::open(path)?;
    let file_len = file.metadata()?.len();
    let frame_len = frame_byte_len(width, height, depth) as u64;
    if file_len % frame_len != 0 {
        return Err(Error::format(format!(
            "{}: size {} is not a multiple of the {}-byte frame",
            path.display(),
            file_len,
            frame_len
        )));
    }
    let available = (file_len / frame_len) as usize;
    let count = available.min(max_frames);
    let mut reader = BufReader::new(file);
    let mut frames = Vec::with_capacity(count);
    for _ in 0..count {
        let mut frame = Frame::new(width, height, depth)?;
        read_plane_samples(&mut reader, &mut frame.luma)?;
        read_plane_samples(&mut reader, &mut frame.cb)?;
        read_plane_samples(&mut reader, &mut frame.cr)?;
        frames.push(frame);
    }
    Ok(frames)
}

fn write_plane_samples(writer: &mut impl Write, plane: &Plane) -> Result<()> {
    match plane.depth() {
        BitDepth::Eight => {
            let mut row = vec![0u8; plane.width()];
            for y in 0..plane.height() {
                for (b, &s) in row.iter_mut().zip(plane.row(y)) {
                    *b = s as u8;
                }
                writer.write_all(&row)?;
            }
        }
        BitDepth::Ten => {
            let mut row = vec![0u8; plane.width() * 2];
            for y in 0..plane.height() {
                for (pair, &s) in row.chunks_exact_mut(2).zip(plane.row(y)) {
                    pair.copy_from_slice(&(s & 0x3FF).to_le_bytes());
                }
                writer.write_all(&row)?;
            }
        }
    }
    Ok(())
}

/// Writes frames as raw planar YUV 4:2:0, the exact inverse of
/// [`load_yuv420`].
pub fn write_yuv420(path: impl AsRef<Path>, frames: &[Frame]) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    for frame in frames {
        write_plane_samples(&mut writer, &frame.luma)?;
        write_plane_samples(&mut writer, &frame.cb)?;
        write_plane_samples(&mut writer, &frame.cr)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_new_zeroed_and_stride_rounded() {
        let p = Plane::new(4, 4, BitDepth::Eight).unwrap();
        assert_eq!(p.stride(), 16);
        assert!(p.data().iter().all(|&s| s == 0));

        let p = Plane::new(1920, 1080, BitDepth::Eight).unwrap();
        assert_eq!(p.stride(), 1920);

        let p = Plane::new(7, 3, BitDepth::Ten).unwrap();
        assert_eq!(p.stride(), 16);
        assert_eq!(p.max_value(), 1023);
    }

    #[test]
    fn plane_new_rejects_degenerate_and_overflowing_sizes() {
        assert!(matches!(
            Plane::new(0, 4, BitDepth::Eight),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            Plane::new(usize::MAX, 2, BitDepth::Eight),
            Err(Error::Allocation(_))
        ));
        assert!(matches!(
            Plane::new(1 << 30, 1 << 30, BitDepth::Eight),
            Err(Error::Allocation(_))
        ));
    }

    #[test]
    fn read_clamped_replicates_edges() {
        let mut p = Plane::new(6, 7, BitDepth::Eight).unwrap();
        p.fill_random(42);
        assert_eq!(p.read_clamped(-2, 5), p.get(0, 5));
        assert_eq!(p.read_clamped(6 + 3, -1), p.get(5, 0));
        assert_eq!(p.read_clamped(3, 3), p.get(3, 3));
        // Exhaustive: in-bounds reads equal direct indexing.
        for y in 0..7 {
            for x in 0..6 {
                assert_eq!(p.read_clamped(x as isize, y as isize), p.get(x, y));
            }
        }
    }

    #[test]
    fn fill_random_matches_reference_stream_and_is_reproducible() {
        let mut p = Plane::new(4, 2, BitDepth::Eight).unwrap();
        p.fill_random(0);
        // First raw splitmix64 output for seed 0 is 0xE220A8397B1DCDAF; the
        // first 8-bit sample keeps its low byte.
        assert_eq!(p.get(0, 0), 0xAF);

        let mut q = Plane::new(4, 2, BitDepth::Eight).unwrap();
        q.fill_random(0);
        assert_eq!(p, q);

        let mut ten = Plane::new(5, 3, BitDepth::Ten).unwrap();
        ten.fill_random(1234);
        assert!(ten.data().iter().all(|&s| s <= 1023));
    }

    #[test]
    fn different_seeds_differ_at_full_hd() {
        let a = Plane::random(1920, 1080, BitDepth::Eight, 1).unwrap();
        let b = Plane::random(1920, 1080, BitDepth::Eight, 2).unwrap();
        assert_ne!(plane_hash(&a), plane_hash(&b));
    }

    /// Reference FNV-1a used as an independent oracle.
    fn fnv1a_bytes(bytes: &[u8]) -> u64 {
        let mut state = 0xCBF2_9CE4_8422_2325u64;
        for &b in bytes {
            state = (state ^ b as u64).wrapping_mul(0x100_0000_01B3);
        }
        state
    }

    #[test]
    fn frame_hash_matches_reference_fnv1a() {
        // Zeroed 2x2 luma + 1x1 chroma planes hash twelve zero bytes.
        let f = Frame::new(2, 2, BitDepth::Eight).unwrap();
        assert_eq!(frame_hash(&f), fnv1a_bytes(&[0u8; 12]));
        assert_eq!(sequence_hash(&[]), FNV_OFFSET_BASIS);

        let mut g = Frame::new(2, 2, BitDepth::Ten).unwrap();
        g.luma.set(1, 0, 0x1A3);
        let mut bytes = vec![0u8; 12];
        bytes[2] = 0xA3;
        bytes[3] = 0x01;
        assert_eq!(frame_hash(&g), fnv1a_bytes(&bytes));
    }

    #[test]
    fn frame_hash_ignores_stride_and_sees_every_sample() {
        let mut narrow = Plane::new(5, 4, BitDepth::Eight).unwrap();
        narrow.fill_random(9);
        let mut wide_data = vec![0xEEu16; 40 * 4];
        for y in 0..4 {
            for x in 0..5 {
                wide_data[y * 40 + x] = narrow.get(x, y);
            }
        }
        let wide = Plane::from_parts(5, 4, 40, BitDepth::Eight, wide_data).unwrap();
        assert_eq!(plane_hash(&narrow), plane_hash(&wide));

        // Any single-sample mutation must change the digest.
        for y in 0..4 {
            for x in 0..5 {
                let mut m = narrow.clone();
                m.set(x, y, m.get(x, y) ^ 1);
                assert_ne!(plane_hash(&m), plane_hash(&narrow), "at ({x},{y})");
            }
        }
    }

    #[test]
    fn yuv420_frame_size_accounting() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.yuv");

        std::fs::write(&path, vec![7u8; 24]).unwrap();
        let frames = load_yuv420(&path, 4, 4, BitDepth::Eight, 10).unwrap();
        assert_eq!(frames.len(), 1);
        assert!(frames[0].luma.data().iter().take(4).all(|&s| s == 7));

        std::fs::write(&path, vec![7u8; 23]).unwrap();
        assert!(matches!(
            load_yuv420(&path, 4, 4, BitDepth::Eight, 10),
            Err(Error::Format(_))
        ));

        assert!(matches!(
            load_yuv420(dir.path().join("missing.yuv"), 4, 4, BitDepth::Eight, 1),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn yuv420_ten_bit_masks_high_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ten.yuv");
        // 4x4 10-bit frame: 24 samples, 2 bytes each. Write 0xFFFF everywhere;
        // reads must mask to 1023.
        std::fs::write(&path, vec![0xFFu8; 48]).unwrap();
        let frames = load_yuv420(&path, 4, 4, BitDepth::Ten, 1).unwrap();
        assert_eq!(frames.len(), 1);
        for p in frames[0].planes() {
            assert!(p.data().iter().all(|&s| s <= 1023));
            assert_eq!(p.get(0, 0), 1023);
        }
    }

    #[test]
    fn yuv420_round_trips_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        for depth in [BitDepth::Eight, BitDepth::Ten] {
            let frames: Vec<Frame> = (0..3)
                .map(|i| Frame::random(12, 6, depth, 100 + i).unwrap())
                .collect();
            let first = dir.path().join(format!("a{}.yuv", depth.bits()));
            let second = dir.path().join(format!("b{}.yuv", depth.bits()));
            write_yuv420(&first, &frames).unwrap();
            let loaded = load_yuv420(&first, 12, 6, depth, usize::MAX).unwrap();
            assert_eq!(loaded, frames);
            write_yuv420(&second, &loaded).unwrap();
            assert_eq!(
                std::fs::read(&first).unwrap(),
                std::fs::read(&second).unwrap()
            );
        }
    }

    #[test]
    fn frame_chroma_uses_ceiling_division() {
        let f = Frame::new(5, 3, BitDepth::Eight).unwrap();
        assert_eq!((f.cb.width(), f.cb.height()), (3, 2));
        assert_eq!((f.cr.width(), f.cr.height()), (3, 2));
    }

    #[test]
    fn rect_helpers_round_trip() {
        let mut p = Plane::random(10, 8, BitDepth::Ten, 5).unwrap();
        let rect = BlockRect::new(2, 3, 5, 4);
        let buf = p.read_rect(rect).unwrap();
        let mut q = Plane::new(10, 8, BitDepth::Ten).unwrap();
        q.write_rect(rect, &buf).unwrap();
        assert_eq!(q.read_rect(rect).unwrap(), buf);
        assert!(p.write_rect(BlockRect::new(8, 0, 4, 1), &[0; 4]).is_err());
        p.copy_rect_from(&q, rect).unwrap();
        assert_eq!(p.read_rect(rect).unwrap(), buf);
    }
}
