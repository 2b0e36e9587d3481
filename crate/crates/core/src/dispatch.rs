//! Runtime kernel registry: vector capability detection, per-family variant
//! binding with scalar fallback, and cross-variant bit-exactness
//! verification.
//!
//! Every kernel family always has a scalar reference. Vector variants are
//! registered statically and selected at registry construction; a family
//! with no variant at the active tier binds the best lower one. The
//! verification sweep runs all distinct implementations of a kernel on
//! identical seeded random inputs and reports sample-level mismatches
//! against scalar; mismatches are data, not errors.

use std::fmt;
use std::str::FromStr;

use crate::alf::{
    self, AlfChromaFilterFn, AlfClassification, AlfClassifyFn, AlfFilterSet, AlfLumaFilterFn,
    ResolvedLumaFilter,
};
use crate::error::{Error, Result};
use crate::frame::{BitDepth, BlockRect, Plane};
use crate::interp::{self, ChromaFilterTable, FracPos, LumaFilterTable};
use crate::rng::SplitMix64;
use crate::xform::{self, CoeffBlock, XformKind};

/// Environment variable supplying a default tier forcing.
pub const TIER_ENV_VAR: &str = "VVCKIT_TIER";
/// Environment variable naming a kernel family whose vector variant the
/// verification sweep deliberately corrupts (off-by-one on the first
/// sample). Exists so end-to-end tests can prove `verify` catches real
/// mismatches; ignored outside verification.
pub const FAULT_ENV_VAR: &str = "VVCKIT_INJECT_FAULT";

/// Vector capability tier. Ordering is by width: scalar < 128 < 256.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariantTier {
    Scalar,
    Vector128,
    Vector256,
}

impl VariantTier {
    pub const ALL: [VariantTier; 3] = [
        VariantTier::Scalar,
        VariantTier::Vector128,
        VariantTier::Vector256,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantTier::Scalar => "scalar",
            VariantTier::Vector128 => "vector128",
            VariantTier::Vector256 => "vector256",
        }
    }

    /// Tiers at or below this one, highest first.
    fn fallback_chain(self) -> impl Iterator<Item = VariantTier> {
        VariantTier::ALL
            .into_iter()
            .rev()
            .filter(move |&t| t <= self)
    }
}

impl fmt::Display for VariantTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantTier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(VariantTier::Scalar),
            "vector128" => Ok(VariantTier::Vector128),
            "vector256" => Ok(VariantTier::Vector256),
            other => Err(Error::Config(format!(
                "unknown tier {other:?}; expected scalar, vector128, or vector256"
            ))),
        }
    }
}

/// Set of selectable tiers on this host; scalar is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capabilities {
    tiers: Vec<VariantTier>,
}

impl Capabilities {
    fn new(mut tiers: Vec<VariantTier>) -> Self {
        if !tiers.contains(&VariantTier::Scalar) {
            tiers.push(VariantTier::Scalar);
        }
        tiers.sort();
        tiers.dedup();
        Self { tiers }
    }

    pub fn contains(&self, tier: VariantTier) -> bool {
        self.tiers.contains(&tier)
    }

    pub fn highest(&self) -> VariantTier {
        *self.tiers.last().expect("scalar always present")
    }

    pub fn tiers(&self) -> &[VariantTier] {
        &self.tiers
    }
}

impl fmt::Display for Capabilities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.tiers.iter().map(|t| t.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[cfg(target_arch = "x86_64")]
fn host_tiers() -> Vec<VariantTier> {
    let mut tiers = vec![VariantTier::Scalar];
    if is_x86_feature_detected!("sse4.1") && is_x86_feature_detected!("ssse3") {
        tiers.push(VariantTier::Vector128);
    }
    if is_x86_feature_detected!("avx2") {
        tiers.push(VariantTier::Vector256);
    }
    tiers
}

#[cfg(not(target_arch = "x86_64"))]
fn host_tiers() -> Vec<VariantTier> {
    vec![VariantTier::Scalar]
}

fn parse_env_tier() -> Result<Option<VariantTier>> {
    match std::env::var(TIER_ENV_VAR) {
        Ok(v) if v.is_empty() || v == "auto" => Ok(None),
        Ok(v) => v.parse().map(Some),
        Err(_) => Ok(None),
    }
}

/// Pure capability resolution: host tiers masked by an optional ceiling.
pub(crate) fn capabilities_from(
    host: &[VariantTier],
    ceiling: Option<VariantTier>,
) -> Capabilities {
    let tiers = host
        .iter()
        .copied()
        .filter(|&t| ceiling.is_none_or(|c| t <= c))
        .collect();
    Capabilities::new(tiers)
}

/// Detects the host's selectable tiers. Always contains scalar. A valid
/// `VVCKIT_TIER` value acts as a ceiling, so a forced-scalar environment
/// reports exactly `{scalar}`.
pub fn detect_capabilities() -> Capabilities {
    capabilities_from(&host_tiers(), parse_env_tier().unwrap_or(None))
}

/// Kernel family, the dispatch granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelFamily {
    AlfClassify,
    AlfLuma,
    AlfChroma,
    InterpLuma,
    InterpChroma,
    InterpBilinear,
    XformInv,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 7] = [
        KernelFamily::AlfClassify,
        KernelFamily::AlfLuma,
        KernelFamily::AlfChroma,
        KernelFamily::InterpLuma,
        KernelFamily::InterpChroma,
        KernelFamily::InterpBilinear,
        KernelFamily::XformInv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::AlfClassify => "alf-classify",
            KernelFamily::AlfLuma => "alf-luma",
            KernelFamily::AlfChroma => "alf-chroma",
            KernelFamily::InterpLuma => "interp-luma",
            KernelFamily::InterpChroma => "interp-chroma",
            KernelFamily::InterpBilinear => "interp-bilinear",
            KernelFamily::XformInv => "xform-inv",
        }
    }

    fn index(self) -> usize {
        KernelFamily::ALL.iter().position(|&f| f == self).unwrap()
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown kernel family {s:?}")))
    }
}

/// One dispatchable kernel: a family specialized by bit depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelId {
    pub family: KernelFamily,
    pub depth: BitDepth,
}

impl KernelId {
    pub fn all() -> Vec<KernelId> {
        let mut ids = Vec::new();
        for family in KernelFamily::ALL {
            for depth in [BitDepth::Eight, BitDepth::Ten] {
                ids.push(KernelId { family, depth });
            }
        }
        ids
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.family.name(), self.depth.bits())
    }
}

// Registry entry-point signatures. All kernels are pure over their inputs
// and write compact row-major buffers.
pub type InterpLumaFn = fn(&Plane, BlockRect, FracPos, &LumaFilterTable, &mut [u16]);
pub type InterpChromaFn = fn(&Plane, BlockRect, FracPos, &ChromaFilterTable, &mut [u16]);
pub type InterpBilinearFn = fn(&Plane, BlockRect, FracPos, &mut [u16]);
pub type XformInvFn = fn(&CoeffBlock, XformKind, XformKind, BitDepth, &mut [i16]);

// Safe wrappers around the vector kernels. Each is registered only after
// its tier was detected, which is the safety condition of the unsafe fns.

fn interp_luma_v128(src: &Plane, b: BlockRect, f: FracPos, t: &LumaFilterTable, d: &mut [u16]) {
    unsafe { interp::sse41::interp_luma(src, b, f, t, d) }
}

fn interp_luma_v256(src: &Plane, b: BlockRect, f: FracPos, t: &LumaFilterTable, d: &mut [u16]) {
    unsafe { interp::avx2::interp_luma(src, b, f, t, d) }
}

fn interp_chroma_v128(src: &Plane, b: BlockRect, f: FracPos, t: &ChromaFilterTable, d: &mut [u16]) {
    unsafe { interp::sse41::interp_chroma(src, b, f, t, d) }
}

fn interp_chroma_v256(src: &Plane, b: BlockRect, f: FracPos, t: &ChromaFilterTable, d: &mut [u16]) {
    unsafe { interp::avx2::interp_chroma(src, b, f, t, d) }
}

fn interp_bilinear_v128(src: &Plane, b: BlockRect, f: FracPos, d: &mut [u16]) {
    unsafe { interp::sse41::interp_bilinear(src, b, f, d) }
}

fn interp_bilinear_v256(src: &Plane, b: BlockRect, f: FracPos, d: &mut [u16]) {
    unsafe { interp::avx2::interp_bilinear(src, b, f, d) }
}

fn alf_classify_v128(p: &Plane, r: BlockRect, out: &mut [AlfClassification]) {
    unsafe { alf::sse41::classify_region(p, r, out) }
}

fn alf_luma_v128(p: &Plane, r: BlockRect, f: &[ResolvedLumaFilter], out: &mut [u16]) {
    unsafe { alf::sse41::filter_region_luma(p, r, f, out) }
}

fn alf_luma_v256(p: &Plane, r: BlockRect, f: &[ResolvedLumaFilter], out: &mut [u16]) {
    unsafe { alf::avx2::filter_region_luma(p, r, f, out) }
}

fn alf_chroma_v128(p: &Plane, r: BlockRect, f: &alf::ResolvedChromaFilter, out: &mut [u16]) {
    unsafe { alf::sse41::filter_region_chroma(p, r, f, out) }
}

fn alf_chroma_v256(p: &Plane, r: BlockRect, f: &alf::ResolvedChromaFilter, out: &mut [u16]) {
    unsafe { alf::avx2::filter_region_chroma(p, r, f, out) }
}

fn xform_inv_scalar(c: &CoeffBlock, kh: XformKind, kv: XformKind, d: BitDepth, out: &mut [i16]) {
    xform::inv_transform_2d_scalar(c, kh, kv, d, out);
}

fn xform_inv_v128(c: &CoeffBlock, kh: XformKind, kv: XformKind, d: BitDepth, out: &mut [i16]) {
    unsafe { xform::sse41::inv_transform_2d(c, kh, kv, d, out) }
}

/// Static variant catalog: which implementation a family ships at a tier.
/// `None` means the tier has no dedicated variant and falls back.
#[derive(Clone, Copy)]
enum VariantFn {
    InterpLuma(InterpLumaFn),
    InterpChroma(InterpChromaFn),
    InterpBilinear(InterpBilinearFn),
    AlfClassify(AlfClassifyFn),
    AlfLuma(AlfLumaFilterFn),
    AlfChroma(AlfChromaFilterFn),
    XformInv(XformInvFn),
}

fn catalog(family: KernelFamily, tier: VariantTier) -> Option<VariantFn> {
    use KernelFamily as F;
    use VariantTier as T;
    match (family, tier) {
        (F::InterpLuma, T::Scalar) => Some(VariantFn::InterpLuma(interp::scalar::interp_luma)),
        (F::InterpLuma, T::Vector128) => Some(VariantFn::InterpLuma(interp_luma_v128)),
        (F::InterpLuma, T::Vector256) => Some(VariantFn::InterpLuma(interp_luma_v256)),
        (F::InterpChroma, T::Scalar) => {
            Some(VariantFn::InterpChroma(interp::scalar::interp_chroma))
        }
        (F::InterpChroma, T::Vector128) => Some(VariantFn::InterpChroma(interp_chroma_v128)),
        (F::InterpChroma, T::Vector256) => Some(VariantFn::InterpChroma(interp_chroma_v256)),
        (F::InterpBilinear, T::Scalar) => {
            Some(VariantFn::InterpBilinear(interp::scalar::interp_bilinear))
        }
        (F::InterpBilinear, T::Vector128) => Some(VariantFn::InterpBilinear(interp_bilinear_v128)),
        (F::InterpBilinear, T::Vector256) => Some(VariantFn::InterpBilinear(interp_bilinear_v256)),
        (F::AlfClassify, T::Scalar) => Some(VariantFn::AlfClassify(alf::classify_region_scalar)),
        (F::AlfClassify, T::Vector128) => Some(VariantFn::AlfClassify(alf_classify_v128)),
        (F::AlfClassify, T::Vector256) => None,
        (F::AlfLuma, T::Scalar) => Some(VariantFn::AlfLuma(alf::filter_region_luma_scalar)),
        (F::AlfLuma, T::Vector128) => Some(VariantFn::AlfLuma(alf_luma_v128)),
        (F::AlfLuma, T::Vector256) => Some(VariantFn::AlfLuma(alf_luma_v256)),
        (F::AlfChroma, T::Scalar) => Some(VariantFn::AlfChroma(alf::filter_region_chroma_scalar)),
        (F::AlfChroma, T::Vector128) => Some(VariantFn::AlfChroma(alf_chroma_v128)),
        (F::AlfChroma, T::Vector256) => Some(VariantFn::AlfChroma(alf_chroma_v256)),
        (F::XformInv, T::Scalar) => Some(VariantFn::XformInv(xform_inv_scalar)),
        (F::XformInv, T::Vector128) => Some(VariantFn::XformInv(xform_inv_v128)),
        (F::XformInv, T::Vector256) => None,
    }
}

fn resolve(family: KernelFamily, tier: VariantTier) -> (VariantTier, VariantFn) {
    for t in tier.fallback_chain() {
        if let Some(f) = catalog(family, t) {
            return (t, f);
        }
    }
    unreachable!("every family has a scalar implementation");
}

/// Immutable table binding every kernel family to an implementation for
/// the active tier, with per-family fallback to the best lower variant.
pub struct KernelTable {
    tier: VariantTier,
    bindings: [VariantTier; 7],
    interp_luma: InterpLumaFn,
    interp_chroma: InterpChromaFn,
    interp_bilinear: InterpBilinearFn,
    alf_classify: AlfClassifyFn,
    alf_luma: AlfLumaFilterFn,
    alf_chroma: AlfChromaFilterFn,
    xform_inv: XformInvFn,
}

impl KernelTable {
    /// The tier the registry was built for.
    pub fn tier(&self) -> VariantTier {
        self.tier
    }

    /// The tier actually bound for a kernel (after fallback).
    pub fn binding(&self, id: KernelId) -> VariantTier {
        self.bindings[id.family.index()]
    }

    pub fn interp_luma(&self, _depth: BitDepth) -> InterpLumaFn {
        self.interp_luma
    }

    pub fn interp_chroma(&self, _depth: BitDepth) -> InterpChromaFn {
        self.interp_chroma
    }

    pub fn interp_bilinear(&self, _depth: BitDepth) -> InterpBilinearFn {
        self.interp_bilinear
    }

    pub fn alf_classify(&self, _depth: BitDepth) -> AlfClassifyFn {
        self.alf_classify
    }

    pub fn alf_luma(&self, _depth: BitDepth) -> AlfLumaFilterFn {
        self.alf_luma
    }

    pub fn alf_chroma(&self, _depth: BitDepth) -> AlfChromaFilterFn {
        self.alf_chroma
    }

    pub fn xform_inv(&self, _depth: BitDepth) -> XformInvFn {
        self.xform_inv
    }
}

pub(crate) fn build_registry_inner(
    forced: Option<VariantTier>,
    caps: &Capabilities,
) -> Result<KernelTable> {
    let tier = match forced {
        Some(t) if !caps.contains(t) => {
            return Err(Error::Config(format!(
                "tier {t} unavailable on this host (detected: {caps})"
            )));
        }
        Some(t) => t,
        None => caps.highest(),
    };
    let mut bindings = [VariantTier::Scalar; 7];
    macro_rules! bind {
        ($family:expr, $variant:path) => {{
            let (native, f) = resolve($family, tier);
            bindings[$family.index()] = native;
            match f {
                $variant(f) => f,
                _ => unreachable!("catalog variant matches its family"),
            }
        }};
    }
    Ok(KernelTable {
        interp_luma: bind!(KernelFamily::InterpLuma, VariantFn::InterpLuma),
        interp_chroma: bind!(KernelFamily::InterpChroma, VariantFn::InterpChroma),
        interp_bilinear: bind!(KernelFamily::InterpBilinear, VariantFn::InterpBilinear),
        alf_classify: bind!(KernelFamily::AlfClassify, VariantFn::AlfClassify),
        alf_luma: bind!(KernelFamily::AlfLuma, VariantFn::AlfLuma),
        alf_chroma: bind!(KernelFamily::AlfChroma, VariantFn::AlfChroma),
        xform_inv: bind!(KernelFamily::XformInv, VariantFn::XformInv),
        tier,
        bindings,
    })
}

/// Builds the kernel registry. `forced` overrides the `VVCKIT_TIER`
/// environment default; with neither, the highest detected tier wins.
/// Forcing an undetected tier is a configuration error.
pub fn build_registry(forced: Option<VariantTier>) -> Result<KernelTable> {
    let forced = match forced {
        Some(t) => Some(t),
        None => parse_env_tier()?,
    };
    build_registry_inner(forced, &detect_capabilities())
}

/// First failing comparison of a verification sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyFailure {
    pub trial: u64,
    pub input_seed: u64,
    pub tier: VariantTier,
    pub sample_index: usize,
}

/// Outcome of sweeping one kernel id across its variants.
#[derive(Debug, Clone)]
pub struct MismatchReport {
    pub id: KernelId,
    pub trials: u64,
    /// Non-scalar tiers that shipped a dedicated variant and were compared.
    pub compared_tiers: Vec<VariantTier>,
    pub mismatched_trials: u64,
    pub mismatched_samples: u64,
    /// Work units processed per variant (4x4 blocks for ALF families,
    /// blocks otherwise).
    pub units: u64,
    pub first_failure: Option<VerifyFailure>,
}

impl MismatchReport {
    pub fn clean(&self) -> bool {
        self.mismatched_samples == 0
    }
}

/// One generated verification input, spanning the id's specialization
/// domain; `units` counts 4x4 blocks (ALF) or blocks (elsewhere).
struct TrialInput {
    plane: Plane,
    units: u64,
}

fn trial_plane(rng: &mut SplitMix64, depth: BitDepth, min: usize) -> Plane {
    let w = min + rng.below(32) as usize;
    let h = min + rng.below(24) as usize;
    Plane::random(w, h, depth, rng.next_u64()).unwrap()
}

/// Runs one variant of `id` on the trial input derived from `input_seed`,
/// normalizing the output to i32 samples.
fn run_trial(id: KernelId, variant: VariantFn, input_seed: u64) -> (Vec<i32>, u64) {
    let mut rng = SplitMix64::new(input_seed);
    let depth = id.depth;
    match variant {
        VariantFn::InterpLuma(f) => {
            let TrialInput { plane, units } = interp_block_input(&mut rng, depth);
            let (block, frac) = interp_args(&mut rng, &plane, 16);
            let mut out = vec![0u16; block.area()];
            f(&plane, block, frac, &LumaFilterTable::default(), &mut out);
            (out.into_iter().map(i32::from).collect(), units)
        }
        VariantFn::InterpChroma(f) => {
            let TrialInput { plane, units } = interp_block_input(&mut rng, depth);
            let (block, frac) = interp_args(&mut rng, &plane, 32);
            let mut out = vec![0u16; block.area()];
            f(&plane, block, frac, &ChromaFilterTable::default(), &mut out);
            (out.into_iter().map(i32::from).collect(), units)
        }
        VariantFn::InterpBilinear(f) => {
            let TrialInput { plane, units } = interp_block_input(&mut rng, depth);
            let (block, frac) = interp_args(&mut rng, &plane, 16);
            let mut out = vec![0u16; block.area()];
            f(&plane, block, frac, &mut out);
            (out.into_iter().map(i32::from).collect(), units)
        }
        VariantFn::AlfClassify(f) => {
            let (plane, region) = alf_region_args(&mut rng, depth);
            let blocks = (region.w / 4) * (region.h / 4);
            let mut out = vec![AlfClassification::PLAIN; blocks];
            f(&plane, region, &mut out);
            (
                out.into_iter()
                    .flat_map(|c| [c.class_idx as i32, c.transpose_idx as i32])
                    .collect(),
                blocks as u64,
            )
        }
        VariantFn::AlfLuma(f) => {
            let (plane, region) = alf_region_args(&mut rng, depth);
            let blocks = (region.w / 4) * (region.h / 4);
            let set = AlfFilterSet::random(rng.next_u64(), 1);
            let clip = set.clip_table(depth);
            let filters: Vec<ResolvedLumaFilter> = (0..blocks)
                .map(|_| {
                    let base = &set.luma[rng.below(25) as usize];
                    let transposed = alf::alf_transpose_luma(base, rng.below(4) as u8);
                    alf::resolve_luma(&transposed, clip)
                })
                .collect();
            let mut out = vec![0u16; region.area()];
            f(&plane, region, &filters, &mut out);
            (out.into_iter().map(i32::from).collect(), blocks as u64)
        }
        VariantFn::AlfChroma(f) => {
            let (plane, region) = alf_region_args(&mut rng, depth);
            let blocks = (region.w / 4) * (region.h / 4);
            let set = AlfFilterSet::random(rng.next_u64(), 1);
            let rf = alf::resolve_chroma(&set.chroma[0], set.clip_table(depth));
            let mut out = vec![0u16; region.area()];
            f(&plane, region, &rf, &mut out);
            (out.into_iter().map(i32::from).collect(), blocks as u64)
        }
        VariantFn::XformInv(f) => {
            let sizes: [usize; 4] = [4, 8, 16, 32];
            let w = *rng.pick(&sizes);
            let h = *rng.pick(&sizes);
            let kind_h = *rng.pick(&XformKind::ALL);
            let kind_v = *rng.pick(&XformKind::ALL);
            let block = CoeffBlock::random(w, h, 8192, rng.next_u64()).unwrap();
            let mut out = vec![0i16; w * h];
            f(&block, kind_h, kind_v, depth, &mut out);
            (out.into_iter().map(i32::from).collect(), 1)
        }
    }
}

fn interp_block_input(rng: &mut SplitMix64, depth: BitDepth) -> TrialInput {
    TrialInput {
        plane: trial_plane(rng, depth, 8),
        units: 1,
    }
}

fn interp_args(rng: &mut SplitMix64, plane: &Plane, steps: u8) -> (BlockRect, FracPos) {
    let w = 1 + rng.below(plane.width().min(24) as u64) as usize;
    let h = 1 + rng.below(plane.height().min(16) as u64) as usize;
    let x = rng.below((plane.width() - w + 1) as u64) as usize;
    let y = rng.below((plane.height() - h + 1) as u64) as usize;
    let frac = FracPos {
        fx: rng.below(steps as u64) as u8,
        fy: rng.below(steps as u64) as u8,
        hpel_alt: rng.bool(),
    };
    (BlockRect::new(x, y, w, h), frac)
}

fn alf_region_args(rng: &mut SplitMix64, depth: BitDepth) -> (Plane, BlockRect) {
    let bw = 1 + rng.below(4) as usize;
    let bh = 1 + rng.below(4) as usize;
    let pw = 4 * (bw + rng.below(3) as usize);
    let ph = 4 * (bh + rng.below(3) as usize);
    let plane = Plane::random(pw, ph, depth, rng.next_u64()).unwrap();
    let x = 4 * rng.below((pw / 4 - bw + 1) as u64) as usize;
    let y = 4 * rng.below((ph / 4 - bh + 1) as u64) as usize;
    (plane, BlockRect::new(x, y, 4 * bw, 4 * bh))
}

fn parse_env_fault() -> Option<KernelFamily> {
    std::env::var(FAULT_ENV_VAR).ok()?.parse().ok()
}

/// Verification sweep honoring `VVCKIT_INJECT_FAULT`.
pub fn verify_variants(id: KernelId, seed: u64, trials: u64) -> MismatchReport {
    verify_variants_injected(id, seed, trials, parse_env_fault())
}

/// Core verification sweep with an explicit fault target: all shipped
/// variants of `id` (within the detected capabilities) run on identical
/// seeded random inputs and are compared sample-for-sample against scalar.
/// When `inject` names the id's family, every non-scalar output has its
/// first sample bumped by one, modeling an off-by-one rounding bug.
pub fn verify_variants_injected(
    id: KernelId,
    seed: u64,
    trials: u64,
    inject: Option<KernelFamily>,
) -> MismatchReport {
    assert!(trials >= 1, "trials must be at least 1");
    let caps = detect_capabilities();
    let scalar = catalog(id.family, VariantTier::Scalar).expect("scalar always exists");
    let variants: Vec<(VariantTier, VariantFn)> = [VariantTier::Vector128, VariantTier::Vector256]
        .into_iter()
        .filter(|&t| caps.contains(t))
        .filter_map(|t| catalog(id.family, t).map(|f| (t, f)))
        .collect();

    let mut report = MismatchReport {
        id,
        trials,
        compared_tiers: variants.iter().map(|&(t, _)| t).collect(),
        mismatched_trials: 0,
        mismatched_samples: 0,
        units: 0,
        first_failure: None,
    };
    for trial in 0..trials {
        let input_seed = SplitMix64::derive(seed, &[id.family.index() as u64, trial]).next_u64();
        let (reference, units) = run_trial(id, scalar, input_seed);
        report.units += units;
        let mut trial_bad = false;
        for &(tier, variant) in &variants {
            let (mut got, _) = run_trial(id, variant, input_seed);
            if inject == Some(id.family) && !got.is_empty() {
                got[0] += 1;
            }
            let bad = got.iter().zip(&reference).filter(|(a, b)| a != b).count()
                + got.len().abs_diff(reference.len());
            if bad > 0 {
                trial_bad = true;
                report.mismatched_samples += bad as u64;
                if report.first_failure.is_none() {
                    let sample_index = got
                        .iter()
                        .zip(&reference)
                        .position(|(a, b)| a != b)
                        .unwrap_or(0);
                    report.first_failure = Some(VerifyFailure {
                        trial,
                        input_seed,
                        tier,
                        sample_index,
                    });
                }
            }
        }
        if trial_bad {
            report.mismatched_trials += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capabilities_always_contain_scalar() {
        let caps = detect_capabilities();
        assert!(caps.contains(VariantTier::Scalar));
        assert_eq!(capabilities_from(&[], None).tiers(), &[VariantTier::Scalar]);
    }

    #[test]
    fn scalar_ceiling_masks_vector_tiers() {
        let host = [
            VariantTier::Scalar,
            VariantTier::Vector128,
            VariantTier::Vector256,
        ];
        let caps = capabilities_from(&host, Some(VariantTier::Scalar));
        assert_eq!(caps.tiers(), &[VariantTier::Scalar]);
        let caps = capabilities_from(&host, Some(VariantTier::Vector128));
        assert_eq!(caps.tiers(), &[VariantTier::Scalar, VariantTier::Vector128]);
    }

    #[test]
    fn forced_scalar_binds_every_family_to_scalar() {
        let caps = capabilities_from(&host_tiers(), None);
        let table = build_registry_inner(Some(VariantTier::Scalar), &caps).unwrap();
        assert_eq!(table.tier(), VariantTier::Scalar);
        for id in KernelId::all() {
            assert_eq!(table.binding(id), VariantTier::Scalar);
        }
    }

    #[test]
    fn vector_host_binds_alf_and_interp_to_vector_variants() {
        let caps = capabilities_from(&host_tiers(), None);
        if !caps.contains(VariantTier::Vector128) {
            return;
        }
        let table = build_registry_inner(None, &caps).unwrap();
        for family in [
            KernelFamily::AlfLuma,
            KernelFamily::AlfChroma,
            KernelFamily::InterpLuma,
            KernelFamily::InterpChroma,
            KernelFamily::InterpBilinear,
        ] {
            let id = KernelId {
                family,
                depth: BitDepth::Eight,
            };
            assert!(
                table.binding(id) > VariantTier::Scalar,
                "{family:?} must bind a vector variant"
            );
        }
    }

    #[test]
    fn forcing_an_undetected_tier_is_a_config_error() {
        let caps = capabilities_from(&[VariantTier::Scalar, VariantTier::Vector128], None);
        let err = build_registry_inner(Some(VariantTier::Vector256), &caps);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn families_lacking_a_tier_fall_back_without_gaps() {
        // A vector256 registry still resolves every family.
        let caps = capabilities_from(&host_tiers(), None);
        let table = build_registry_inner(Some(caps.highest()), &caps).unwrap();
        for id in KernelId::all() {
            assert!(table.binding(id) <= caps.highest());
        }
    }

    #[test]
    fn verify_reports_zero_mismatches_for_shipped_kernels() {
        for id in KernelId::all() {
            let report = verify_variants_injected(id, 0xABCD, 50, None);
            assert!(report.clean(), "{id}: {report:?}");
            assert_eq!(report.trials, 50);
        }
    }

    #[test]
    fn injected_fault_is_caught_with_reproducible_input() {
        let caps = detect_capabilities();
        if !caps.contains(VariantTier::Vector128) {
            return;
        }
        let id = KernelId {
            family: KernelFamily::InterpLuma,
            depth: BitDepth::Eight,
        };
        let report = verify_variants_injected(id, 7, 25, Some(KernelFamily::InterpLuma));
        assert!(!report.clean());
        let failure = report.first_failure.expect("must record a failing input");
        // The recorded seed reproduces the mismatch.
        let again =
            verify_variants_injected(id, 7, failure.trial + 1, Some(KernelFamily::InterpLuma));
        assert!(!again.clean());
        // Other families are untouched by the injection.
        let other = verify_variants_injected(
            KernelId {
                family: KernelFamily::AlfLuma,
                depth: BitDepth::Eight,
            },
            7,
            25,
            Some(KernelFamily::InterpLuma),
        );
        assert!(other.clean());
    }

    #[test]
    fn kernel_id_display_and_family_parsing() {
        assert_eq!(KernelId::all().len(), 14);
        let id = KernelId {
            family: KernelFamily::AlfLuma,
            depth: BitDepth::Ten,
        };
        assert_eq!(id.to_string(), "alf-luma/10");
        assert_eq!(
            "alf-luma".parse::<KernelFamily>().unwrap(),
            KernelFamily::AlfLuma
        );
        assert!("alf".parse::<KernelFamily>().is_err());
        assert_eq!(
            "vector128".parse::<VariantTier>().unwrap(),
            VariantTier::Vector128
        );
        assert!("avx9".parse::<VariantTier>().is_err());
    }
}
