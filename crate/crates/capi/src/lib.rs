//! C ABI for the vvckit decoder kernel library.
//!
//! Other languages bind against opaque handles (`VvcKitPlane`,
//! `VvcKitRegistry`) and integer status codes; sample data crosses the
//! boundary as caller-owned `uint16_t` rasters and reports as
//! heap-allocated JSON strings released with [`vvckit_string_free`].
//! The committed header lives at `include/vvckit.h`; rebuild it with
//! `cargo build -p vvckit-capi --features generate-header`.
//!
//! Every entry point is panic-safe: failures surface as status codes, never
//! as unwinds across the boundary.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vvckit::bench::{
    parse_stages, run_bench, run_verify, ReportFormat, WorkloadSource, WorkloadSpec,
};
use vvckit::dispatch::{build_registry, KernelTable, VariantTier};
use vvckit::frame::plane_hash;
use vvckit::interp::{FracPos, LumaFilterTable};
use vvckit::xform::{CoeffBlock, XformKind};
use vvckit::{alf, BitDepth, BlockRect, Error, Plane};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvcKitStatus {
    Ok = 0,
    /// A precondition was violated (bad geometry, range, or argument).
    Contract = 1,
    /// Requested dimensions overflow the addressable size.
    Alloc = 2,
    /// Input bytes or text do not form a valid resource.
    Format = 3,
    /// The requested configuration is unavailable on this host.
    Config = 4,
    Io = 5,
    /// A null handle or buffer pointer was passed.
    NullArg = 6,
    /// An internal panic was caught at the boundary.
    Panic = 7,
}

fn status_of(err: &Error) -> VvcKitStatus {
    match err {
        Error::Allocation(_) => VvcKitStatus::Alloc,
        Error::Contract(_) => VvcKitStatus::Contract,
        Error::Format(_) => VvcKitStatus::Format,
        Error::Config(_) => VvcKitStatus::Config,
        Error::TaskPanicked { .. } => VvcKitStatus::Panic,
        Error::Io(_) => VvcKitStatus::Io,
    }
}

fn guarded(f: impl FnOnce() -> VvcKitStatus) -> VvcKitStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(VvcKitStatus::Panic)
}

/// Opaque sample plane handle.
pub struct VvcKitPlane(Plane);

/// Opaque kernel registry handle.
pub struct VvcKitRegistry(KernelTable);

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn vvckit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Allocates a zeroed plane. `bit_depth` must be 8 or 10. On success stores
/// the handle in `out`; release it with [`vvckit_plane_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_new(
    width: u32,
    height: u32,
    bit_depth: u32,
    out: *mut *mut VvcKitPlane,
) -> VvcKitStatus {
    if out.is_null() {
        return VvcKitStatus::NullArg;
    }
    guarded(|| {
        let depth = match BitDepth::from_bits(bit_depth) {
            Ok(d) => d,
            Err(e) => return status_of(&e),
        };
        match Plane::new(width as usize, height as usize, depth) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(VvcKitPlane(p)));
                VvcKitStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a plane handle. A null handle is a no-op.
///
/// # Safety
/// `plane` must have come from [`vvckit_plane_new`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_free(plane: *mut VvcKitPlane) {
    if !plane.is_null() {
        drop(Box::from_raw(plane));
    }
}

/// Deterministically fills a plane from the splitmix64 stream for `seed`.
///
/// # Safety
/// `plane` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_fill_random(
    plane: *mut VvcKitPlane,
    seed: u64,
) -> VvcKitStatus {
    let Some(plane) = plane.as_mut() else {
        return VvcKitStatus::NullArg;
    };
    guarded(|| {
        plane.0.fill_random(seed);
        VvcKitStatus::Ok
    })
}

/// Copies the logical raster (no stride padding) into `dst`, which must
/// hold `width * height` samples.
///
/// # Safety
/// `plane` must be a valid handle and `dst` writable for `dst_len` samples.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_read(
    plane: *const VvcKitPlane,
    dst: *mut u16,
    dst_len: usize,
) -> VvcKitStatus {
    let Some(plane) = plane.as_ref() else {
        return VvcKitStatus::NullArg;
    };
    if dst.is_null() {
        return VvcKitStatus::NullArg;
    }
    let p = &plane.0;
    if dst_len != p.width() * p.height() {
        return VvcKitStatus::Contract;
    }
    guarded(|| {
        let out = std::slice::from_raw_parts_mut(dst, dst_len);
        for y in 0..p.height() {
            out[y * p.width()..(y + 1) * p.width()].copy_from_slice(p.row(y));
        }
        VvcKitStatus::Ok
    })
}

/// Overwrites the logical raster from `src` (`width * height` samples).
/// Samples must respect the plane's bit depth.
///
/// # Safety
/// `plane` must be a valid handle and `src` readable for `src_len` samples.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_write(
    plane: *mut VvcKitPlane,
    src: *const u16,
    src_len: usize,
) -> VvcKitStatus {
    let Some(plane) = plane.as_mut() else {
        return VvcKitStatus::NullArg;
    };
    if src.is_null() {
        return VvcKitStatus::NullArg;
    }
    let p = &mut plane.0;
    if src_len != p.width() * p.height() {
        return VvcKitStatus::Contract;
    }
    let max = p.max_value();
    guarded(|| {
        let data = std::slice::from_raw_parts(src, src_len);
        if data.iter().any(|&s| s > max) {
            return VvcKitStatus::Contract;
        }
        for y in 0..p.height() {
            let row = &data[y * p.width()..(y + 1) * p.width()];
            p.row_mut(y).copy_from_slice(row);
        }
        VvcKitStatus::Ok
    })
}

/// FNV-1a digest of the plane's logical samples.
///
/// # Safety
/// `plane` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vvckit_plane_hash(plane: *const VvcKitPlane) -> u64 {
    plane.as_ref().map_or(0, |p| plane_hash(&p.0))
}

fn parse_tier_arg(tier: *const c_char) -> Result<Option<VariantTier>, VvcKitStatus> {
    if tier.is_null() {
        return Ok(None);
    }
    let s = unsafe { CStr::from_ptr(tier) }
        .to_str()
        .map_err(|_| VvcKitStatus::Config)?;
    if s.is_empty() || s == "auto" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| VvcKitStatus::Config)
}

/// Builds a kernel registry. `tier` is `"scalar"`, `"vector128"`,
/// `"vector256"`, `"auto"`, or null for auto. Release with
/// [`vvckit_registry_free`].
///
/// # Safety
/// `out` must be valid handle storage; `tier` null or a valid C string.
#[no_mangle]
pub unsafe extern "C" fn vvckit_registry_new(
    tier: *const c_char,
    out: *mut *mut VvcKitRegistry,
) -> VvcKitStatus {
    if out.is_null() {
        return VvcKitStatus::NullArg;
    }
    guarded(|| {
        let forced = match parse_tier_arg(tier) {
            Ok(f) => f,
            Err(status) => return status,
        };
        match build_registry(forced) {
            Ok(table) => {
                *out = Box::into_raw(Box::new(VvcKitRegistry(table)));
                VvcKitStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `registry` must have come from [`vvckit_registry_new`].
#[no_mangle]
pub unsafe extern "C" fn vvckit_registry_free(registry: *mut VvcKitRegistry) {
    if !registry.is_null() {
        drop(Box::from_raw(registry));
    }
}

/// Name of the registry's active tier as a static C string.
///
/// # Safety
/// `registry` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vvckit_registry_tier(registry: *const VvcKitRegistry) -> *const c_char {
    match registry.as_ref() {
        Some(r) => match r.0.tier() {
            VariantTier::Scalar => c"scalar".as_ptr(),
            VariantTier::Vector128 => c"vector128".as_ptr(),
            VariantTier::Vector256 => c"vector256".as_ptr(),
        },
        None => ptr::null(),
    }
}

/// 8-tap luma interpolation of a `w x h` block at fractional position
/// `(fx, fy)` in 1/16 steps, using the default filter table. `dst` receives
/// `w * h` row-major samples.
///
/// # Safety
/// Handles must be valid; `dst` writable for `dst_len` samples.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vvckit_interp_luma(
    registry: *const VvcKitRegistry,
    src: *const VvcKitPlane,
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    fx: u8,
    fy: u8,
    hpel_alt: bool,
    dst: *mut u16,
    dst_len: usize,
) -> VvcKitStatus {
    let (Some(registry), Some(src)) = (registry.as_ref(), src.as_ref()) else {
        return VvcKitStatus::NullArg;
    };
    if dst.is_null() {
        return VvcKitStatus::NullArg;
    }
    guarded(|| {
        let block = BlockRect::new(x as usize, y as usize, w as usize, h as usize);
        if fx >= 16 || fy >= 16 {
            return VvcKitStatus::Contract;
        }
        if block.check_within(src.0.width(), src.0.height()).is_err() || dst_len != block.area() {
            return VvcKitStatus::Contract;
        }
        let out = std::slice::from_raw_parts_mut(dst, dst_len);
        let frac = FracPos { fx, fy, hpel_alt };
        registry.0.interp_luma(src.0.depth())(
            &src.0,
            block,
            frac,
            &LumaFilterTable::default(),
            out,
        );
        VvcKitStatus::Ok
    })
}

/// Whole-plane luma ALF with a seeded random filter set and every CTU
/// enabled; `dst` must share the source geometry.
///
/// # Safety
/// All handles must be valid; `src` and `dst` must be distinct.
#[no_mangle]
pub unsafe extern "C" fn vvckit_alf_filter_plane(
    registry: *const VvcKitRegistry,
    src: *const VvcKitPlane,
    dst: *mut VvcKitPlane,
    filter_seed: u64,
    ctu_size: u32,
) -> VvcKitStatus {
    let (Some(registry), Some(src), Some(dst)) = (registry.as_ref(), src.as_ref(), dst.as_mut())
    else {
        return VvcKitStatus::NullArg;
    };
    guarded(|| {
        let set = alf::AlfFilterSet::random(filter_seed, 1);
        let ctu = ctu_size as usize;
        let grid_len = match alf_grid_len(&src.0, ctu) {
            Ok(len) => len,
            Err(status) => return status,
        };
        let enable = vec![true; grid_len];
        match alf::alf_filter_plane_with(
            &registry.0,
            &src.0,
            &mut dst.0,
            &set,
            alf::AlfComponent::Luma,
            &enable,
            ctu,
        ) {
            Ok(()) => VvcKitStatus::Ok,
            Err(e) => status_of(&e),
        }
    })
}

fn alf_grid_len(p: &Plane, ctu: usize) -> Result<usize, VvcKitStatus> {
    if ctu < 4 || !ctu.is_multiple_of(4) {
        return Err(VvcKitStatus::Contract);
    }
    Ok(p.width().div_ceil(ctu) * p.height().div_ceil(ctu))
}

/// 2-D inverse transform. `kind_h`/`kind_v`: 0 = DCT-2, 1 = DST-7,
/// 2 = DCT-8. `levels` holds `w * h` coefficients; `dst` receives `w * h`
/// residuals.
///
/// # Safety
/// `registry` valid; `levels` readable and `dst` writable for `w * h`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vvckit_inv_transform(
    registry: *const VvcKitRegistry,
    levels: *const i16,
    w: u32,
    h: u32,
    kind_h: u32,
    kind_v: u32,
    bit_depth: u32,
    dst: *mut i16,
) -> VvcKitStatus {
    let Some(registry) = registry.as_ref() else {
        return VvcKitStatus::NullArg;
    };
    if levels.is_null() || dst.is_null() {
        return VvcKitStatus::NullArg;
    }
    guarded(|| {
        let kind = |v: u32| match v {
            0 => Some(XformKind::Dct2),
            1 => Some(XformKind::Dst7),
            2 => Some(XformKind::Dct8),
            _ => None,
        };
        let (Some(kh), Some(kv)) = (kind(kind_h), kind(kind_v)) else {
            return VvcKitStatus::Contract;
        };
        let Ok(depth) = BitDepth::from_bits(bit_depth) else {
            return VvcKitStatus::Contract;
        };
        let (w, h) = (w as usize, h as usize);
        if !kh.supports(w) || !kv.supports(h) {
            return VvcKitStatus::Contract;
        }
        let data = std::slice::from_raw_parts(levels, w * h).to_vec();
        let block = match CoeffBlock::new(w, h, data) {
            Ok(b) => b,
            Err(e) => return status_of(&e),
        };
        let out = std::slice::from_raw_parts_mut(dst, w * h);
        registry.0.xform_inv(depth)(&block, kh, kv, depth, out);
        VvcKitStatus::Ok
    })
}

/// Runs the benchmark harness on a synthetic workload and stores the JSON
/// report in `json_out` (release with [`vvckit_string_free`]). `stages` is
/// a comma-separated subset of `iqit,mc,alf`; `tier` as in
/// [`vvckit_registry_new`].
///
/// # Safety
/// `stages`/`tier` null or valid C strings; `json_out` valid storage.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vvckit_bench_json(
    width: u32,
    height: u32,
    frames: u32,
    bit_depth: u32,
    seed: u64,
    qp: u8,
    ctu_size: u32,
    stages: *const c_char,
    tier: *const c_char,
    workers: u32,
    json_out: *mut *mut c_char,
) -> VvcKitStatus {
    if json_out.is_null() {
        return VvcKitStatus::NullArg;
    }
    guarded(|| {
        let depth = match BitDepth::from_bits(bit_depth) {
            Ok(d) => d,
            Err(e) => return status_of(&e),
        };
        let stage_str = if stages.is_null() {
            "iqit,mc,alf".to_string()
        } else {
            match CStr::from_ptr(stages).to_str() {
                Ok(s) => s.to_string(),
                Err(_) => return VvcKitStatus::Config,
            }
        };
        let stages = match parse_stages(&stage_str) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let forced = match parse_tier_arg(tier) {
            Ok(f) => f,
            Err(status) => return status,
        };
        let spec = WorkloadSpec {
            width: width as usize,
            height: height as usize,
            frames: frames as usize,
            depth,
            seed,
            qp,
            ctu_size: ctu_size as usize,
            source: WorkloadSource::Synthetic,
            stages,
        };
        let report = match run_bench(&spec, forced, workers.max(1) as usize) {
            Ok(r) => r,
            Err(e) => return status_of(&e),
        };
        let mut buf = Vec::new();
        if vvckit::bench::emit_report(&report, ReportFormat::Json, &mut buf).is_err() {
            return VvcKitStatus::Format;
        }
        match CString::new(buf) {
            Ok(s) => {
                *json_out = s.into_raw();
                VvcKitStatus::Ok
            }
            Err(_) => VvcKitStatus::Format,
        }
    })
}

/// Verifies every vector kernel variant against scalar over seeded random
/// inputs. Returns the total number of mismatched samples (0 means pass),
/// or a negative value on invalid arguments.
#[no_mangle]
pub extern "C" fn vvckit_verify(seed: u64, trials: u64) -> i64 {
    if trials == 0 {
        return -1;
    }
    catch_unwind(|| run_verify(seed, trials).total_mismatched_samples() as i64).unwrap_or(-2)
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have come from a vvckit function and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn vvckit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_round_trip_through_the_abi() {
        unsafe {
            let mut plane: *mut VvcKitPlane = ptr::null_mut();
            assert_eq!(vvckit_plane_new(8, 4, 8, &mut plane), VvcKitStatus::Ok);
            assert_eq!(vvckit_plane_fill_random(plane, 7), VvcKitStatus::Ok);
            let mut buf = vec![0u16; 32];
            assert_eq!(
                vvckit_plane_read(plane, buf.as_mut_ptr(), buf.len()),
                VvcKitStatus::Ok
            );
            let h1 = vvckit_plane_hash(plane);
            assert_ne!(h1, 0);

            let mut other: *mut VvcKitPlane = ptr::null_mut();
            assert_eq!(vvckit_plane_new(8, 4, 8, &mut other), VvcKitStatus::Ok);
            assert_eq!(
                vvckit_plane_write(other, buf.as_ptr(), buf.len()),
                VvcKitStatus::Ok
            );
            assert_eq!(vvckit_plane_hash(other), h1);

            assert_eq!(
                vvckit_plane_read(plane, buf.as_mut_ptr(), 31),
                VvcKitStatus::Contract
            );
            assert_eq!(
                vvckit_plane_new(0, 4, 8, &mut plane),
                VvcKitStatus::Contract
            );
            let mut bad: *mut VvcKitPlane = ptr::null_mut();
            assert_eq!(vvckit_plane_new(4, 4, 12, &mut bad), VvcKitStatus::Contract);

            vvckit_plane_free(plane);
            vvckit_plane_free(other);
            vvckit_plane_free(ptr::null_mut());
        }
    }

    #[test]
    fn registry_and_kernels_through_the_abi() {
        unsafe {
            let mut registry: *mut VvcKitRegistry = ptr::null_mut();
            assert_eq!(
                vvckit_registry_new(ptr::null(), &mut registry),
                VvcKitStatus::Ok
            );
            let tier = CStr::from_ptr(vvckit_registry_tier(registry));
            assert!(!tier.to_str().unwrap().is_empty());

            let mut src: *mut VvcKitPlane = ptr::null_mut();
            vvckit_plane_new(32, 24, 10, &mut src);
            vvckit_plane_fill_random(src, 99);

            let mut pred = vec![0u16; 8 * 8];
            assert_eq!(
                vvckit_interp_luma(
                    registry,
                    src,
                    4,
                    4,
                    8,
                    8,
                    5,
                    9,
                    false,
                    pred.as_mut_ptr(),
                    64
                ),
                VvcKitStatus::Ok
            );
            assert!(pred.iter().any(|&s| s != 0));
            assert_eq!(
                vvckit_interp_luma(
                    registry,
                    src,
                    30,
                    4,
                    8,
                    8,
                    5,
                    9,
                    false,
                    pred.as_mut_ptr(),
                    64
                ),
                VvcKitStatus::Contract
            );

            let mut dst: *mut VvcKitPlane = ptr::null_mut();
            vvckit_plane_new(32, 24, 10, &mut dst);
            assert_eq!(
                vvckit_alf_filter_plane(registry, src, dst, 5, 16),
                VvcKitStatus::Ok
            );

            let levels = [64i16; 16];
            let mut resid = vec![0i16; 16];
            assert_eq!(
                vvckit_inv_transform(registry, levels.as_ptr(), 4, 4, 0, 1, 8, resid.as_mut_ptr()),
                VvcKitStatus::Ok
            );
            assert_eq!(
                vvckit_inv_transform(registry, levels.as_ptr(), 4, 4, 9, 1, 8, resid.as_mut_ptr()),
                VvcKitStatus::Contract
            );

            // A forced tier above host capability is a config error.
            let mut forced: *mut VvcKitRegistry = ptr::null_mut();
            let status = vvckit_registry_new(c"vector256".as_ptr(), &mut forced);
            if status == VvcKitStatus::Ok {
                vvckit_registry_free(forced);
            } else {
                assert_eq!(status, VvcKitStatus::Config);
            }

            vvckit_plane_free(src);
            vvckit_plane_free(dst);
            vvckit_registry_free(registry);
        }
    }

    #[test]
    fn bench_json_and_verify_through_the_abi() {
        unsafe {
            let mut json: *mut c_char = ptr::null_mut();
            let status = vvckit_bench_json(
                128,
                96,
                1,
                8,
                3,
                32,
                64,
                c"mc,alf".as_ptr(),
                c"auto".as_ptr(),
                2,
                &mut json,
            );
            assert_eq!(status, VvcKitStatus::Ok);
            let text = CStr::from_ptr(json).to_str().unwrap();
            let value: serde_json::Value = serde_json::from_str(text).unwrap();
            assert_eq!(value["meta"]["workload"]["height"], 96);
            assert_eq!(value["stages"].as_array().unwrap().len(), 2);
            vvckit_string_free(json);

            assert_eq!(vvckit_verify(1, 10), 0);
            assert_eq!(vvckit_verify(1, 0), -1);
        }
    }

    #[test]
    fn version_is_a_c_string() {
        unsafe {
            let v = CStr::from_ptr(vvckit_version());
            assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
        }
    }
}
