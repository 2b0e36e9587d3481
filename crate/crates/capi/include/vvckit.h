#ifndef VVCKIT_H
#define VVCKIT_H

/* Generated by cbindgen from the vvckit-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum VvcKitStatus {
  VVC_KIT_STATUS_OK = 0,
  // A precondition was violated (bad geometry, range, or argument).
  VVC_KIT_STATUS_CONTRACT = 1,
  // Requested dimensions overflow the addressable size.
  VVC_KIT_STATUS_ALLOC = 2,
  // Input bytes or text do not form a valid resource.
  VVC_KIT_STATUS_FORMAT = 3,
  // The requested configuration is unavailable on this host.
  VVC_KIT_STATUS_CONFIG = 4,
  VVC_KIT_STATUS_IO = 5,
  // A null handle or buffer pointer was passed.
  VVC_KIT_STATUS_NULL_ARG = 6,
  // An internal panic was caught at the boundary.
  VVC_KIT_STATUS_PANIC = 7,
} VvcKitStatus;

// Opaque sample plane handle.
typedef struct VvcKitPlane VvcKitPlane;

// Opaque kernel registry handle.
typedef struct VvcKitRegistry VvcKitRegistry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *vvckit_version(void);

// Allocates a zeroed plane. `bit_depth` must be 8 or 10. On success stores
// the handle in `out`; release it with [`vvckit_plane_free`].
//
// # Safety
// `out` must be a valid pointer to writable handle storage.
enum VvcKitStatus vvckit_plane_new(uint32_t width,
                                   uint32_t height,
                                   uint32_t bit_depth,
                                   struct VvcKitPlane **out);

// Releases a plane handle. A null handle is a no-op.
//
// # Safety
// `plane` must have come from [`vvckit_plane_new`] and not been freed.
void vvckit_plane_free(struct VvcKitPlane *plane);

// Deterministically fills a plane from the splitmix64 stream for `seed`.
//
// # Safety
// `plane` must be a valid handle.
enum VvcKitStatus vvckit_plane_fill_random(struct VvcKitPlane *plane, uint64_t seed);

// Copies the logical raster (no stride padding) into `dst`, which must
// hold `width * height` samples.
//
// # Safety
// `plane` must be a valid handle and `dst` writable for `dst_len` samples.
enum VvcKitStatus vvckit_plane_read(const struct VvcKitPlane *plane, uint16_t *dst, size_t dst_len);

// Overwrites the logical raster from `src` (`width * height` samples).
// Samples must respect the plane's bit depth.
//
// # Safety
// `plane` must be a valid handle and `src` readable for `src_len` samples.
enum VvcKitStatus vvckit_plane_write(struct VvcKitPlane *plane,
                                     const uint16_t *src,
                                     size_t src_len);

// FNV-1a digest of the plane's logical samples.
//
// # Safety
// `plane` must be a valid handle.
uint64_t vvckit_plane_hash(const struct VvcKitPlane *plane);

// Builds a kernel registry. `tier` is `"scalar"`, `"vector128"`,
// `"vector256"`, `"auto"`, or null for auto. Release with
// [`vvckit_registry_free`].
//
// # Safety
// `out` must be valid handle storage; `tier` null or a valid C string.
enum VvcKitStatus vvckit_registry_new(const char *tier, struct VvcKitRegistry **out);

// # Safety
// `registry` must have come from [`vvckit_registry_new`].
void vvckit_registry_free(struct VvcKitRegistry *registry);

// Name of the registry's active tier as a static C string.
//
// # Safety
// `registry` must be a valid handle.
const char *vvckit_registry_tier(const struct VvcKitRegistry *registry);

// 8-tap luma interpolation of a `w x h` block at fractional position
// `(fx, fy)` in 1/16 steps, using the default filter table. `dst` receives
// `w * h` row-major samples.
//
// # Safety
// Handles must be valid; `dst` writable for `dst_len` samples.
enum VvcKitStatus vvckit_interp_luma(const struct VvcKitRegistry *registry,
                                     const struct VvcKitPlane *src,
                                     uint32_t x,
                                     uint32_t y,
                                     uint32_t w,
                                     uint32_t h,
                                     uint8_t fx,
                                     uint8_t fy,
                                     bool hpel_alt,
                                     uint16_t *dst,
                                     size_t dst_len);

// Whole-plane luma ALF with a seeded random filter set and every CTU
// enabled; `dst` must share the source geometry.
//
// # Safety
// All handles must be valid; `src` and `dst` must be distinct.
enum VvcKitStatus vvckit_alf_filter_plane(const struct VvcKitRegistry *registry,
                                          const struct VvcKitPlane *src,
                                          struct VvcKitPlane *dst,
                                          uint64_t filter_seed,
                                          uint32_t ctu_size);

// 2-D inverse transform. `kind_h`/`kind_v`: 0 = DCT-2, 1 = DST-7,
// 2 = DCT-8. `levels` holds `w * h` coefficients; `dst` receives `w * h`
// residuals.
//
// # Safety
// `registry` valid; `levels` readable and `dst` writable for `w * h`.
enum VvcKitStatus vvckit_inv_transform(const struct VvcKitRegistry *registry,
                                       const int16_t *levels,
                                       uint32_t w,
                                       uint32_t h,
                                       uint32_t kind_h,
                                       uint32_t kind_v,
                                       uint32_t bit_depth,
                                       int16_t *dst);

// Runs the benchmark harness on a synthetic workload and stores the JSON
// report in `json_out` (release with [`vvckit_string_free`]). `stages` is
// a comma-separated subset of `iqit,mc,alf`; `tier` as in
// [`vvckit_registry_new`].
//
// # Safety
// `stages`/`tier` null or valid C strings; `json_out` valid storage.
enum VvcKitStatus vvckit_bench_json(uint32_t width,
                                    uint32_t height,
                                    uint32_t frames,
                                    uint32_t bit_depth,
                                    uint64_t seed,
                                    uint8_t qp,
                                    uint32_t ctu_size,
                                    const char *stages,
                                    const char *tier,
                                    uint32_t workers,
                                    char **json_out);

// Verifies every vector kernel variant against scalar over seeded random
// inputs. Returns the total number of mismatched samples (0 means pass),
// or a negative value on invalid arguments.
int64_t vvckit_verify(uint64_t seed, uint64_t trials);

// Releases a string returned by this library.
//
// # Safety
// `s` must have come from a vvckit function and not been freed already.
void vvckit_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VVCKIT_H */
