//! Compute-dominant H.266/VVC decoder kernels with scalar references and
//! bit-exact vector-accelerated variants, plus a wavefront task executor and
//! a benchmark harness.
//!
//! The crate is organized around the decoder stages that dominate runtime:
//!
//! - [`frame`]: sample planes, raw YUV 4:2:0 ingestion, content hashing.
//! - [`interp`]: separable fractional-sample motion-compensation filters
//!   (8-tap luma, 4-tap chroma, 2-tap bilinear).
//! - [`alf`]: adaptive loop filter classification, geometric filter
//!   transposition, and clipped diamond filtering.
//! - [`xform`]: inverse quantization and DCT-2/DST-7/DCT-8 inverse
//!   transforms.
//! - [`dispatch`]: runtime tier detection, kernel registry, and
//!   scalar-vs-vector bit-exactness verification.
//! - [`wavefront`]: dependency-driven parallel execution of CTU task graphs.
//! - [`bench`]: workload construction, per-stage timing, and report emission
//!   backing the `vvckit` CLI.
//!
//! Every accelerated kernel is contractually bit-exact with its scalar
//! reference; [`dispatch::verify_variants`] enforces this over seeded random
//! input sweeps.

pub mod alf;
pub mod bench;
pub mod dispatch;
mod error;
pub mod frame;
pub mod interp;
pub mod rng;
pub mod wavefront;
pub mod xform;

pub use error::{Error, Result};
pub use frame::{BitDepth, BlockRect, Frame, Plane};
