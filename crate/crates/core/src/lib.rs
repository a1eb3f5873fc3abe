//! Bit-accurate model of a memory-efficient parallel integral-image
//! computation engine.
//!
//! The crate has three parts:
//!
//! - [`integral`]: reference integral-image algorithms — a brute-force
//!   golden model, the serial recurrences, and a row-parallel decomposition
//!   — plus constant-time box sums over the result,
//! - [`memory`]: exact-arithmetic buffer sizing for the standard
//!   full-value row buffer and the narrow difference buffer, with the
//!   report data behind the sizing comparisons,
//! - [`engine`]: a cycle-level, width-faithful simulator of the pipelined
//!   two-pixels-per-clock engine built around that difference buffer.
//!
//! Every route to an integral image here — naive, serial, row-parallel,
//! simulated engine — produces bit-identical values, and the test suites
//! hold them to that.

pub mod engine;
pub mod image;
pub mod integral;
pub mod memory;

pub use engine::{
    run as engine_run, run_traced_csv as engine_run_traced_csv,
    run_with_trace as engine_run_with_trace, CycleStats, Engine, EngineConfig, EngineError, Output,
    OverflowPolicy, Rational, TraceRecord,
};
pub use image::{Image, ImageError, IntegralImage, RegionError, RowSumPlane};
pub use integral::{integral_naive, integral_row_parallel, integral_serial, row_sum_plane};
pub use memory::{
    buffer_depth, figure1_series, memory_profile, safe_width, width_proposed, width_standard,
    worst_case_adjacent_difference, Geometry, GeometryError, MemoryProfile, TenthsPct,
};
