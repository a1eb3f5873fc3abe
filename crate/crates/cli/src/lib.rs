//! File formats and rendering for the `iiengine` command-line tool.
//!
//! The binary's subcommand logic lives in `main.rs`; this library holds the
//! PGM codec, the IIM1 integral-image container, and the report formatting
//! so they can be exercised directly by tests and other tooling.

pub mod iim1;
pub mod output;
pub mod pgm;
