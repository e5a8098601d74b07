//! Parallel string sorting and its benchmark harness.
//!
//! The sequential building blocks live in [`stringsort_core`]; this crate
//! adds the thread-based sorters in [`parsort`] and the input generators,
//! algorithm registry and RESULT-line reporting in [`bench`].

pub mod bench;
pub mod parsort;

pub use stringsort_core as core;
