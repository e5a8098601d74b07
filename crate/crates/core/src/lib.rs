//! Sequential string sorting building blocks.
//!
//! Strings live in one immutable byte arena and are addressed by handles
//! (arena offsets of zero-terminated strings). Every sorter permutes a slice of
//! handles only; the characters never move.
//!
//! - [`strset`]: the arena, ingestion, and the reference oracles (naive sort,
//!   naive LCP array, distinguishing prefix metrics, verification).
//! - [`seqsort`]: insertion sort, multikey quicksort (plain and caching) and
//!   the counting MSD radix sort family.
//! - [`ssss`]: super scalar string sample sort with its implicit splitter tree.
//! - [`lcpmerge`]: LCP-aware comparison, binary and K-way merging over loser
//!   trees, and LCP insertion sort.
//!
//! The crate is `no_std` and only needs `alloc`; threads, IO and the command
//! line live in the `stringsort` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod lcpmerge;
pub mod seqsort;
pub mod ssss;
pub mod stats;
pub mod strset;

pub use stats::{Counter, NoStats, SortStats};
pub use strset::{LcpArray, MetricsReport, StringSet, Strings};

/// Number of characters packed into one machine word key.
pub const WORD_CHARS: usize = 8;

/// Regions smaller than this are finished with insertion sort.
pub const INSERTION_THRESHOLD: usize = 32;
