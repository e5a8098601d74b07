//! Super scalar string sample sort.
//!
//! A step draws a sample of 8-character keys, picks `v = 2^d - 1` splitters,
//! lays them out as an implicit binary search tree and sends every string to
//! one of `2v + 1` buckets: even buckets hold keys strictly between two
//! splitters, odd buckets keys equal to a splitter.

mod sort;
mod tree;

pub use sort::{
    cached_chars, classify_region, s5_sort_region, s5_step, sample_tree, seq_s5, BucketLayout,
    S5Config, S5Output,
};
pub use tree::{
    classify, level_of_pre, pre_of_level, select_splitters, ClassifyVariant, SplitterTree,
    MAX_INTERLEAVE, MAX_LEVELS,
};

use crate::Strings;

/// Errors of the splitter tree helpers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SsssError {
    #[error("index {index} outside 1..2^{levels}")]
    IndexOutOfRange { index: usize, levels: u32 },
    #[error("sample of {len} keys cannot provide {needed} splitters")]
    SampleTooSmall { len: usize, needed: usize },
    #[error("tree depth {0} outside 1..=15")]
    BadLevels(u32),
}

/// Key of `s` at depth `h`: eight characters packed most significant first.
#[inline(always)]
pub fn pack_key(st: Strings<'_>, s: usize, h: usize) -> u64 {
    st.key(s, h)
}

/// Equal leading characters of two keys.
#[inline(always)]
pub fn splitter_lcp(a: u64, b: u64) -> usize {
    crate::seqsort::key_lcp(a, b)
}
