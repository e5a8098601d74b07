//! Sequential string sorters.
//!
//! Every sorter takes a slice of handles plus a depth `h`: the number of
//! leading characters all strings in the slice are known to share. Character
//! comparisons start at `h`.

mod insertion;
mod mkqs;
mod radix;

pub use insertion::insertion_sort;
pub use mkqs::{
    caching_mkqs, caching_mkqs_lcp, caching_mkqs_shared, caching_mkqs_task, multikey_quicksort, MkqsTask, NoShare,
    ShareWork,
};
pub use radix::{radix_sort, RadixVariant, CI3_THRESHOLD};

/// Number of leading non-terminator characters in a packed key.
#[inline(always)]
pub fn key_depth(key: u64) -> usize {
    8 - (key.trailing_zeros() as usize) / 8
}

/// Number of equal leading characters of two packed keys; 8 if equal.
#[inline(always)]
pub fn key_lcp(a: u64, b: u64) -> usize {
    ((a ^ b).leading_zeros() / 8) as usize
}

/// Whether the 8-character window ends inside the string.
#[inline(always)]
pub fn key_has_terminator(key: u64) -> bool {
    key & 0xff == 0
}
