#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stringsort_core::StringSet;

/// Random byte strings with lengths in `0..max_len` over `lo..=hi`.
pub fn random_items(n: usize, max_len: usize, lo: u8, hi: u8, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| (0..rng.gen_range(0..max_len.max(1))).map(|_| rng.gen_range(lo..=hi)).collect()).collect()
}

pub fn set(items: &[Vec<u8>]) -> StringSet {
    StringSet::from_strings(items).unwrap()
}

/// Sorted copy of the items by plain byte comparison.
pub fn naive_sorted(items: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut v = items.to_vec();
    v.sort();
    v
}

fn common(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Adjacent LCPs of sorted items; entry 0 is 0.
pub fn naive_lcps(sorted: &[Vec<u8>]) -> Vec<usize> {
    let mut h = vec![0; sorted.len()];
    for i in 1..sorted.len() {
        h[i] = common(&sorted[i - 1], &sorted[i]);
    }
    h
}

/// (L, D) of the items: LCP sum and distinguishing prefix size, counting
/// the terminator of strings that are prefixes of a neighbor.
pub fn naive_l_d(items: &[Vec<u8>]) -> (usize, usize) {
    let sorted = naive_sorted(items);
    let h = naive_lcps(&sorted);
    let n = sorted.len();
    let l = h.iter().sum();
    let d = (0..n)
        .map(|i| {
            let left = if i > 0 { h[i] } else { 0 };
            let right = if i + 1 < n { h[i + 1] } else { 0 };
            (left.max(right) + 1).min(sorted[i].len() + 1)
        })
        .sum();
    (l, d)
}

pub fn log2_ceil(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}
