use alloc::vec;
use alloc::vec::Vec;

use super::SsssError;
use crate::seqsort::{key_has_terminator, key_lcp};

/// Deepest supported tree; bucket ids of `2^16 - 1` buckets still fit a `u16`.
pub const MAX_LEVELS: u32 = 15;

/// Most keys descended side by side.
pub const MAX_INTERLEAVE: usize = 16;

fn check_index(i: usize, levels: u32) -> Result<(), SsssError> {
    if levels == 0 || levels > usize::BITS - 1 || i == 0 || i >= (1usize << levels) {
        Err(SsssError::IndexOutOfRange { index: i, levels })
    } else {
        Ok(())
    }
}

/// Maps a one-based level-order index to the one-based in-order index of the
/// same node in a perfect tree with `levels` levels.
///
/// The bits after the leading one of a level-order index spell the path from
/// the root; shifting them to the top and appending a one marker yields the
/// in-order position.
pub fn pre_of_level(i: usize, levels: u32) -> Result<usize, SsssError> {
    check_index(i, levels)?;
    let node_depth = usize::BITS - 1 - i.leading_zeros();
    let path = i & ((1 << node_depth) - 1);
    let shift = levels - node_depth;
    Ok((path << shift) | (1 << (shift - 1)))
}

/// Inverse of [`pre_of_level`].
pub fn level_of_pre(p: usize, levels: u32) -> Result<usize, SsssError> {
    check_index(p, levels)?;
    let tz = p.trailing_zeros();
    let node_depth = levels - tz - 1;
    Ok((1 << node_depth) | (p >> (tz + 1)))
}

/// Picks `v` ascending splitters from a sorted sample.
///
/// The middle sample of a range becomes a splitter; its neighbors equal to
/// it are skipped before recursing into both sides. A side that runs out of
/// samples is filled with the sample just left of it (or the first sample).
pub fn select_splitters(sample: &[u64], v: usize) -> Result<Vec<u64>, SsssError> {
    if sample.len() < v || (v > 0 && sample.is_empty()) {
        return Err(SsssError::SampleTooSmall { len: sample.len(), needed: v });
    }
    let mut out = vec![0; v];
    fill_range(sample, 0, sample.len() as isize - 1, &mut out);
    Ok(out)
}

fn fill_range(sample: &[u64], a: isize, b: isize, out: &mut [u64]) {
    if out.is_empty() {
        return;
    }
    if a > b {
        let filler = sample[(a - 1).max(0) as usize];
        out.fill(filler);
        return;
    }
    let m = (a + b) / 2;
    let x = sample[m as usize];
    let mut left_end = m - 1;
    while left_end >= a && sample[left_end as usize] == x {
        left_end -= 1;
    }
    let mut right_start = m + 1;
    while right_start <= b && sample[right_start as usize] == x {
        right_start += 1;
    }
    let mid = out.len() / 2;
    let (left, rest) = out.split_at_mut(mid);
    rest[0] = x;
    fill_range(sample, a, left_end, left);
    fill_range(sample, right_start, b, &mut rest[1..]);
}

/// Classification flavors; all produce identical bucket ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassifyVariant {
    /// Stops at a node whose splitter equals the key.
    E,
    /// Descends to a leaf, then tests equality against the stored sorted
    /// splitter array.
    UI,
    /// Like UI, but finds the splitter in the tree array instead of keeping a
    /// second copy.
    #[default]
    UIC,
}

/// Implicit search tree over `v = 2^d - 1` splitters.
#[derive(Debug, Clone)]
pub struct SplitterTree {
    levels: u32,
    /// One-based level order; slot 0 unused.
    tree: Vec<u64>,
    /// Splitters ascending.
    sorted: Vec<u64>,
    /// `lcps[i]` is the LCP of splitters `i - 1` and `i`; both ends are 0.
    lcps: Vec<usize>,
    /// First in-order position holding the same splitter as position `i`.
    leftmost_eq: Vec<u16>,
}

impl SplitterTree {
    /// Builds the tree from `2^levels - 1` ascending splitters.
    pub fn new(sorted: Vec<u64>, levels: u32) -> Result<Self, SsssError> {
        if levels == 0 || levels > MAX_LEVELS {
            return Err(SsssError::BadLevels(levels));
        }
        let v = (1usize << levels) - 1;
        if sorted.len() != v {
            return Err(SsssError::SampleTooSmall { len: sorted.len(), needed: v });
        }
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        let mut tree = vec![0; v + 1];
        for (l, slot) in tree.iter_mut().enumerate().skip(1) {
            *slot = sorted[pre_of_level(l, levels)? - 1];
        }
        let mut lcps = vec![0; v + 1];
        for i in 1..v {
            lcps[i] = key_lcp(sorted[i - 1], sorted[i]);
        }
        let mut leftmost_eq = vec![0u16; v];
        for i in 1..v {
            leftmost_eq[i] = if sorted[i] == sorted[i - 1] { leftmost_eq[i - 1] } else { i as u16 };
        }
        Ok(Self { levels, tree, sorted, lcps, leftmost_eq })
    }

    /// Samples, selects splitters, and builds the tree in one go.
    pub fn from_sample(sample: &mut [u64], levels: u32) -> Result<Self, SsssError> {
        if levels == 0 || levels > MAX_LEVELS {
            return Err(SsssError::BadLevels(levels));
        }
        sample.sort_unstable();
        let splitters = select_splitters(sample, (1 << levels) - 1)?;
        Self::new(splitters, levels)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Number of splitters `v`.
    pub fn splitters(&self) -> usize {
        self.sorted.len()
    }

    /// Number of buckets `2v + 1`.
    pub fn buckets(&self) -> usize {
        2 * self.sorted.len() + 1
    }

    /// Splitter at zero-based in-order position `i`.
    pub fn splitter(&self, i: usize) -> u64 {
        self.sorted[i]
    }

    pub fn sorted_splitters(&self) -> &[u64] {
        &self.sorted
    }

    /// LCP of the splitters bounding even bucket `2i`; 0 at both ends.
    pub fn lcp(&self, i: usize) -> usize {
        self.lcps[i]
    }

    /// Characters every string in bucket `b` shares beyond the step depth.
    pub fn advance(&self, bucket: usize) -> usize {
        if bucket % 2 == 1 {
            crate::WORD_CHARS
        } else {
            self.lcps[bucket / 2]
        }
    }

    /// Whether bucket `b` holds only equal strings ending within the key.
    pub fn is_finished(&self, bucket: usize) -> bool {
        bucket % 2 == 1 && key_has_terminator(self.sorted[bucket / 2])
    }

    #[inline(always)]
    fn leaf_bucket(&self, leaf: usize, key: u64, splitter: u64) -> u16 {
        let j = leaf - (self.sorted.len() + 1);
        (2 * j + (j < self.sorted.len() && splitter == key) as usize) as u16
    }

    #[inline(always)]
    fn classify_e(&self, key: u64) -> u16 {
        let mut i = 1;
        for _ in 0..self.levels {
            let t = self.tree[i];
            if t == key {
                let j = pre_of_level(i, self.levels).unwrap_or(1) - 1;
                return 2 * self.leftmost_eq[j] + 1;
            }
            i = 2 * i + (key > t) as usize;
        }
        (2 * (i - (self.sorted.len() + 1))) as u16
    }

    #[inline(always)]
    fn descend<const UIC: bool>(&self, keys: &[u64], out: &mut [u16]) {
        let mut idx = [1usize; MAX_INTERLEAVE];
        let lanes = keys.len();
        for _ in 0..self.levels {
            for l in 0..lanes {
                let i = idx[l];
                idx[l] = 2 * i + (keys[l] > self.tree[i]) as usize;
            }
        }
        let v = self.sorted.len();
        for l in 0..lanes {
            let j = idx[l] - (v + 1);
            let splitter = if j >= v {
                0
            } else if UIC {
                self.tree[level_of_pre(j + 1, self.levels).unwrap_or(1)]
            } else {
                self.sorted[j]
            };
            out[l] = self.leaf_bucket(idx[l], keys[l], splitter);
        }
    }
}

/// Writes the bucket id of each key to `out`. `interleave` keys are
/// descended side by side (clamped to `1..=16`).
pub fn classify(
    tree: &SplitterTree,
    keys: &[u64],
    out: &mut [u16],
    variant: ClassifyVariant,
    interleave: usize,
) {
    assert_eq!(keys.len(), out.len());
    let y = interleave.clamp(1, MAX_INTERLEAVE);
    match variant {
        ClassifyVariant::E => {
            for (o, &k) in out.iter_mut().zip(keys) {
                *o = tree.classify_e(k);
            }
        }
        ClassifyVariant::UI => {
            for (kc, oc) in keys.chunks(y).zip(out.chunks_mut(y)) {
                tree.descend::<false>(kc, oc);
            }
        }
        ClassifyVariant::UIC => {
            for (kc, oc) in keys.chunks(y).zip(out.chunks_mut(y)) {
                tree.descend::<true>(kc, oc);
            }
        }
    }
}
