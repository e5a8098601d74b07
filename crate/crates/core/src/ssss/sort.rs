use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{classify, ClassifyVariant, SplitterTree, MAX_INTERLEAVE};
use crate::lcpmerge::lcp_insertion_sort;
use crate::seqsort::{caching_mkqs, caching_mkqs_lcp, insertion_sort, key_depth, key_lcp};
use crate::{Counter, LcpArray, Strings, INSERTION_THRESHOLD};

/// Tuning and output options of string sample sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S5Config {
    /// Tree levels `d`; the tree holds `2^d - 1` splitters.
    pub levels: u32,
    pub variant: ClassifyVariant,
    /// Keys descended side by side.
    pub interleave: usize,
    /// Regions at least this large take a sample sort step (`t_m`).
    pub sample_threshold: usize,
    /// Regions below this use insertion sort, larger ones caching multikey
    /// quicksort (`t_i`).
    pub insertion_threshold: usize,
    /// Also produce the LCP array.
    pub emit_lcp: bool,
    /// Also produce `s_i[h_i]` for every output position.
    pub emit_cached_char: bool,
    /// Seed of the sampling generator.
    pub seed: u64,
}

impl Default for S5Config {
    fn default() -> Self {
        Self {
            levels: 10,
            variant: ClassifyVariant::UIC,
            interleave: 4,
            sample_threshold: 1 << 20,
            insertion_threshold: INSERTION_THRESHOLD,
            emit_lcp: false,
            emit_cached_char: false,
            seed: 0x5eed_5eed,
        }
    }
}

impl S5Config {
    /// Number of sample keys drawn per step: `αv + α - 1` with `α = 2`.
    pub fn sample_size(&self) -> usize {
        2 * ((1usize << self.levels) - 1) + 1
    }
}

/// Bucket sizes and per-bucket facts produced by one distribution step.
#[derive(Debug, Clone)]
pub struct BucketLayout {
    pub tree: SplitterTree,
    pub counts: Vec<usize>,
    /// Exclusive prefix sums of `counts`.
    pub offsets: Vec<usize>,
    /// Smallest and largest key seen per bucket; empty unless tracked.
    pub min_key: Vec<u64>,
    pub max_key: Vec<u64>,
}

impl BucketLayout {
    /// Assembles a layout from bucket counts and optional per-bucket key
    /// extremes.
    pub fn new(tree: SplitterTree, counts: Vec<usize>, keys: Option<(Vec<u64>, Vec<u64>)>) -> Self {
        let mut offsets = Vec::with_capacity(counts.len());
        let mut sum = 0;
        for &c in &counts {
            offsets.push(sum);
            sum += c;
        }
        let (min_key, max_key) = keys.unwrap_or_default();
        Self { tree, counts, offsets, min_key, max_key }
    }

    pub fn buckets(&self) -> usize {
        self.counts.len()
    }

    /// Common prefix of bucket `b` beyond the step depth.
    pub fn advance(&self, b: usize) -> usize {
        self.tree.advance(b)
    }

    /// Whether bucket `b` is already sorted (equal strings ending in the key).
    pub fn is_finished(&self, b: usize) -> bool {
        self.tree.is_finished(b)
    }

    /// Writes LCPs at bucket boundaries and inside finished buckets. Needs
    /// tracked key extremes. Entry 0 of the region is left alone.
    pub fn fill_lcp(&self, lcp: &mut [usize], depth: usize) {
        assert!(!self.min_key.is_empty(), "key extremes were not tracked");
        let mut prev: Option<u64> = None;
        for b in 0..self.counts.len() {
            let (start, len) = (self.offsets[b], self.counts[b]);
            if len == 0 {
                continue;
            }
            if let Some(p) = prev {
                lcp[start] = depth + key_lcp(p, self.min_key[b]);
            }
            if self.is_finished(b) {
                let full = depth + key_depth(self.tree.splitter(b / 2));
                lcp[start + 1..start + len].fill(full);
            }
            prev = Some(self.max_key[b]);
        }
    }
}

/// Draws a sample of keys from `data` and builds the splitter tree.
pub fn sample_tree<C: Counter, R: RngCore>(
    st: Strings<'_>,
    data: &[usize],
    depth: usize,
    config: &S5Config,
    rng: &mut R,
    stats: &mut C,
) -> SplitterTree {
    let m = config.sample_size();
    let mut sample: Vec<u64> = (0..m).map(|_| st.key(data[rng.gen_range(0..data.len())], depth)).collect();
    stats.string_access(m as u64);
    SplitterTree::from_sample(&mut sample, config.levels).expect("levels checked by caller")
}

/// Classifies `data` into `oracle` and returns per-bucket counts, plus key
/// extremes when `track` is set.
pub fn classify_region<C: Counter>(
    st: Strings<'_>,
    data: &[usize],
    depth: usize,
    tree: &SplitterTree,
    config: &S5Config,
    oracle: &mut [u16],
    track: bool,
    stats: &mut C,
) -> (Vec<usize>, Option<(Vec<u64>, Vec<u64>)>) {
    let k = tree.buckets();
    let mut counts = vec![0usize; k];
    let mut extremes = track.then(|| (vec![u64::MAX; k], vec![0u64; k]));
    let mut keys = [0u64; MAX_INTERLEAVE];
    let y = config.interleave.clamp(1, MAX_INTERLEAVE);
    for (dc, oc) in data.chunks(y).zip(oracle.chunks_mut(y)) {
        for (key, &s) in keys.iter_mut().zip(dc) {
            *key = st.key(s, depth);
        }
        classify(tree, &keys[..dc.len()], oc, config.variant, y);
        if let Some((lo, hi)) = extremes.as_mut() {
            for (&b, &key) in oc.iter().zip(&keys) {
                lo[b as usize] = lo[b as usize].min(key);
                hi[b as usize] = hi[b as usize].max(key);
            }
        }
    }
    stats.string_access(data.len() as u64);
    stats.char_cmp(data.len() as u64 * u64::from(config.levels));
    for &b in oracle.iter() {
        counts[b as usize] += 1;
    }
    (counts, extremes)
}

/// One distribution step: sample, classify into a bucket oracle, count,
/// and move `data` into `out` bucket by bucket.
pub fn s5_step<C: Counter, R: RngCore>(
    st: Strings<'_>,
    data: &[usize],
    out: &mut [usize],
    depth: usize,
    config: &S5Config,
    rng: &mut R,
    stats: &mut C,
) -> BucketLayout {
    assert_eq!(data.len(), out.len());
    assert!(!data.is_empty());
    let tree = sample_tree(st, data, depth, config, rng, stats);
    let mut oracle = vec![0u16; data.len()];
    stats.aux_alloc(oracle.len() * size_of::<u16>());
    let (counts, extremes) =
        classify_region(st, data, depth, &tree, config, &mut oracle, config.emit_lcp, stats);
    let layout = BucketLayout::new(tree, counts, extremes);
    let mut pos = layout.offsets.clone();
    for (&s, &b) in data.iter().zip(&oracle) {
        out[pos[b as usize]] = s;
        pos[b as usize] += 1;
    }
    stats.aux_free(oracle.len() * size_of::<u16>());
    layout
}

/// Result extras of [`seq_s5`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct S5Output {
    pub lcp: Option<LcpArray>,
    pub cached_chars: Option<Vec<u8>>,
}

/// Sequential string sample sort of `order`.
pub fn seq_s5<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    config: &S5Config,
    stats: &mut C,
) -> S5Output {
    let n = order.len();
    let want_lcp = config.emit_lcp || config.emit_cached_char;
    let mut lcp = if want_lcp { vec![0; n] } else { Vec::new() };
    let mut shadow = vec![0; n];
    stats.aux_alloc((shadow.len() + lcp.len()) * size_of::<usize>());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cfg = config.clone();
    cfg.emit_lcp = want_lcp;
    s5_sort_region(
        st,
        order,
        &mut shadow,
        want_lcp.then_some(&mut lcp[..]),
        0,
        &cfg,
        &mut rng,
        stats,
    );
    stats.aux_free((shadow.len() + lcp.len()) * size_of::<usize>());
    let cached_chars = config.emit_cached_char.then(|| cached_chars(st, order, &lcp));
    S5Output { lcp: config.emit_lcp.then(|| LcpArray::new(lcp)), cached_chars }
}

/// `s_i[h_i]` per position, with `h_0 = 0`.
pub fn cached_chars(st: Strings<'_>, order: &[usize], lcp: &[usize]) -> Vec<u8> {
    order
        .iter()
        .enumerate()
        .map(|(i, &s)| st.at(s, if i == 0 { 0 } else { lcp[i] }))
        .collect()
}

struct Task<'a> {
    data: &'a mut [usize],
    other: &'a mut [usize],
    lcp: Option<&'a mut [usize]>,
    depth: usize,
    in_output: bool,
}

/// Sorts a region whose strings share `depth` characters. `shadow` is
/// scratch space of the same length. With `lcp`, entries `1..` receive
/// absolute LCPs.
pub fn s5_sort_region<C: Counter, R: RngCore>(
    st: Strings<'_>,
    order: &mut [usize],
    shadow: &mut [usize],
    lcp: Option<&mut [usize]>,
    depth: usize,
    config: &S5Config,
    rng: &mut R,
    stats: &mut C,
) {
    assert_eq!(order.len(), shadow.len());
    let track = lcp.is_some();
    let mut cfg = config.clone();
    cfg.emit_lcp = track;
    let mut stack = vec![Task { data: order, other: shadow, lcp, depth, in_output: true }];
    while let Some(t) = stack.pop() {
        let n = t.data.len();
        if n < cfg.sample_threshold.max(2) {
            let (out, lcp) = if t.in_output {
                (t.data, t.lcp)
            } else {
                t.other.copy_from_slice(t.data);
                (t.other, t.lcp)
            };
            sort_small(st, out, lcp, t.depth, &cfg, stats);
            continue;
        }
        let layout = s5_step(st, t.data, t.other, t.depth, &cfg, rng, stats);
        let mut lcp = t.lcp;
        if let Some(l) = lcp.as_deref_mut() {
            layout.fill_lcp(l, t.depth);
        }
        let (mut src, mut dst) = (t.other, t.data);
        let child_in_output = !t.in_output;
        for b in 0..layout.buckets() {
            let c = layout.counts[b];
            if c == 0 {
                continue;
            }
            let (s_piece, s_rest) = core::mem::take(&mut src).split_at_mut(c);
            let (d_piece, d_rest) = core::mem::take(&mut dst).split_at_mut(c);
            src = s_rest;
            dst = d_rest;
            let l_piece = lcp.take().map(|l| {
                let (a, rest) = l.split_at_mut(c);
                lcp = Some(rest);
                a
            });
            let child_depth = t.depth + layout.advance(b);
            if c == 1 || layout.is_finished(b) {
                if !child_in_output {
                    d_piece.copy_from_slice(s_piece);
                }
            } else {
                debug_assert!(shares_prefix(st, s_piece, child_depth));
                stack.push(Task {
                    data: s_piece,
                    other: d_piece,
                    lcp: l_piece,
                    depth: child_depth,
                    in_output: child_in_output,
                });
            }
        }
    }
}

fn sort_small<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    lcp: Option<&mut [usize]>,
    depth: usize,
    config: &S5Config,
    stats: &mut C,
) {
    match lcp {
        Some(l) if order.len() >= config.insertion_threshold => {
            caching_mkqs_lcp(st, order, l, depth, stats)
        }
        Some(l) => lcp_insertion_sort(st, order, l, depth, stats),
        None if order.len() >= config.insertion_threshold => caching_mkqs(st, order, depth, stats),
        None => insertion_sort(st, order, depth, stats),
    }
}

fn shares_prefix(st: Strings<'_>, region: &[usize], depth: usize) -> bool {
    region.iter().all(|&s| st.lcp_from(region[0], s, 0) >= depth)
}
