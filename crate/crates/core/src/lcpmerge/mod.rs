//! LCP-aware merging.
//!
//! Merging sorted sequences together with their LCP arrays lets most
//! comparisons be decided from the stored LCPs alone; characters are only
//! inspected where two candidates share the same LCP with the last output.

mod insertion;
mod kway;

use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

pub use insertion::lcp_insertion_sort;
pub use kway::{kway_lcp_merge, kway_lcp_mergesort, LcpTournamentTree};

use crate::{Counter, LcpArray, Strings};

/// A string handle together with a known LCP against a common smaller string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Player {
    pub idx: usize,
    pub s: usize,
    pub h: usize,
}

/// Result of [`lcp_compare`]: the smaller player with its unchanged LCP, and
/// the larger one with its LCP against the smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub winner: usize,
    pub winner_h: usize,
    pub loser: usize,
    pub loser_h: usize,
}

/// Compares two strings given their LCPs `h_a`, `h_b` with some string `p`
/// that is not larger than either. Characters are only read when the LCPs
/// are equal; `a` wins ties.
pub fn lcp_compare<C: Counter>(st: Strings<'_>, a: Player, b: Player, stats: &mut C) -> Outcome {
    if a.h == b.h {
        let mut h = a.h;
        let (ca, cb) = loop {
            let (ca, cb) = (st.at(a.s, h), st.at(b.s, h));
            if ca == 0 || ca != cb {
                break (ca, cb);
            }
            h += 1;
        };
        stats.char_cmp((h - a.h + 1) as u64);
        stats.string_access(2);
        if ca <= cb {
            Outcome { winner: a.idx, winner_h: a.h, loser: b.idx, loser_h: h }
        } else {
            Outcome { winner: b.idx, winner_h: b.h, loser: a.idx, loser_h: h }
        }
    } else if a.h < b.h {
        Outcome { winner: b.idx, winner_h: b.h, loser: a.idx, loser_h: a.h }
    } else {
        Outcome { winner: a.idx, winner_h: a.h, loser: b.idx, loser_h: b.h }
    }
}

/// A sorted run with its LCP array (entry 0 is ignored) and optionally the
/// cached characters `s_i[h_i]`.
#[derive(Debug, Clone, Copy)]
pub struct MergeStream<'a> {
    pub strings: &'a [usize],
    pub lcp: &'a [usize],
    pub cached: Option<&'a [u8]>,
}

impl<'a> MergeStream<'a> {
    pub fn new(strings: &'a [usize], lcp: &'a [usize]) -> Self {
        assert_eq!(strings.len(), lcp.len());
        Self { strings, lcp, cached: None }
    }

    pub fn with_cached(mut self, cached: &'a [u8]) -> Self {
        assert_eq!(cached.len(), self.strings.len());
        self.cached = Some(cached);
        self
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// Elements `range` as a stream of their own.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Self {
        Self {
            strings: &self.strings[range.clone()],
            lcp: &self.lcp[range.clone()],
            cached: self.cached.map(|c| &c[range]),
        }
    }
}

/// Merges two sorted streams into `out`, writing the output LCP array to
/// `out_lcp` (`out_lcp[0]` receives 0).
pub fn binary_lcp_merge<C: Counter>(
    st: Strings<'_>,
    a: MergeStream<'_>,
    b: MergeStream<'_>,
    out: &mut [usize],
    out_lcp: &mut [usize],
    stats: &mut C,
) {
    assert_eq!(out.len(), a.len() + b.len());
    assert_eq!(out.len(), out_lcp.len());
    let (mut i, mut j, mut k) = (0, 0, 0);
    // LCPs of the current heads with the last output string
    let (mut ha, mut hb) = (0, 0);
    while i < a.len() && j < b.len() {
        let o = lcp_compare(
            st,
            Player { idx: 0, s: a.strings[i], h: ha },
            Player { idx: 1, s: b.strings[j], h: hb },
            stats,
        );
        if o.winner == 0 {
            out[k] = a.strings[i];
            out_lcp[k] = ha;
            i += 1;
            ha = if i < a.len() { a.lcp[i] } else { 0 };
            hb = o.loser_h;
        } else {
            out[k] = b.strings[j];
            out_lcp[k] = hb;
            j += 1;
            hb = if j < b.len() { b.lcp[j] } else { 0 };
            ha = o.loser_h;
        }
        k += 1;
    }
    for (rest, pos, head) in [(&a, i, ha), (&b, j, hb)] {
        if pos < rest.len() {
            let m = rest.len() - pos;
            out[k..k + m].copy_from_slice(&rest.strings[pos..]);
            out_lcp[k] = head;
            out_lcp[k + 1..k + m].copy_from_slice(&rest.lcp[pos + 1..]);
            k += m;
        }
    }
    if !out_lcp.is_empty() {
        out_lcp[0] = 0;
    }
}

/// Top-down binary LCP mergesort.
pub fn binary_lcp_mergesort<C: Counter>(st: Strings<'_>, order: &mut [usize], stats: &mut C) -> LcpArray {
    let n = order.len();
    let mut lcp = vec![0; n];
    let mut tmp = vec![0; n];
    let mut tmp_lcp = vec![0; n];
    stats.aux_alloc(3 * n * size_of::<usize>());
    mergesort_rec(st, order, &mut lcp, &mut tmp, &mut tmp_lcp, stats);
    stats.aux_free(3 * n * size_of::<usize>());
    LcpArray::new(lcp)
}

fn mergesort_rec<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    lcp: &mut [usize],
    tmp: &mut [usize],
    tmp_lcp: &mut [usize],
    stats: &mut C,
) {
    let n = order.len();
    if n <= 1 {
        lcp.iter_mut().for_each(|h| *h = 0);
        return;
    }
    let mid = n / 2;
    {
        let (o1, o2) = order.split_at_mut(mid);
        let (l1, l2) = lcp.split_at_mut(mid);
        let (t1, t2) = tmp.split_at_mut(mid);
        let (tl1, tl2) = tmp_lcp.split_at_mut(mid);
        mergesort_rec(st, o1, l1, t1, tl1, stats);
        mergesort_rec(st, o2, l2, t2, tl2, stats);
    }
    tmp.copy_from_slice(order);
    tmp_lcp.copy_from_slice(lcp);
    binary_lcp_merge(
        st,
        MergeStream::new(&tmp[..mid], &tmp_lcp[..mid]),
        MergeStream::new(&tmp[mid..], &tmp_lcp[mid..]),
        order,
        lcp,
        stats,
    );
}

/// Splits a sorted stream at the first element not smaller than `key`
/// (lower bound).
pub fn lower_bound(st: Strings<'_>, strings: &[usize], key: usize) -> usize {
    strings.partition_point(|&s| st.cmp(s, key) == core::cmp::Ordering::Less)
}

/// Collects the handles of a stream set into a fresh vector.
pub fn concat(streams: &[MergeStream<'_>]) -> Vec<usize> {
    streams.iter().flat_map(|s| s.strings.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strset::{lcp_array_oracle, oracle_sort, StringSet};
    use crate::{NoStats, SortStats};
    use rand::{Rng, SeedableRng};

    #[test]
    fn compare_case_one() {
        let s = StringSet::from_strings(["abc", "abd"]).unwrap();
        let h = s.handles();
        let mut stats = SortStats::new();
        let o = lcp_compare(
            s.strings(),
            Player { idx: 0, s: h[0], h: 2 },
            Player { idx: 1, s: h[1], h: 2 },
            &mut stats,
        );
        assert_eq!((o.winner, o.loser_h), (0, 2));
        assert_eq!(stats.char_cmp, 1);
    }

    #[test]
    fn compare_case_two_needs_no_characters() {
        let s = StringSet::from_strings(["ac", "abz"]).unwrap();
        let h = s.handles();
        let mut stats = SortStats::new();
        let o = lcp_compare(
            s.strings(),
            Player { idx: 0, s: h[0], h: 1 },
            Player { idx: 1, s: h[1], h: 2 },
            &mut stats,
        );
        assert_eq!((o.winner, o.loser_h), (1, 1));
        assert_eq!(stats.char_cmp, 0);
    }

    #[test]
    fn compare_random_triples() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        for _ in 0..10_000 {
            let mut gen = || -> Vec<u8> { (0..rng.gen_range(0..6)).map(|_| rng.gen_range(b'a'..=b'c')).collect() };
            let mut v = [gen(), gen(), gen()];
            v.sort();
            let (p, x, y) = (&v[0], &v[1], &v[2]);
            let (a, b) = if rng.gen() { (x, y) } else { (y, x) };
            let s = StringSet::from_strings([p, a, b]).unwrap();
            let st = s.strings();
            let hs = s.handles();
            let o = lcp_compare(
                st,
                Player { idx: 1, s: hs[1], h: st.lcp(hs[0], hs[1]) },
                Player { idx: 2, s: hs[2], h: st.lcp(hs[0], hs[2]) },
                &mut NoStats,
            );
            let smaller = if st.body(hs[1]) <= st.body(hs[2]) { 1 } else { 2 };
            assert_eq!(o.winner, smaller);
            assert_eq!(o.loser_h, st.lcp(hs[1], hs[2]));
        }
    }

    fn sorted_stream(s: &StringSet, items: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let order = oracle_sort(s.strings(), items);
        let lcp = lcp_array_oracle(s.strings(), &order).unwrap().into_inner();
        (order, lcp)
    }

    #[test]
    fn binary_merge_examples() {
        let s = StringSet::from_strings(["a", "c", "b", "d"]).unwrap();
        let h = s.handles();
        let (a, la) = sorted_stream(&s, &h[..2]);
        let (b, lb) = sorted_stream(&s, &h[2..]);
        let mut out = vec![0; 4];
        let mut lcp = vec![9; 4];
        binary_lcp_merge(s.strings(), MergeStream::new(&a, &la), MergeStream::new(&b, &lb), &mut out, &mut lcp, &mut NoStats);
        assert!(s.values(&out).eq([&b"a"[..], b"b", b"c", b"d"]));
        assert_eq!(lcp, [0, 0, 0, 0]);

        let mut out = vec![0; 2];
        let mut lcp = vec![9; 2];
        binary_lcp_merge(s.strings(), MergeStream::new(&a, &la), MergeStream::new(&[], &[]), &mut out, &mut lcp, &mut NoStats);
        assert_eq!(out, a);
        assert_eq!(&lcp[1..], &la[1..]);
    }

    #[test]
    fn binary_merge_of_identical_runs() {
        let s = StringSet::from_strings(["ab", "abc", "b", "ab", "abc", "b"]).unwrap();
        let h = s.handles();
        let (a, la) = sorted_stream(&s, &h[..3]);
        let (b, lb) = sorted_stream(&s, &h[3..]);
        let mut out = vec![0; 6];
        let mut lcp = vec![0; 6];
        binary_lcp_merge(s.strings(), MergeStream::new(&a, &la), MergeStream::new(&b, &lb), &mut out, &mut lcp, &mut NoStats);
        assert_eq!(lcp, lcp_array_oracle(s.strings(), &out).unwrap().into_inner());
    }

    fn log2_ceil(n: usize) -> u64 {
        if n <= 1 { 0 } else { u64::from(usize::BITS - (n - 1).leading_zeros()) }
    }

    #[test]
    fn mergesort_bound() {
        let s = StringSet::from_strings(["bb", "a", "b", "ab"]).unwrap();
        let mut order = s.handles().to_vec();
        let mut stats = SortStats::new();
        let lcp = binary_lcp_mergesort(s.strings(), &mut order, &mut stats);
        assert_eq!(lcp.sum(), 2);
        assert!(stats.char_cmp <= 2 + 4 * 2);

        let s = StringSet::from_strings(["x"]).unwrap();
        let mut stats = SortStats::new();
        binary_lcp_mergesort(s.strings(), &mut s.handles().to_vec(), &mut stats);
        assert_eq!(stats.char_cmp, 0);

        let mut rng = rand::rngs::StdRng::seed_from_u64(22);
        let items: Vec<Vec<u8>> = (0..10_000)
            .map(|_| (0..rng.gen_range(0..12)).map(|_| rng.gen_range(b'a'..=b'c')).collect())
            .collect();
        let s = StringSet::from_strings(&items).unwrap();
        let mut order = s.handles().to_vec();
        let mut stats = SortStats::new();
        let lcp = binary_lcp_mergesort(s.strings(), &mut order, &mut stats);
        assert_eq!(lcp, lcp_array_oracle(s.strings(), &order).unwrap());
        let n = order.len();
        assert!(stats.char_cmp <= lcp.sum() as u64 + n as u64 * log2_ceil(n));
    }
}
