use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

use super::{binary_lcp_mergesort, lcp_compare, MergeStream, Player};
use crate::{Counter, LcpArray, Strings};

#[derive(Debug, Clone, Copy, Default)]
struct Node {
    /// Losing stream, one-based.
    stream: usize,
    h: usize,
    /// `s[h]` of the losing stream's head; only kept in caching mode.
    c: u8,
}

/// Loser tree over `K` sorted streams that tracks LCPs.
///
/// Nodes are one-based: node 1 holds the overall winner, nodes `2..=K` the
/// games, and stream `k` enters as leaf `K + k`. Exhausted streams act as an
/// infinite string. Equal strings leave the tree in stream order.
pub struct LcpTournamentTree<'s, 'a> {
    st: Strings<'s>,
    streams: Vec<MergeStream<'a>>,
    cursor: Vec<usize>,
    nodes: Vec<Node>,
    k: usize,
    remaining: usize,
    use_cached: bool,
}

impl<'s, 'a> LcpTournamentTree<'s, 'a> {
    /// Builds the tree. All strings share `hbar` leading characters. In
    /// caching mode every stream needs cached characters.
    pub fn new<C: Counter>(
        st: Strings<'s>,
        streams: &[MergeStream<'a>],
        hbar: usize,
        use_cached: bool,
        stats: &mut C,
    ) -> Self {
        let k = streams.len().max(1).next_power_of_two();
        let mut padded = Vec::with_capacity(k + 1);
        // slot 0 unused so that stream ids match the one-based formulas
        padded.push(MergeStream::new(&[], &[]));
        padded.extend_from_slice(streams);
        padded.resize(k + 1, MergeStream::new(&[], &[]));
        if use_cached {
            assert!(streams.iter().all(|s| s.cached.is_some() || s.is_empty()));
        }
        let mut tree = Self {
            st,
            remaining: streams.iter().map(|s| s.len()).sum(),
            streams: padded,
            cursor: vec![0; k + 1],
            nodes: vec![Node::default(); k + 1],
            k,
            use_cached,
        };
        stats.aux_alloc(tree.nodes.len() * size_of::<Node>() + tree.cursor.len() * size_of::<usize>());
        for s in 1..=k {
            let mut x = tree.head_node(s, hbar, stats);
            let mut v = k + s;
            while v % 2 == 0 && v > 2 {
                v /= 2;
                x = tree.play(v, x, stats);
            }
            v = v.div_ceil(2);
            tree.nodes[v] = x;
        }
        tree
    }

    /// Number of strings not yet output.
    pub fn remaining(&self) -> usize {
        self.remaining
    }

    /// Per stream, the index of the first element not yet output.
    pub fn cursors(&self) -> &[usize] {
        &self.cursor[1..]
    }

    /// Node for the first element of stream `s`, whose LCP with the common
    /// smaller string is `h`.
    fn head_node<C: Counter>(&self, s: usize, h: usize, stats: &mut C) -> Node {
        let c = match self.streams[s].strings.first() {
            Some(&x) if self.use_cached => {
                stats.string_access(1);
                self.st.at(x, h)
            }
            _ => 0,
        };
        Node { stream: s, h, c }
    }

    fn exhausted(&self, s: usize) -> bool {
        self.cursor[s] >= self.streams[s].len()
    }

    fn head(&self, s: usize) -> usize {
        self.streams[s].strings[self.cursor[s]]
    }

    /// Plays the moving node `x` against the loser stored at `v`; the loser
    /// stays, the winner is returned.
    #[inline]
    fn play<C: Counter>(&mut self, v: usize, x: Node, stats: &mut C) -> Node {
        let y = self.nodes[v];
        let (x_inf, y_inf) = (self.exhausted(x.stream), self.exhausted(y.stream));
        if x_inf || y_inf {
            // the infinite string loses; between two of them the lower id wins
            let x_wins = !x_inf || (y_inf && x.stream < y.stream);
            return if x_wins { x } else { self.nodes[v] = x; y };
        }
        // lower stream id plays first so it wins ties
        let (a, b) = if x.stream < y.stream { (x, y) } else { (y, x) };
        let (winner, loser) = if self.use_cached {
            self.game_cached(a, b, stats)
        } else {
            let o = lcp_compare(
                self.st,
                Player { idx: 0, s: self.head(a.stream), h: a.h },
                Player { idx: 1, s: self.head(b.stream), h: b.h },
                stats,
            );
            let (mut w, mut l) = if o.winner == 0 { (a, b) } else { (b, a) };
            w.h = o.winner_h;
            l.h = o.loser_h;
            (w, l)
        };
        self.nodes[v] = loser;
        winner
    }

    fn game_cached<C: Counter>(&self, a: Node, b: Node, stats: &mut C) -> (Node, Node) {
        if a.h != b.h {
            return if a.h > b.h { (a, b) } else { (b, a) };
        }
        stats.char_cmp(1);
        if a.c != b.c {
            return if a.c < b.c { (a, b) } else { (b, a) };
        }
        if a.c == 0 {
            return (a, b);
        }
        let (sa, sb) = (self.head(a.stream), self.head(b.stream));
        let mut h = a.h + 1;
        let (ca, cb) = loop {
            let (ca, cb) = (self.st.at(sa, h), self.st.at(sb, h));
            if ca == 0 || ca != cb {
                break (ca, cb);
            }
            h += 1;
        };
        stats.char_cmp((h - a.h) as u64);
        stats.string_access(2);
        if ca <= cb {
            (a, Node { stream: b.stream, h, c: cb })
        } else {
            (b, Node { stream: a.stream, h, c: ca })
        }
    }

    /// Emits the smallest remaining string as `(handle, lcp, cached char)`,
    /// where the LCP refers to the previously emitted string (`hbar` for the
    /// first) and the cached char is the string's character at that LCP (0
    /// unless caching).
    pub fn next<C: Counter>(&mut self, stats: &mut C) -> Option<(usize, usize, u8)> {
        if self.remaining == 0 {
            return None;
        }
        let top = self.nodes[1];
        let w = top.stream;
        let out = (self.head(w), top.h, top.c);
        self.remaining -= 1;
        self.cursor[w] += 1;
        if self.remaining > 0 {
            let mut x = if self.exhausted(w) {
                Node { stream: w, h: 0, c: 0 }
            } else {
                let i = self.cursor[w];
                let s = &self.streams[w];
                Node { stream: w, h: s.lcp[i], c: s.cached.map_or(0, |c| c[i]) }
            };
            let mut v = self.k + w;
            while v > 2 {
                v = v.div_ceil(2);
                x = self.play(v, x, stats);
            }
            self.nodes[1] = x;
            #[cfg(debug_assertions)]
            self.check_winner_path();
        }
        Some(out)
    }

    /// Stored LCPs on the winner's path equal the LCP with the winner.
    #[cfg(debug_assertions)]
    fn check_winner_path(&self) {
        let w = self.nodes[1].stream;
        if self.exhausted(w) {
            return;
        }
        let mut v = self.k + w;
        while v > 2 {
            v = v.div_ceil(2);
            let y = self.nodes[v];
            if !self.exhausted(y.stream) {
                debug_assert_eq!(y.h, self.st.lcp(self.head(w), self.head(y.stream)));
            }
        }
    }

    pub fn release<C: Counter>(self, stats: &mut C) {
        stats.aux_free(self.nodes.len() * size_of::<Node>() + self.cursor.len() * size_of::<usize>());
    }
}

/// Merges sorted streams sharing `hbar` leading characters into `out`,
/// writing the LCP array and, if `out_cached` is given, `s_i[h_i]` for every
/// output position. `out_lcp[0]` receives `hbar`.
pub fn kway_lcp_merge<C: Counter>(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    hbar: usize,
    out: &mut [usize],
    out_lcp: &mut [usize],
    mut out_cached: Option<&mut [u8]>,
    use_cached: bool,
    stats: &mut C,
) {
    let n: usize = streams.iter().map(|s| s.len()).sum();
    assert_eq!(out.len(), n);
    assert_eq!(out_lcp.len(), n);
    let mut tree = LcpTournamentTree::new(st, streams, hbar, use_cached, stats);
    let mut j = 0;
    while let Some((s, h, c)) = tree.next(stats) {
        out[j] = s;
        out_lcp[j] = h;
        if let Some(oc) = out_cached.as_deref_mut() {
            oc[j] = if use_cached {
                c
            } else {
                stats.string_access(1);
                st.at(s, h)
            };
        }
        j += 1;
    }
    tree.release(stats);
}

/// K-way LCP mergesort; runs below `k` strings use binary LCP mergesort.
pub fn kway_lcp_mergesort<C: Counter>(st: Strings<'_>, order: &mut [usize], k: usize, stats: &mut C) -> LcpArray {
    assert!(k >= 2 && k.is_power_of_two(), "K must be a power of two >= 2");
    let n = order.len();
    let mut lcp = vec![0; n];
    let mut tmp = vec![0; n];
    let mut tmp_lcp = vec![0; n];
    stats.aux_alloc(3 * n * size_of::<usize>());
    kway_rec(st, order, &mut lcp, &mut tmp, &mut tmp_lcp, k, stats);
    stats.aux_free(3 * n * size_of::<usize>());
    LcpArray::new(lcp)
}

fn kway_rec<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    lcp: &mut [usize],
    tmp: &mut [usize],
    tmp_lcp: &mut [usize],
    k: usize,
    stats: &mut C,
) {
    let n = order.len();
    if n < k {
        let l = binary_lcp_mergesort(st, order, stats);
        lcp.copy_from_slice(&l);
        return;
    }
    let bounds: Vec<usize> = (0..=k).map(|i| i * n / k).collect();
    {
        let (mut o, mut l, mut t, mut tl) = (&mut *order, &mut *lcp, &mut *tmp, &mut *tmp_lcp);
        for w in bounds.windows(2) {
            let len = w[1] - w[0];
            let (o1, o2) = o.split_at_mut(len);
            let (l1, l2) = l.split_at_mut(len);
            let (t1, t2) = t.split_at_mut(len);
            let (tl1, tl2) = tl.split_at_mut(len);
            kway_rec(st, o1, l1, t1, tl1, k, stats);
            (o, l, t, tl) = (o2, l2, t2, tl2);
        }
    }
    tmp.copy_from_slice(order);
    tmp_lcp.copy_from_slice(lcp);
    let streams: Vec<MergeStream<'_>> = bounds
        .windows(2)
        .map(|w| MergeStream::new(&tmp[w[0]..w[1]], &tmp_lcp[w[0]..w[1]]))
        .collect();
    kway_lcp_merge(st, &streams, 0, order, lcp, None, false, stats);
}
