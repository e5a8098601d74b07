use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

use super::{insertion_sort, key_depth, key_has_terminator, key_lcp};
use crate::{Counter, Strings, INSERTION_THRESHOLD, WORD_CHARS};

/// Index of the median of three values; ties go to the middle one.
#[inline]
fn median3<T: Ord>(a: T, b: T, c: T) -> usize {
    if (a <= b && b <= c) || (c <= b && b <= a) {
        1
    } else if (b <= a && a <= c) || (c <= a && a <= b) {
        0
    } else {
        2
    }
}

/// Multikey quicksort, one character per partitioning step.
pub fn multikey_quicksort<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    depth: usize,
    stats: &mut C,
) {
    let mut stack: Vec<(&mut [usize], usize)> = vec![(order, depth)];
    let mut peak = 0;
    while let Some((region, h)) = stack.pop() {
        let n = region.len();
        if n < INSERTION_THRESHOLD {
            insertion_sort(st, region, h, stats);
            continue;
        }
        let probe = [0, n / 2, n - 1];
        let pc = probe.map(|i| st.at(region[i], h));
        stats.string_access(3);
        let pivot = pc[median3(pc[0], pc[1], pc[2])];

        let (mut lt, mut i, mut gt) = (0, 0, n);
        while i < gt {
            let c = st.at(region[i], h);
            if c < pivot {
                region.swap(lt, i);
                lt += 1;
                i += 1;
            } else if c > pivot {
                gt -= 1;
                region.swap(i, gt);
            } else {
                i += 1;
            }
        }
        stats.char_cmp(n as u64);
        stats.string_access(n as u64);

        let (less, rest) = region.split_at_mut(lt);
        let (equal, greater) = rest.split_at_mut(gt - lt);
        if greater.len() > 1 {
            stack.push((greater, h));
        }
        if pivot != 0 && equal.len() > 1 {
            stack.push((equal, h + 1));
        }
        if less.len() > 1 {
            stack.push((less, h));
        }
        if C::ENABLED && stack.len() > peak {
            stats.aux_alloc((stack.len() - peak) * size_of::<(usize, usize, usize)>());
            peak = stack.len();
        }
    }
    stats.aux_free(peak * size_of::<(usize, usize, usize)>());
}

/// A region for caching multikey quicksort. `cache[i]` must hold the key of
/// `order[i]` at `depth`. When `lcp` is present, the sorter fills entries
/// `1..` with absolute LCPs of adjacent strings; entry 0 belongs to whoever
/// owns the left neighbor.
pub struct MkqsTask<'a, 'c> {
    pub order: &'a mut [usize],
    pub cache: &'c mut [u64],
    pub lcp: Option<&'a mut [usize]>,
    pub depth: usize,
}

impl<'a, 'c> MkqsTask<'a, 'c> {
    fn split_at(self, mid: usize) -> (Self, Self) {
        let (o1, o2) = self.order.split_at_mut(mid);
        let (c1, c2) = self.cache.split_at_mut(mid);
        let (l1, l2) = match self.lcp {
            Some(l) => {
                let (a, b) = l.split_at_mut(mid);
                (Some(a), Some(b))
            }
            None => (None, None),
        };
        (
            MkqsTask { order: o1, cache: c1, lcp: l1, depth: self.depth },
            MkqsTask { order: o2, cache: c2, lcp: l2, depth: self.depth },
        )
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    fn set_lcp(&mut self, i: usize, value: usize) {
        if let Some(l) = self.lcp.as_deref_mut() {
            l[i] = value;
        }
    }

    /// Loads keys at `depth + 8` and descends one word.
    fn advance<C: Counter>(&mut self, st: Strings<'_>, stats: &mut C) {
        self.depth += WORD_CHARS;
        for (k, &s) in self.cache.iter_mut().zip(self.order.iter()) {
            *k = st.key(s, self.depth);
        }
        stats.string_access(self.order.len() as u64);
    }
}

/// Receives pending regions when other workers are idle. The cache slice of
/// a shared task only lives for the call, so receivers copy it.
pub trait ShareWork<'a> {
    /// Whether the sorter should hand off a region now.
    fn wants_work(&self) -> bool;
    fn share(&mut self, task: MkqsTask<'a, '_>);
}

/// Never shares.
pub struct NoShare;

impl<'a> ShareWork<'a> for NoShare {
    #[inline(always)]
    fn wants_work(&self) -> bool {
        false
    }

    fn share(&mut self, _task: MkqsTask<'a, '_>) {
        unreachable!("NoShare never asks for work")
    }
}

/// Caching multikey quicksort over a handle slice.
pub fn caching_mkqs<C: Counter>(st: Strings<'_>, order: &mut [usize], depth: usize, stats: &mut C) {
    let mut cache = fill_cache(st, order, depth, stats);
    caching_mkqs_task(
        st,
        MkqsTask { order, cache: &mut cache, lcp: None, depth },
        stats,
        &mut NoShare,
    );
    stats.aux_free(cache.len() * size_of::<u64>());
}

/// Caching multikey quicksort that also fills `lcp[1..]`.
pub fn caching_mkqs_lcp<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    lcp: &mut [usize],
    depth: usize,
    stats: &mut C,
) {
    assert_eq!(order.len(), lcp.len());
    let mut cache = fill_cache(st, order, depth, stats);
    caching_mkqs_task(
        st,
        MkqsTask { order, cache: &mut cache, lcp: Some(lcp), depth },
        stats,
        &mut NoShare,
    );
    stats.aux_free(cache.len() * size_of::<u64>());
}

/// Caching multikey quicksort that may hand pending regions to `share`.
pub fn caching_mkqs_shared<'a, C: Counter, W: ShareWork<'a>>(
    st: Strings<'_>,
    order: &'a mut [usize],
    lcp: Option<&'a mut [usize]>,
    depth: usize,
    stats: &mut C,
    share: &mut W,
) {
    let mut cache = fill_cache(st, order, depth, stats);
    let len = cache.len();
    caching_mkqs_task(st, MkqsTask { order, cache: &mut cache, lcp, depth }, stats, share);
    stats.aux_free(len * size_of::<u64>());
}

fn fill_cache<C: Counter>(st: Strings<'_>, order: &[usize], depth: usize, stats: &mut C) -> Vec<u64> {
    stats.aux_alloc(order.len() * size_of::<u64>());
    stats.string_access(order.len() as u64);
    order.iter().map(|&s| st.key(s, depth)).collect()
}

/// Runs caching multikey quicksort on a prepared region. Pending subregions
/// may be handed to `share` whenever it asks for work; the largest pending
/// region goes first.
pub fn caching_mkqs_task<'a, 'c, C: Counter, W: ShareWork<'a>>(
    st: Strings<'_>,
    task: MkqsTask<'a, 'c>,
    stats: &mut C,
    share: &mut W,
) {
    let mut stack: VecDeque<MkqsTask<'a, 'c>> = VecDeque::new();
    stack.push_back(task);
    let mut peak = 0;
    while let Some(mut t) = stack.pop_back() {
        if t.len() < INSERTION_THRESHOLD {
            key_insertion_sort(st, t, stats, &mut stack);
        } else {
            partition_step(st, &mut t, stats, &mut stack);
        }
        if C::ENABLED && stack.len() > peak {
            stats.aux_alloc((stack.len() - peak) * size_of::<MkqsTask<'_, '_>>());
            peak = stack.len();
        }
        while stack.len() > 1 && share.wants_work() {
            let bottom = stack.pop_front().expect("non-empty");
            share.share(bottom);
        }
    }
    stats.aux_free(peak * size_of::<MkqsTask<'_, '_>>());
}

fn partition_step<'a, 'c, C: Counter>(
    st: Strings<'_>,
    t: &mut MkqsTask<'a, 'c>,
    stats: &mut C,
    stack: &mut VecDeque<MkqsTask<'a, 'c>>,
) {
    let n = t.len();
    let h = t.depth;
    let cache = &mut *t.cache;
    let order = &mut *t.order;
    let pivot = [cache[0], cache[n / 2], cache[n - 1]][median3(cache[0], cache[n / 2], cache[n - 1])];

    let (mut lt, mut i, mut gt) = (0, 0, n);
    let (mut max_lt, mut min_gt) = (0u64, u64::MAX);
    while i < gt {
        let k = cache[i];
        if k < pivot {
            max_lt = max_lt.max(k);
            cache.swap(lt, i);
            order.swap(lt, i);
            lt += 1;
            i += 1;
        } else if k > pivot {
            min_gt = min_gt.min(k);
            gt -= 1;
            cache.swap(i, gt);
            order.swap(i, gt);
        } else {
            i += 1;
        }
    }
    stats.char_cmp(n as u64);

    let whole = MkqsTask {
        order: core::mem::take(&mut t.order),
        cache: core::mem::take(&mut t.cache),
        lcp: t.lcp.take(),
        depth: h,
    };
    let (less, rest) = whole.split_at(lt);
    let (mut equal, mut greater) = rest.split_at(gt - lt);
    if lt > 0 {
        equal.set_lcp(0, h + key_lcp(max_lt, pivot));
    }
    if gt < n {
        greater.set_lcp(0, h + key_lcp(pivot, min_gt));
    }
    if greater.len() > 1 {
        stack.push_back(greater);
    }
    push_equal_run(st, equal, pivot, stats, stack);
    if less.len() > 1 {
        stack.push_back(less);
    }
}

/// Handles a run whose keys all equal `key`: finished if the key ends the
/// strings, otherwise queued one word deeper.
fn push_equal_run<'a, 'c, C: Counter>(
    st: Strings<'_>,
    mut run: MkqsTask<'a, 'c>,
    key: u64,
    stats: &mut C,
    stack: &mut VecDeque<MkqsTask<'a, 'c>>,
) {
    if key_has_terminator(key) {
        let full = run.depth + key_depth(key);
        if let Some(l) = run.lcp.as_deref_mut() {
            l.iter_mut().skip(1).for_each(|x| *x = full);
        }
    } else if run.len() > 1 {
        run.advance(st, stats);
        stack.push_back(run);
    }
}

/// Base case: stable insertion sort by cached key, then runs of equal keys
/// are finished or queued one word deeper.
fn key_insertion_sort<'a, 'c, C: Counter>(
    st: Strings<'_>,
    t: MkqsTask<'a, 'c>,
    stats: &mut C,
    stack: &mut VecDeque<MkqsTask<'a, 'c>>,
) {
    let n = t.len();
    let mut compares = 0u64;
    for j in 1..n {
        let (k, s) = (t.cache[j], t.order[j]);
        let mut i = j;
        while i > 0 {
            compares += 1;
            if t.cache[i - 1] <= k {
                break;
            }
            t.cache[i] = t.cache[i - 1];
            t.order[i] = t.order[i - 1];
            i -= 1;
        }
        t.cache[i] = k;
        t.order[i] = s;
    }
    stats.char_cmp(compares);

    let h = t.depth;
    let mut rest = t;
    while rest.len() > 0 {
        let key = rest.cache[0];
        let run_len = rest.cache.iter().take_while(|&&k| k == key).count();
        let next_key = rest.cache.get(run_len).copied();
        let (run, mut tail) = rest.split_at(run_len);
        if let Some(next) = next_key {
            tail.set_lcp(0, h + key_lcp(key, next));
        }
        push_equal_run(st, run, key, stats, stack);
        rest = tail;
    }
}
