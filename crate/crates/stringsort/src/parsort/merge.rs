//! Parallel K-way LCP merging.
//!
//! The input streams are cut into many more independent merge jobs than
//! there are workers; a job holds one range per stream and produces one
//! contiguous piece of the output. LCPs at job boundaries are fixed up after
//! all jobs ran.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringsort_core::lcpmerge::{binary_lcp_merge, LcpTournamentTree, MergeStream};
use stringsort_core::seqsort::{key_depth, multikey_quicksort};
use stringsort_core::ssss::S5Config;
use stringsort_core::{LcpArray, NoStats, Strings, WORD_CHARS};

use super::raw::RawSlice;
use super::{parallel_s5, Ctx, JobQueue, ParallelStats};

/// How the streams are cut into merge jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStrategy {
    /// Halve the largest job at the median string of its largest stream
    /// until enough jobs exist.
    Binary,
    /// Cut all streams at randomly sampled splitter strings.
    Multiway,
    /// Cut where the leading `w` characters change, found by scanning the
    /// LCP arrays only.
    Lcp,
}

/// One independent piece of a merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeJob {
    /// Per stream, the elements that belong to this job.
    pub ranges: Vec<Range<usize>>,
    /// Characters shared by every string of the job.
    pub hbar: usize,
    /// Output position of the job's first string.
    pub out_start: usize,
}

impl MergeJob {
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Merge jobs in output order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub strategy: SplitStrategy,
    pub jobs: Vec<MergeJob>,
}

/// Knobs of [`parallel_kway_lcp_merge`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOptions {
    pub strategy: SplitStrategy,
    pub threads: usize,
    /// Jobs planned per worker (`f`).
    pub oversample: usize,
    /// Running K-way jobs check for idle workers after this many outputs.
    pub poll_interval: usize,
    pub rebalance: bool,
    pub seed: u64,
}

impl Default for MergeOptions {
    fn default() -> Self {
        Self {
            strategy: SplitStrategy::Lcp,
            threads: 1,
            oversample: 8,
            poll_interval: 4096,
            rebalance: true,
            seed: 0x5eed_5eed,
        }
    }
}

/// Result of a parallel merge.
#[derive(Debug, Clone)]
pub struct MergeOutput {
    pub order: Vec<usize>,
    pub lcp: LcpArray,
    /// Jobs in the initial plan.
    pub planned_jobs: usize,
    /// Running jobs that were cut up again for idle workers.
    pub resplits: usize,
}

fn body_ranges(streams: &[MergeStream<'_>]) -> Vec<Range<usize>> {
    streams.iter().map(|s| 0..s.len()).collect()
}

/// Plans independent merge jobs for sorted `streams`, aiming at
/// `target_jobs` jobs.
pub fn plan_merge_split(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    strategy: SplitStrategy,
    target_jobs: usize,
    seed: u64,
) -> PartitionPlan {
    let ranges = body_ranges(streams);
    let pieces = split_ranges(st, streams, ranges, 0, strategy, target_jobs.max(1), seed);
    PartitionPlan { strategy, jobs: into_jobs(st, streams, pieces, 0) }
}

fn split_ranges(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    ranges: Vec<Range<usize>>,
    h0: usize,
    strategy: SplitStrategy,
    target: usize,
    seed: u64,
) -> Vec<(Vec<Range<usize>>, usize)> {
    let nonempty = ranges.iter().filter(|r| !r.is_empty()).count();
    if target <= 1 || nonempty <= 1 {
        return vec![(ranges, h0)];
    }
    match strategy {
        SplitStrategy::Binary => binary_split(st, streams, ranges, target)
            .into_iter()
            .map(|r| (r, h0))
            .collect(),
        SplitStrategy::Multiway => multiway_split(st, streams, ranges, target, seed)
            .into_iter()
            .map(|r| (r, h0))
            .collect(),
        SplitStrategy::Lcp => {
            let mut out = Vec::new();
            lcp_split(st, streams, ranges, h0, target, &mut out);
            out
        }
    }
}

/// Assigns output positions and common prefixes; drops empty pieces.
fn into_jobs(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    pieces: Vec<(Vec<Range<usize>>, usize)>,
    base: usize,
) -> Vec<MergeJob> {
    let mut pos = base;
    let mut jobs = Vec::with_capacity(pieces.len());
    for (ranges, h0) in pieces {
        let len: usize = ranges.iter().map(|r| r.len()).sum();
        if len == 0 {
            continue;
        }
        let hbar = common_prefix(st, streams, &ranges, h0);
        jobs.push(MergeJob { ranges, hbar, out_start: pos });
        pos += len;
    }
    jobs
}

/// LCP of the smallest and largest string of a job, as the minimum over
/// all pairs of stream heads and tails. `h0` characters are known equal.
fn common_prefix(st: Strings<'_>, streams: &[MergeStream<'_>], ranges: &[Range<usize>], h0: usize) -> usize {
    let mut h = usize::MAX;
    for (a, ra) in streams.iter().zip(ranges) {
        if ra.is_empty() {
            continue;
        }
        let first = a.strings[ra.start];
        for (b, rb) in streams.iter().zip(ranges) {
            if let Some(&last) = b.strings[rb.clone()].last() {
                h = h.min(st.lcp_from(first, last, h0));
            }
        }
    }
    if h == usize::MAX {
        h0
    } else {
        h
    }
}

fn lower_bound_in(st: Strings<'_>, strings: &[usize], key: usize) -> usize {
    strings.partition_point(|&s| st.cmp(s, key).is_lt())
}

fn upper_bound_in(st: Strings<'_>, strings: &[usize], key: usize) -> usize {
    strings.partition_point(|&s| st.cmp(s, key).is_le())
}

fn binary_split(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    ranges: Vec<Range<usize>>,
    target: usize,
) -> Vec<Vec<Range<usize>>> {
    let len = |r: &[Range<usize>]| r.iter().map(|x| x.len()).sum::<usize>();
    let mut jobs: Vec<(Vec<Range<usize>>, bool)> = vec![(ranges, true)];
    while jobs.len() < target {
        let Some(i) = (0..jobs.len()).filter(|&i| jobs[i].1 && len(&jobs[i].0) > 1).max_by_key(|&i| len(&jobs[i].0))
        else {
            break;
        };
        let job = &jobs[i].0;
        let total = len(job);
        let k = (0..job.len()).max_by_key(|&k| job[k].len()).expect("streams");
        let pivot = streams[k].strings[job[k].start + job[k].len() / 2];
        let cut = |bound: fn(Strings<'_>, &[usize], usize) -> usize| -> Vec<usize> {
            job.iter().zip(streams).map(|(r, s)| r.start + bound(st, &s.strings[r.clone()], pivot)).collect()
        };
        let mut cuts = cut(lower_bound_in);
        let left = |c: &[usize]| c.iter().zip(job).map(|(&c, r)| c - r.start).sum::<usize>();
        if left(&cuts) == 0 || left(&cuts) == total {
            cuts = cut(upper_bound_in);
        }
        if left(&cuts) == 0 || left(&cuts) == total {
            jobs[i].1 = false;
            continue;
        }
        let lo = job.iter().zip(&cuts).map(|(r, &c)| r.start..c).collect();
        let hi = job.iter().zip(&cuts).map(|(r, &c)| c..r.end).collect();
        jobs.splice(i..=i, [(lo, true), (hi, true)]);
    }
    jobs.into_iter().map(|(r, _)| r).collect()
}

fn multiway_split(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    ranges: Vec<Range<usize>>,
    target: usize,
    seed: u64,
) -> Vec<Vec<Range<usize>>> {
    let total: usize = ranges.iter().map(|r| r.len()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<usize> = (0..target)
        .map(|_| {
            let mut x = rng.gen_range(0..total);
            let mut k = 0;
            while x >= ranges[k].len() {
                x -= ranges[k].len();
                k += 1;
            }
            streams[k].strings[ranges[k].start + x]
        })
        .collect();
    multikey_quicksort(st, &mut sample, 0, &mut NoStats);
    sample.dedup_by(|a, b| st.cmp(*a, *b).is_eq());
    let mut cuts: Vec<Vec<usize>> = vec![ranges.iter().map(|r| r.start).collect()];
    for &key in &sample {
        cuts.push(
            ranges.iter().zip(streams).map(|(r, m)| r.start + lower_bound_in(st, &m.strings[r.clone()], key)).collect(),
        );
    }
    cuts.push(ranges.iter().map(|r| r.end).collect());
    cuts.windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(&a, &b)| a..b).collect::<Vec<_>>())
        .filter(|r: &Vec<Range<usize>>| r.iter().any(|x| !x.is_empty()))
        .collect()
}

/// Keeps the leading `w` characters of a key.
fn mask(key: u64, w: usize) -> u64 {
    if w >= WORD_CHARS {
        key
    } else {
        key & !(u64::MAX >> (8 * w))
    }
}

/// Strings of all streams whose next `w` characters are equal.
struct Unit {
    key: u64,
    ranges: Vec<Range<usize>>,
}

fn lcp_split(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    ranges: Vec<Range<usize>>,
    h0: usize,
    target: usize,
    out: &mut Vec<(Vec<Range<usize>>, usize)>,
) {
    let k = ranges.len();
    let total: usize = ranges.iter().map(|r| r.len()).sum();
    let nonempty = ranges.iter().filter(|r| !r.is_empty()).count();
    if target <= 1 || nonempty <= 1 || total < 2 {
        out.push((ranges, h0));
        return;
    }

    // pick the widest window that keeps the number of blocks in budget
    let mut hist = [0usize; WORD_CHARS + 1];
    for (r, s) in ranges.iter().zip(streams) {
        for &l in s.lcp.get(r.start + 1..r.end).unwrap_or(&[]) {
            hist[l.saturating_sub(h0).min(WORD_CHARS)] += 1;
        }
    }
    let budget = 4 * target;
    let mut w = 1;
    let mut blocks = nonempty;
    for d in 0..WORD_CHARS {
        blocks += hist[d];
        if d + 1 > 1 && blocks > budget {
            break;
        }
        w = d + 1;
    }

    let mut pieces: Vec<(u64, usize, Range<usize>)> = Vec::new();
    for (j, (r, s)) in ranges.iter().zip(streams).enumerate() {
        let mut start = r.start;
        for i in r.clone() {
            if i > r.start && s.lcp[i] < h0 + w {
                pieces.push((mask(st.key(s.strings[start], h0), w), j, start..i));
                start = i;
            }
        }
        if !r.is_empty() {
            pieces.push((mask(st.key(s.strings[start], h0), w), j, start..r.end));
        }
    }
    pieces.sort_by_key(|&(key, j, _)| (key, j));
    let mut units: Vec<Unit> = Vec::new();
    for (key, j, r) in pieces {
        match units.last_mut() {
            Some(u) if u.key == key => {
                let slot = &mut u.ranges[j];
                if slot.start == slot.end {
                    *slot = r;
                } else {
                    debug_assert_eq!(slot.end, r.start);
                    slot.end = r.end;
                }
            }
            _ => {
                let mut unit_ranges = vec![0..0; k];
                unit_ranges[j] = r;
                units.push(Unit { key, ranges: unit_ranges });
            }
        }
    }

    let limit = total.div_ceil(target);
    let mut cur: Vec<Option<Range<usize>>> = vec![None; k];
    let mut cur_len = 0;
    let flush = |cur: &mut Vec<Option<Range<usize>>>, cur_len: &mut usize, out: &mut Vec<(Vec<Range<usize>>, usize)>| {
        if *cur_len > 0 {
            let ranges = cur.iter_mut().map(|c| c.take().unwrap_or(0..0)).collect();
            out.push((ranges, h0));
            *cur_len = 0;
        }
    };
    for unit in units {
        let ulen: usize = unit.ranges.iter().map(|r| r.len()).sum();
        if ulen > 2 * limit {
            flush(&mut cur, &mut cur_len, out);
            if key_depth(unit.key) < w {
                // equal strings: stream order is output order
                for (j, r) in unit.ranges.iter().enumerate() {
                    if !r.is_empty() {
                        let mut ranges = vec![0..0; k];
                        ranges[j] = r.clone();
                        out.push((ranges, h0 + key_depth(unit.key)));
                    }
                }
            } else {
                lcp_split(st, streams, unit.ranges, h0 + w, ulen.div_ceil(limit), out);
            }
            continue;
        }
        for (c, r) in cur.iter_mut().zip(&unit.ranges) {
            if r.is_empty() {
                continue;
            }
            *c = Some(match c.take() {
                Some(prev) => prev.start..r.end,
                None => r.clone(),
            });
        }
        cur_len += ulen;
        if cur_len >= limit {
            flush(&mut cur, &mut cur_len, out);
        }
    }
    flush(&mut cur, &mut cur_len, out);
}

struct Shared<'s, 'a, C> {
    ctx: Ctx<'s, C>,
    streams: &'a [MergeStream<'a>],
    out: RawSlice<'a, usize>,
    out_lcp: RawSlice<'a, usize>,
    use_cached: bool,
    options: MergeOptions,
    boundaries: Mutex<Vec<usize>>,
    resplits: AtomicUsize,
}

/// Merges sorted streams with their LCP arrays on `options.threads`
/// workers. Output and LCP array equal those of the sequential K-way merge.
/// Cached characters are used when every stream carries them.
pub fn parallel_kway_lcp_merge<C: ParallelStats>(
    st: Strings<'_>,
    streams: &[MergeStream<'_>],
    options: &MergeOptions,
    stats: &mut C,
) -> MergeOutput {
    let n: usize = streams.iter().map(|s| s.len()).sum();
    let threads = options.threads.max(1);
    let plan = plan_merge_split(st, streams, options.strategy, options.oversample.max(1) * threads, options.seed);
    let planned_jobs = plan.jobs.len();
    let mut order = vec![0; n];
    let mut lcp = vec![0; n];
    stats.aux_alloc(2 * n * std::mem::size_of::<usize>());
    let resplits = {
        let shared = Shared {
            ctx: Ctx::new(st, n, threads),
            streams,
            out: RawSlice::new(&mut order),
            out_lcp: RawSlice::new(&mut lcp),
            use_cached: streams.iter().all(|s| s.cached.is_some()),
            options: options.clone(),
            boundaries: Mutex::new(Vec::new()),
            resplits: AtomicUsize::new(0),
        };
        let queue = JobQueue::new(threads);
        for job in plan.jobs {
            let sh = &shared;
            queue.enqueue(move |q| merge_job(sh, q, job));
        }
        queue.run();
        drop(queue);
        let boundaries = std::mem::take(&mut *shared.boundaries.lock().expect("boundary lock"));
        stats.absorb(&shared.ctx.into_stats());
        let resplits = shared.resplits.into_inner();
        for b in boundaries {
            lcp[b] = if b == 0 { 0 } else { st.lcp(order[b - 1], order[b]) };
        }
        resplits
    };
    if let Some(first) = lcp.first_mut() {
        *first = 0;
    }
    stats.aux_free(2 * n * std::mem::size_of::<usize>());
    MergeOutput { order, lcp: LcpArray::new(lcp), planned_jobs, resplits }
}

fn merge_job<'s, 'a: 's, C: ParallelStats>(sh: &'s Shared<'s, 'a, C>, q: &JobQueue<'s>, job: MergeJob) {
    let len = job.len();
    if len == 0 {
        return;
    }
    sh.boundaries.lock().expect("boundary lock").push(job.out_start);
    let mut stats = C::default();
    let st = sh.ctx.st;
    // SAFETY: planned jobs cover disjoint output ranges
    let (out, out_lcp) = unsafe {
        let range = job.out_start..job.out_start + len;
        (sh.out.sub(range.clone()).get_mut(), sh.out_lcp.sub(range).get_mut())
    };
    let subs: Vec<MergeStream<'_>> = sh
        .streams
        .iter()
        .zip(&job.ranges)
        .filter(|(_, r)| !r.is_empty())
        .map(|(s, r)| s.slice(r.clone()))
        .collect();
    match subs.len() {
        1 => {
            out.copy_from_slice(subs[0].strings);
            out_lcp.copy_from_slice(subs[0].lcp);
        }
        2 => binary_lcp_merge(st, subs[0], subs[1], out, out_lcp, &mut stats),
        _ => kway_with_rebalance(sh, q, &job, &subs, out, out_lcp, &mut stats),
    }
    sh.ctx.commit(&stats);
}

fn kway_with_rebalance<'s, 'a: 's, C: ParallelStats>(
    sh: &'s Shared<'s, 'a, C>,
    q: &JobQueue<'s>,
    job: &MergeJob,
    subs: &[MergeStream<'_>],
    out: &mut [usize],
    out_lcp: &mut [usize],
    stats: &mut C,
) {
    let interval = sh.options.poll_interval.max(1);
    let mut tree = LcpTournamentTree::new(sh.ctx.st, subs, job.hbar, sh.use_cached, stats);
    let mut j = 0;
    while let Some((s, h, _)) = tree.next(stats) {
        out[j] = s;
        out_lcp[j] = h;
        j += 1;
        if j % interval == 0 && sh.options.rebalance && q.has_idle() && tree.remaining() >= 2 * interval {
            // hand the rest of this job to the queue in pieces
            let mut ranges = Vec::with_capacity(job.ranges.len());
            let mut cursors = tree.cursors().iter();
            for r in &job.ranges {
                if r.is_empty() {
                    ranges.push(r.clone());
                } else {
                    ranges.push(r.start + cursors.next().expect("cursor per stream")..r.end);
                }
            }
            tree.release(stats);
            let pieces = split_ranges(sh.ctx.st, sh.streams, ranges, job.hbar, SplitStrategy::Lcp, sh.ctx.threads, 0);
            for piece in into_jobs(sh.ctx.st, sh.streams, pieces, job.out_start + j) {
                q.share(move |q| merge_job(sh, q, piece));
            }
            sh.resplits.fetch_add(1, Ordering::Relaxed);
            return;
        }
    }
    tree.release(stats);
}

/// Sorts `order` by splitting it into `parts` contiguous ranges, sorting each
/// with parallel sample sort on its share of the workers, and merging the
/// sorted ranges. Returns the LCP array.
pub fn partitioned_sort<C: ParallelStats>(
    st: Strings<'_>,
    order: &mut [usize],
    parts: usize,
    config: &S5Config,
    options: &MergeOptions,
    stats: &mut C,
) -> LcpArray {
    let n = order.len();
    let parts = parts.max(1);
    let threads = options.threads.max(1);
    let inner = S5Config { emit_lcp: true, emit_cached_char: true, ..config.clone() };
    let bounds: Vec<usize> = (0..=parts).map(|i| i * n / parts).collect();
    let mut chunks: Vec<&mut [usize]> = Vec::with_capacity(parts);
    let mut rest = &mut order[..];
    for w in bounds.windows(2) {
        let (a, b) = rest.split_at_mut(w[1] - w[0]);
        chunks.push(a);
        rest = b;
    }
    let per_part = (threads / parts).max(1);
    let results: Vec<(Vec<usize>, LcpArray, Vec<u8>, C)> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let inner = &inner;
                scope.spawn(move || {
                    let mut local = C::default();
                    let out = parallel_s5(st, chunk, per_part, inner, &mut local);
                    (
                        chunk.to_vec(),
                        out.lcp.expect("lcp requested"),
                        out.cached_chars.expect("cached chars requested"),
                        local,
                    )
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("part sorter panicked")).collect()
    });
    let streams: Vec<MergeStream<'_>> =
        results.iter().map(|(o, l, c, _)| MergeStream::new(o, l).with_cached(c)).collect();
    for (_, _, _, local) in &results {
        stats.absorb(local);
    }
    let merged = parallel_kway_lcp_merge(st, &streams, options, stats);
    order.copy_from_slice(&merged.order);
    merged.lcp
}
