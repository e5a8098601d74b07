//! Parallel super scalar string sample sort.

use std::mem::size_of;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stringsort_core::lcpmerge::lcp_insertion_sort;
use stringsort_core::seqsort::{caching_mkqs_shared, insertion_sort};
use stringsort_core::ssss::{cached_chars, classify_region, s5_step, sample_tree, BucketLayout, S5Config, S5Output, SplitterTree};
use stringsort_core::{Counter, LcpArray, Strings};

use super::raw::RawSlice;
use super::step::{parallel_step, Classify, StepResult};
use super::{region_seed, Ctx, JobQueue, ParallelStats, QueueShare, Region};

struct Shared<'s, C> {
    ctx: Ctx<'s, C>,
    config: S5Config,
    /// Small regions are batched into jobs of about this many strings.
    grain: usize,
}

struct TreeClassifier<'s> {
    tree: SplitterTree,
    config: &'s S5Config,
    depth: usize,
    track: bool,
}

impl Classify for TreeClassifier<'_> {
    type Extra = Option<(Vec<u64>, Vec<u64>)>;

    fn buckets(&self) -> usize {
        self.tree.buckets()
    }

    fn classify<C: Counter>(
        &self,
        st: Strings<'_>,
        data: &[usize],
        oracle: &mut [u16],
        stats: &mut C,
    ) -> (Vec<usize>, Self::Extra) {
        classify_region(st, data, self.depth, &self.tree, self.config, oracle, self.track, stats)
    }
}

/// Parallel string sample sort of `order` on `threads` workers.
///
/// Produces the same string sequence as [`stringsort_core::ssss::seq_s5`];
/// the LCP array and cached characters follow the same options.
pub fn parallel_s5<C: ParallelStats>(
    st: Strings<'_>,
    order: &mut [usize],
    threads: usize,
    config: &S5Config,
    stats: &mut C,
) -> S5Output {
    let n = order.len();
    let want_lcp = config.emit_lcp || config.emit_cached_char;
    let mut lcp = if want_lcp { vec![0; n] } else { Vec::new() };
    let mut shadow = vec![0; n];
    stats.aux_alloc((shadow.len() + lcp.len()) * size_of::<usize>());
    let threads = threads.max(1);
    let shared = Shared {
        ctx: Ctx::new(st, n, threads),
        config: S5Config { emit_lcp: want_lcp, ..config.clone() },
        grain: (n / (threads * 16)).max(1024),
    };
    if n > 1 {
        let queue = JobQueue::new(threads);
        let root = Region {
            data: RawSlice::new(order),
            other: RawSlice::new(&mut shadow),
            lcp: want_lcp.then(|| RawSlice::new(&mut lcp[..])),
            depth: 0,
            in_output: true,
            pos: 0,
        };
        dispatch(&shared, &queue, vec![root]);
        queue.run();
    }
    stats.absorb(&shared.ctx.into_stats());
    stats.aux_free((shadow.len() + lcp.len()) * size_of::<usize>());
    let cached = config.emit_cached_char.then(|| cached_chars(st, order, &lcp));
    S5Output { lcp: config.emit_lcp.then(|| LcpArray::new(lcp)), cached_chars: cached }
}

fn dispatch<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, regions: Vec<Region<'s>>) {
    let big = sh.ctx.parallel_threshold().max(sh.config.sample_size());
    let mut group = Vec::new();
    let mut group_len = 0;
    for r in regions {
        if r.len() >= big {
            q.enqueue(move |q| sample_job(sh, q, r));
            continue;
        }
        group_len += r.len();
        group.push(r);
        if group_len >= sh.grain {
            let g = std::mem::take(&mut group);
            q.enqueue(move |q| small_sort_job(sh, q, g));
            group_len = 0;
        }
    }
    if !group.is_empty() {
        q.enqueue(move |q| small_sort_job(sh, q, group));
    }
}

fn sample_job<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, r: Region<'s>) {
    let mut stats = C::default();
    let mut rng = ChaCha8Rng::seed_from_u64(region_seed(sh.config.seed, r.depth, r.len(), r.pos));
    // SAFETY: the region belongs to this step until its finish job runs
    let data = unsafe { r.data.get() };
    let tree = sample_tree(sh.ctx.st, data, r.depth, &sh.config, &mut rng, &mut stats);
    sh.ctx.commit(&stats);
    let classifier = TreeClassifier { tree, config: &sh.config, depth: r.depth, track: r.lcp.is_some() };
    let parts = sh.ctx.share_of(r.len());
    parallel_step(&sh.ctx, q, classifier, r.data, r.other, parts, move |q, k: &TreeClassifier<'s>, res| {
        finish_step(sh, q, r, k, res)
    });
}

fn finish_step<'s, C: ParallelStats>(
    sh: &'s Shared<'s, C>,
    q: &JobQueue<'s>,
    r: Region<'s>,
    k: &TreeClassifier<'_>,
    res: StepResult<Option<(Vec<u64>, Vec<u64>)>>,
) {
    let extremes = k.track.then(|| {
        let b = res.counts.len();
        let (mut lo, mut hi) = (vec![u64::MAX; b], vec![0u64; b]);
        for (l, h) in res.extras.iter().flatten() {
            lo.iter_mut().zip(l).for_each(|(x, &y)| *x = (*x).min(y));
            hi.iter_mut().zip(h).for_each(|(x, &y)| *x = (*x).max(y));
        }
        (lo, hi)
    });
    let layout = BucketLayout::new(k.tree.clone(), res.counts, extremes);
    if let Some(l) = r.lcp {
        // SAFETY: the whole region still belongs to this job
        layout.fill_lcp(unsafe { l.get_mut() }, r.depth);
    }
    dispatch(sh, q, split_children(&layout, &r));
}

/// Child regions of a distributed region. Buckets that need no further
/// sorting are moved to the output right away.
fn split_children<'s>(layout: &BucketLayout, r: &Region<'s>) -> Vec<Region<'s>> {
    let mut out = Vec::new();
    for b in 0..layout.buckets() {
        let c = layout.counts[b];
        if c == 0 {
            continue;
        }
        let range = layout.offsets[b]..layout.offsets[b] + c;
        let child = r.child(range, r.depth + layout.advance(b));
        if c == 1 || layout.is_finished(b) {
            if !child.in_output {
                // SAFETY: the child's ranges are owned by the caller
                unsafe { child.other.get_mut().copy_from_slice(child.data.get()) };
            }
        } else {
            out.push(child);
        }
    }
    out
}

fn small_sort_job<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, mut stack: Vec<Region<'s>>) {
    let mut stats = C::default();
    let cfg = &sh.config;
    while let Some(r) = stack.pop() {
        if r.len() >= cfg.sample_threshold.max(2) {
            let mut rng = ChaCha8Rng::seed_from_u64(region_seed(cfg.seed, r.depth, r.len(), r.pos));
            // SAFETY: popped regions are owned by this job
            let (data, other) = unsafe { (r.data.get(), r.other.get_mut()) };
            let layout = s5_step(sh.ctx.st, data, other, r.depth, cfg, &mut rng, &mut stats);
            if let Some(l) = r.lcp {
                layout.fill_lcp(unsafe { l.get_mut() }, r.depth);
            }
            stack.extend(split_children(&layout, &r));
        } else {
            sort_leaf(sh, q, r, &mut stats);
        }
        while stack.len() > 1 && q.has_idle() {
            let bottom = stack.remove(0);
            q.share(move |q| small_sort_job(sh, q, vec![bottom]));
        }
    }
    sh.ctx.commit(&stats);
}

fn sort_leaf<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, r: Region<'s>, stats: &mut C) {
    // SAFETY: the region is owned by this job
    let order = unsafe { r.settle() };
    let lcp = r.lcp.map(|l| unsafe { l.get_mut() });
    let st = sh.ctx.st;
    if order.len() >= sh.config.insertion_threshold.max(2) {
        caching_mkqs_shared(st, order, lcp, r.depth, stats, &mut QueueShare { ctx: &sh.ctx, queue: q });
    } else if let Some(l) = lcp {
        lcp_insertion_sort(st, order, l, r.depth, stats);
    } else {
        insertion_sort(st, order, r.depth, stats);
    }
}
