//! Shared-memory parallel sorters.
//!
//! All sorters run on a [`JobQueue`]. Regions of at least `n/p` strings take
//! a fully parallel distribution step (count, prefix sum, distribute, each
//! split over several jobs); smaller regions are sorted by one job with an
//! explicit stack that hands its largest pending region to the queue when
//! some worker is idle.

mod merge;
mod mkqs;
mod queue;
mod radix;
mod raw;
mod s5;
mod step;

use std::sync::Mutex;

use stringsort_core::seqsort::{caching_mkqs_task, MkqsTask, ShareWork};
use stringsort_core::{Counter, NoStats, SortStats, Strings};

use raw::RawSlice;

pub use merge::{
    parallel_kway_lcp_merge, partitioned_sort, plan_merge_split, MergeJob, MergeOptions, MergeOutput,
    PartitionPlan, SplitStrategy,
};
pub use mkqs::{parallel_mkqs, DEFAULT_BLOCK};
pub use queue::{JobQueue, QueueCounts};
pub use radix::parallel_radix;
pub use s5::parallel_s5;

/// Counters that can be kept per job and summed afterwards.
pub trait ParallelStats: Counter + Default + Send {
    fn absorb(&mut self, other: &Self);
}

impl ParallelStats for NoStats {
    #[inline(always)]
    fn absorb(&mut self, _other: &Self) {}
}

impl ParallelStats for SortStats {
    fn absorb(&mut self, other: &Self) {
        self.merge(other);
    }
}

/// State shared by all jobs of one parallel sort.
pub(crate) struct Ctx<'s, C> {
    pub st: Strings<'s>,
    /// Size of the whole input.
    pub n: usize,
    pub threads: usize,
    stats: Mutex<C>,
}

impl<'s, C: ParallelStats> Ctx<'s, C> {
    pub fn new(st: Strings<'s>, n: usize, threads: usize) -> Self {
        Self { st, n, threads: threads.max(1), stats: Mutex::new(C::default()) }
    }

    /// Regions at least this large take a fully parallel step.
    pub fn parallel_threshold(&self) -> usize {
        self.n.div_ceil(self.threads).max(1)
    }

    /// Jobs per phase of a parallel step over `len` strings: `⌈p·len/n⌉`.
    pub fn share_of(&self, len: usize) -> usize {
        if self.n == 0 {
            return 1;
        }
        (self.threads * len).div_ceil(self.n).clamp(1, self.threads).min(len.max(1))
    }

    /// Folds the counters of a finished job into the run total.
    pub fn commit(&self, local: &C) {
        if C::ENABLED {
            self.stats.lock().expect("stats lock").absorb(local);
        }
    }

    pub fn into_stats(self) -> C {
        self.stats.into_inner().expect("stats lock")
    }
}

/// Runs on the queue with every shared region becoming a job of its own.
pub(crate) struct QueueShare<'q, 's, C> {
    pub ctx: &'s Ctx<'s, C>,
    pub queue: &'q JobQueue<'s>,
}

impl<'s, C: ParallelStats> ShareWork<'s> for QueueShare<'_, 's, C> {
    #[inline]
    fn wants_work(&self) -> bool {
        self.queue.has_idle()
    }

    fn share(&mut self, task: MkqsTask<'s, '_>) {
        let ctx = self.ctx;
        let mut cache = task.cache.to_vec();
        let (order, lcp, depth) = (task.order, task.lcp, task.depth);
        self.queue.share(move |q| {
            let mut stats = C::default();
            stats.aux_alloc(cache.len() * std::mem::size_of::<u64>());
            let task = MkqsTask { order, cache: &mut cache, lcp, depth };
            caching_mkqs_task(ctx.st, task, &mut stats, &mut QueueShare { ctx, queue: q });
            stats.aux_free(cache.len() * std::mem::size_of::<u64>());
            ctx.commit(&stats);
        });
    }
}

/// A range being sorted, with its scratch range in the other array.
#[derive(Clone, Copy)]
pub(crate) struct Region<'s> {
    /// Where the strings are now.
    pub data: RawSlice<'s, usize>,
    /// Same-sized range of the other array.
    pub other: RawSlice<'s, usize>,
    pub lcp: Option<RawSlice<'s, usize>>,
    pub depth: usize,
    /// Whether `data` lies in the output array.
    pub in_output: bool,
    /// Offset in the output.
    pub pos: usize,
}

impl<'s> Region<'s> {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Moves the strings into the output array if they are not there.
    ///
    /// # Safety
    /// The caller owns the region.
    pub unsafe fn settle(&self) -> &'s mut [usize] {
        if self.in_output {
            self.data.get_mut()
        } else {
            let out = self.other.get_mut();
            out.copy_from_slice(self.data.get());
            out
        }
    }

    /// Sub-range of a region just distributed from `data` into `other`.
    pub fn child(&self, range: std::ops::Range<usize>, depth: usize) -> Self {
        Region {
            data: self.other.sub(range.clone()),
            other: self.data.sub(range.clone()),
            lcp: self.lcp.map(|l| l.sub(range.clone())),
            depth,
            in_output: !self.in_output,
            pos: self.pos + range.start,
        }
    }
}

/// Seed of the generator used for one region, so that results do not depend
/// on which worker picks the region up.
pub(crate) fn region_seed(seed: u64, depth: usize, len: usize, pos: usize) -> u64 {
    let mut x = seed ^ (pos as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= (depth as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9).rotate_left(17);
    x ^= (len as u64).wrapping_mul(0x94d0_49bb_1331_11eb).rotate_left(41);
    x
}
