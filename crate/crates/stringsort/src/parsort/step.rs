//! Fully parallel distribution step: `parts` counting jobs classify stripes
//! of the input into a shared oracle, the last one to finish computes a
//! bucket-major prefix sum over all stripes, and `parts` distribution jobs
//! move the strings into disjoint ranges of the output.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use stringsort_core::{Counter, Strings};

use super::raw::{OwnedRaw, RawSlice};
use super::{Ctx, JobQueue, ParallelStats};

/// Bucket assignment used by a parallel step.
pub(crate) trait Classify: Send + Sync {
    /// Per-stripe side result, e.g. key extremes per bucket.
    type Extra: Send;

    fn buckets(&self) -> usize;

    /// Writes the bucket of every string of `data` to `oracle` and returns
    /// the bucket counts.
    fn classify<C: Counter>(
        &self,
        st: Strings<'_>,
        data: &[usize],
        oracle: &mut [u16],
        stats: &mut C,
    ) -> (Vec<usize>, Self::Extra);
}

/// What the finishing job receives.
pub(crate) struct StepResult<E> {
    pub counts: Vec<usize>,
    pub extras: Vec<E>,
}

type Finish<'s, K> = Box<dyn FnOnce(&JobQueue<'s>, &K, StepResult<<K as Classify>::Extra>) + Send + 's>;

struct Step<'s, K: Classify, C> {
    ctx: &'s Ctx<'s, C>,
    classifier: K,
    src: RawSlice<'s, usize>,
    dst: RawSlice<'s, usize>,
    oracle: OwnedRaw<u16>,
    parts: usize,
    counts: Mutex<Vec<Option<(Vec<usize>, K::Extra)>>>,
    positions: Mutex<Vec<Vec<usize>>>,
    totals: Mutex<Option<StepResult<K::Extra>>>,
    remaining: AtomicUsize,
    finish: Mutex<Option<Finish<'s, K>>>,
}

impl<K: Classify, C> Step<'_, K, C> {
    fn stripe(&self, k: usize) -> Range<usize> {
        let n = self.src.len();
        k * n / self.parts..(k + 1) * n / self.parts
    }
}

/// Distributes `src` into `dst` by `classifier` with `parts` jobs per phase,
/// then calls `finish` on the job that completes last.
pub(crate) fn parallel_step<'s, C, K>(
    ctx: &'s Ctx<'s, C>,
    queue: &JobQueue<'s>,
    classifier: K,
    src: RawSlice<'s, usize>,
    dst: RawSlice<'s, usize>,
    parts: usize,
    finish: impl FnOnce(&JobQueue<'s>, &K, StepResult<K::Extra>) + Send + 's,
) where
    C: ParallelStats,
    K: Classify + 's,
{
    assert_eq!(src.len(), dst.len());
    let parts = parts.clamp(1, src.len().max(1));
    assert!(classifier.buckets() <= 1 << 16);
    let step = Arc::new(Step {
        ctx,
        oracle: OwnedRaw::new(vec![0u16; src.len()]),
        classifier,
        src,
        dst,
        parts,
        counts: Mutex::new((0..parts).map(|_| None).collect()),
        positions: Mutex::new(Vec::new()),
        totals: Mutex::new(None),
        remaining: AtomicUsize::new(parts),
        finish: Mutex::new(Some(Box::new(finish))),
    });
    for k in 0..parts {
        let step = Arc::clone(&step);
        queue.enqueue(move |q| count_job(q, step, k));
    }
}

fn count_job<'s, C: ParallelStats, K: Classify + 's>(q: &JobQueue<'s>, step: Arc<Step<'s, K, C>>, k: usize) {
    let mut stats = C::default();
    let range = step.stripe(k);
    // SAFETY: stripe `k` of the source is read-only during the count phase
    // and stripe `k` of the oracle belongs to this job alone.
    let (data, oracle) = unsafe { (step.src.sub(range.clone()).get(), step.oracle.raw().sub(range).get_mut()) };
    stats.aux_alloc(oracle.len() * std::mem::size_of::<u16>());
    let result = step.classifier.classify(step.ctx.st, data, oracle, &mut stats);
    step.counts.lock().expect("counts lock")[k] = Some(result);
    step.ctx.commit(&stats);
    if step.remaining.fetch_sub(1, Ordering::AcqRel) != 1 {
        return;
    }

    // last counter: bucket-major prefix sum over stripes
    let per_stripe: Vec<(Vec<usize>, K::Extra)> = std::mem::take(&mut *step.counts.lock().expect("counts lock"))
        .into_iter()
        .map(|c| c.expect("every stripe counted"))
        .collect();
    let buckets = step.classifier.buckets();
    let mut positions = vec![vec![0usize; buckets]; step.parts];
    let mut totals = vec![0usize; buckets];
    let mut sum = 0;
    for b in 0..buckets {
        for (j, (counts, _)) in per_stripe.iter().enumerate() {
            positions[j][b] = sum;
            sum += counts[b];
            totals[b] += counts[b];
        }
    }
    debug_assert_eq!(sum, step.src.len());
    let extras = per_stripe.into_iter().map(|(_, e)| e).collect();
    *step.positions.lock().expect("positions lock") = positions;
    *step.totals.lock().expect("totals lock") = Some(StepResult { counts: totals, extras });
    step.remaining.store(step.parts, Ordering::Release);
    for j in 0..step.parts {
        let step = Arc::clone(&step);
        q.enqueue(move |q| distribute_job(q, step, j));
    }
}

fn distribute_job<'s, C: ParallelStats, K: Classify + 's>(q: &JobQueue<'s>, step: Arc<Step<'s, K, C>>, k: usize) {
    let mut pos = std::mem::take(&mut step.positions.lock().expect("positions lock")[k]);
    let range = step.stripe(k);
    // SAFETY: sources and oracle are only read now; the prefix sum gives
    // every (stripe, bucket) pair a disjoint target range of `dst`.
    unsafe {
        let data = step.src.sub(range.clone()).get();
        let oracle = step.oracle.raw().sub(range).get();
        for (&s, &b) in data.iter().zip(oracle) {
            let p = &mut pos[b as usize];
            step.dst.write(*p, s);
            *p += 1;
        }
    }
    drop(pos);
    if step.remaining.fetch_sub(1, Ordering::AcqRel) != 1 {
        return;
    }
    let result = step.totals.lock().expect("totals lock").take().expect("counted");
    let finish = step.finish.lock().expect("finish lock").take().expect("finished once");
    finish(q, &step.classifier, result);
}

#[cfg(test)]
mod tests {
    use super::*;
    use stringsort_core::{NoStats, StringSet};

    struct FirstChar;

    impl Classify for FirstChar {
        type Extra = usize;

        fn buckets(&self) -> usize {
            256
        }

        fn classify<C: Counter>(&self, st: Strings<'_>, data: &[usize], oracle: &mut [u16], _: &mut C) -> (Vec<usize>, usize) {
            let mut counts = vec![0; 256];
            for (o, &s) in oracle.iter_mut().zip(data) {
                *o = st.at(s, 0) as u16;
                counts[*o as usize] += 1;
            }
            (counts, data.len())
        }
    }

    #[test]
    fn step_groups_by_bucket_and_keeps_stripe_order() {
        let items: Vec<String> = (0..5000).map(|i| format!("{}{}", (b'a' + (i * 7 % 5) as u8) as char, i)).collect();
        let set = StringSet::from_strings(&items).unwrap();
        for threads in [1, 3, 4] {
            let mut src = set.handles().to_vec();
            let mut dst = vec![0; src.len()];
            let seen = Mutex::new(None);
            {
                let ctx: Ctx<'_, NoStats> = Ctx::new(set.strings(), src.len(), threads);
                let q = JobQueue::new(threads);
                let (s, d) = (RawSlice::new(&mut src), RawSlice::new(&mut dst));
                let seen = &seen;
                parallel_step(&ctx, &q, FirstChar, s, d, threads, move |_, _, r| {
                    *seen.lock().unwrap() = Some((r.counts, r.extras));
                });
                q.run();
            }
            let (counts, extras) = seen.into_inner().unwrap().expect("finish ran");
            assert_eq!(extras.iter().sum::<usize>(), 5000);
            assert_eq!(counts[b'a' as usize], 1000);
            // a stable partition by first character
            let mut expect = set.handles().to_vec();
            expect.sort_by_key(|&h| set.get(h)[0]);
            assert_eq!(dst, expect);
        }
    }
}
