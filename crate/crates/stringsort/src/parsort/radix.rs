//! Parallel MSD radix sort.

use std::mem::size_of;

use stringsort_core::seqsort::{radix_sort, RadixVariant, CI3_THRESHOLD};
use stringsort_core::{Counter, Strings};

use super::raw::RawSlice;
use super::step::{parallel_step, Classify, StepResult};
use super::{Ctx, JobQueue, ParallelStats, Region};

/// Regions below this never take a parallel step.
const MIN_PARALLEL: usize = 1 << 12;

struct Shared<'s, C> {
    ctx: Ctx<'s, C>,
    bits: u32,
    grain: usize,
}

/// Buckets by the next one or two characters. In 16-bit mode a string that
/// ends at the first character goes to bucket 0.
struct CharClassifier {
    depth: usize,
    wide: bool,
}

impl CharClassifier {
    /// Characters consumed by one step.
    fn advance(&self) -> usize {
        if self.wide {
            2
        } else {
            1
        }
    }

    /// Whether every string in bucket `b` ended inside the consumed characters.
    fn is_finished(&self, b: usize) -> bool {
        b == 0 || (self.wide && b & 0xff == 0)
    }
}

impl Classify for CharClassifier {
    type Extra = ();

    fn buckets(&self) -> usize {
        if self.wide {
            1 << 16
        } else {
            1 << 8
        }
    }

    fn classify<C: Counter>(&self, st: Strings<'_>, data: &[usize], oracle: &mut [u16], stats: &mut C) -> (Vec<usize>, ()) {
        let mut counts = vec![0usize; self.buckets()];
        let h = self.depth;
        if self.wide {
            for (o, &s) in oracle.iter_mut().zip(data) {
                let c = st.at(s, h);
                *o = if c == 0 { 0 } else { u16::from(c) << 8 | u16::from(st.at(s, h + 1)) };
                counts[*o as usize] += 1;
            }
        } else {
            for (o, &s) in oracle.iter_mut().zip(data) {
                *o = u16::from(st.at(s, h));
                counts[*o as usize] += 1;
            }
        }
        stats.string_access(data.len() as u64);
        (counts, ())
    }
}

/// Parallel radix sort with 8- or 16-bit top-level steps. Subproblems
/// below `n/p` strings run the in-place sequential sort (CI2 for 8 bits,
/// CI3 for 16 bits).
pub fn parallel_radix<C: ParallelStats>(
    st: Strings<'_>,
    order: &mut [usize],
    threads: usize,
    bits: u32,
    stats: &mut C,
) {
    assert!(bits == 8 || bits == 16, "radix width must be 8 or 16 bits");
    let n = order.len();
    let threads = threads.max(1);
    let mut shadow = vec![0; n];
    stats.aux_alloc(n * size_of::<usize>());
    let shared = Shared { ctx: Ctx::new(st, n, threads), bits, grain: (n / (threads * 16)).max(1024) };
    if n > 1 {
        let queue = JobQueue::new(threads);
        let root = Region {
            data: RawSlice::new(order),
            other: RawSlice::new(&mut shadow),
            lcp: None,
            depth: 0,
            in_output: true,
            pos: 0,
        };
        dispatch(&shared, &queue, vec![root]);
        queue.run();
    }
    stats.absorb(&shared.ctx.into_stats());
    stats.aux_free(n * size_of::<usize>());
}

fn dispatch<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, regions: Vec<Region<'s>>) {
    let big = sh.ctx.parallel_threshold().max(MIN_PARALLEL);
    let mut group = Vec::new();
    let mut group_len = 0;
    for r in regions {
        if r.len() >= big {
            let classifier = CharClassifier { depth: r.depth, wide: sh.bits == 16 && r.len() >= CI3_THRESHOLD };
            let parts = sh.ctx.share_of(r.len());
            parallel_step(&sh.ctx, q, classifier, r.data, r.other, parts, move |q, k: &CharClassifier, res| {
                finish_step(sh, q, r, k, res)
            });
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

fn finish_step<'s, C: ParallelStats>(
    sh: &'s Shared<'s, C>,
    q: &JobQueue<'s>,
    r: Region<'s>,
    k: &CharClassifier,
    res: StepResult<()>,
) {
    let mut children = Vec::new();
    let mut start = 0;
    for (b, &c) in res.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let child = r.child(start..start + c, r.depth + k.advance());
        start += c;
        if c == 1 || k.is_finished(b) {
            // SAFETY: the finish job owns the whole region
            unsafe { child.settle() };
        } else {
            children.push(child);
        }
    }
    dispatch(sh, q, children);
}

fn small_sort_job<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, mut stack: Vec<Region<'s>>) {
    let mut stats = C::default();
    let variant = if sh.bits == 16 { RadixVariant::CI3 } else { RadixVariant::CI2 };
    while let Some(r) = stack.pop() {
        // SAFETY: regions on the stack are owned by this job
        let order = unsafe { r.settle() };
        radix_sort(sh.ctx.st, order, r.depth, variant, &mut stats);
        while stack.len() > 1 && q.has_idle() {
            let half = stack.split_off(stack.len() / 2);
            q.share(move |q| small_sort_job(sh, q, half));
        }
    }
    sh.ctx.commit(&stats);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use stringsort_core::strset::oracle_sort;
    use stringsort_core::{NoStats, StringSet};

    #[test]
    fn both_widths_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let items: Vec<Vec<u8>> =
            (0..80_000).map(|_| (0..rng.gen_range(0..8)).map(|_| rng.gen_range(b'a'..=b'e')).collect()).collect();
        let s = StringSet::from_strings(&items).unwrap();
        let expect = oracle_sort(s.strings(), s.handles());
        for bits in [8, 16] {
            for threads in [1, 2, 4] {
                let mut order = s.handles().to_vec();
                parallel_radix(s.strings(), &mut order, threads, bits, &mut NoStats);
                assert!(s.values(&order).eq(s.values(&expect)), "bits {bits} p {threads}");
            }
        }
    }

    #[test]
    fn single_character_alphabet() {
        let items: Vec<String> = (0..5000).map(|i| "a".repeat(i % 50)).collect();
        let s = StringSet::from_strings(&items).unwrap();
        let mut order = s.handles().to_vec();
        parallel_radix(s.strings(), &mut order, 3, 16, &mut NoStats);
        assert!(s.values(&order).eq(s.values(&oracle_sort(s.strings(), s.handles()))));
    }
}
