//! Parallel caching multikey quicksort over blocks of (handle, key) pairs.
//!
//! A parallel step partitions a region around one pivot key. Workers claim
//! input blocks one at a time and hold one output block per class (`<`, `=`,
//! `>`); full blocks go to the class lists, so at most `3p` blocks of a step
//! are partially filled. Only the `=` class reloads its keys, eight
//! characters deeper.

use std::cmp::Ordering as Cmp;
use std::mem::size_of;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use stringsort_core::seqsort::{caching_mkqs_task, key_has_terminator, MkqsTask};
use stringsort_core::{Strings, WORD_CHARS};

use super::raw::RawSlice;
use super::{Ctx, JobQueue, ParallelStats, QueueShare};

/// Default block size in strings.
pub const DEFAULT_BLOCK: usize = 1 << 17;

/// Regions below this never take a parallel step.
const MIN_PARALLEL: usize = 1 << 12;

type Block = Vec<(usize, u64)>;

struct Shared<'s, C> {
    ctx: Ctx<'s, C>,
    out: RawSlice<'s, usize>,
    block: usize,
}

/// A region held as blocks whose keys are loaded at `depth`.
struct Part {
    blocks: Vec<Block>,
    len: usize,
    depth: usize,
    pos: usize,
}

struct Step {
    input: Mutex<Vec<Block>>,
    pivot: u64,
    depth: usize,
    pos: usize,
    /// Output block lists for `<`, `=`, `>`.
    classes: [Mutex<Vec<Block>>; 3],
    remaining: AtomicUsize,
}

/// Parallel caching multikey quicksort with blocks of `block` strings.
pub fn parallel_mkqs<C: ParallelStats>(
    st: Strings<'_>,
    order: &mut [usize],
    threads: usize,
    block: usize,
    stats: &mut C,
) {
    let n = order.len();
    if n < 2 {
        return;
    }
    let block = block.max(1);
    let threads = threads.max(1);
    let blocks: Vec<Block> = order.chunks(block).map(|c| c.iter().map(|&s| (s, st.key(s, 0))).collect()).collect();
    stats.string_access(n as u64);
    stats.aux_alloc(n * size_of::<(usize, u64)>());
    let shared = Shared { ctx: Ctx::new(st, n, threads), out: RawSlice::new(order), block };
    let queue = JobQueue::new(threads);
    dispatch(&shared, &queue, Part { blocks, len: n, depth: 0, pos: 0 });
    queue.run();
    drop(queue);
    stats.absorb(&shared.ctx.into_stats());
    stats.aux_free(n * size_of::<(usize, u64)>());
}

fn dispatch<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, part: Part) {
    if part.len == 0 {
        return;
    }
    if part.len == 1 {
        let (s, _) = part.blocks.iter().flatten().next().copied().expect("one string");
        // SAFETY: the output range of a part belongs to its owner
        unsafe { sh.out.write(part.pos, s) };
        return;
    }
    if part.len >= sh.ctx.parallel_threshold().max(MIN_PARALLEL) {
        start_step(sh, q, part);
    } else {
        q.enqueue(move |q| sort_part(sh, q, part));
    }
}

fn start_step<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, part: Part) {
    let mid = part.blocks.len() / 2;
    let probe = [
        part.blocks[0][0].1,
        part.blocks[mid][part.blocks[mid].len() / 2].1,
        *part.blocks.last().and_then(|b| b.last()).map(|(_, k)| k).expect("non-empty"),
    ];
    let mut sorted = probe;
    sorted.sort_unstable();
    let parts = sh.ctx.share_of(part.len).min(part.blocks.len());
    let step = Arc::new(Step {
        input: Mutex::new(part.blocks),
        pivot: sorted[1],
        depth: part.depth,
        pos: part.pos,
        classes: Default::default(),
        remaining: AtomicUsize::new(parts),
    });
    for _ in 0..parts {
        let step = Arc::clone(&step);
        q.enqueue(move |q| partition_job(sh, q, step));
    }
}

fn partition_job<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, step: Arc<Step>) {
    let mut stats = C::default();
    let st = sh.ctx.st;
    let refresh = !key_has_terminator(step.pivot);
    let deeper = step.depth + WORD_CHARS;
    let mut local: [Block; 3] = Default::default();
    let (mut seen, mut reloaded) = (0u64, 0u64);
    loop {
        let Some(input) = step.input.lock().expect("input lock").pop() else {
            break;
        };
        seen += input.len() as u64;
        for &(s, k) in &input {
            let class = match k.cmp(&step.pivot) {
                Cmp::Less => 0,
                Cmp::Equal => 1,
                Cmp::Greater => 2,
            };
            let k = if class == 1 && refresh {
                reloaded += 1;
                st.key(s, deeper)
            } else {
                k
            };
            let out = &mut local[class];
            if out.capacity() == 0 {
                out.reserve_exact(sh.block);
            }
            out.push((s, k));
            if out.len() == sh.block {
                step.classes[class].lock().expect("class lock").push(std::mem::take(out));
            }
        }
    }
    stats.char_cmp(seen);
    stats.string_access(reloaded);
    for (class, out) in local.into_iter().enumerate() {
        if !out.is_empty() {
            step.classes[class].lock().expect("class lock").push(out);
        }
    }
    sh.ctx.commit(&stats);
    if step.remaining.fetch_sub(1, Ordering::AcqRel) != 1 {
        return;
    }

    let mut pos = step.pos;
    for class in 0..3 {
        let blocks = std::mem::take(&mut *step.classes[class].lock().expect("class lock"));
        let len = blocks.iter().map(Vec::len).sum();
        if class == 1 && !refresh {
            // equal strings that end inside the pivot word
            for (i, &(s, _)) in blocks.iter().flatten().enumerate() {
                // SAFETY: the output range of the `=` class belongs to this job
                unsafe { sh.out.write(pos + i, s) };
            }
        } else {
            let depth = if class == 1 { deeper } else { step.depth };
            dispatch(sh, q, Part { blocks, len, depth, pos });
        }
        pos += len;
    }
}

/// Compacts a part into its output range plus a key cache and sorts it
/// sequentially, sharing pending regions with idle workers.
fn sort_part<'s, C: ParallelStats>(sh: &'s Shared<'s, C>, q: &JobQueue<'s>, part: Part) {
    let mut stats = C::default();
    // SAFETY: the output range of a part belongs to its owner
    let order = unsafe { sh.out.sub(part.pos..part.pos + part.len).get_mut() };
    let mut cache = Vec::with_capacity(part.len);
    stats.aux_alloc(part.len * size_of::<u64>());
    for ((s, k), o) in part.blocks.into_iter().flatten().zip(order.iter_mut()) {
        *o = s;
        cache.push(k);
    }
    let task = MkqsTask { order, cache: &mut cache, lcp: None, depth: part.depth };
    caching_mkqs_task(sh.ctx.st, task, &mut stats, &mut QueueShare { ctx: &sh.ctx, queue: q });
    stats.aux_free(cache.len() * size_of::<u64>());
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
    fn small_blocks_many_threads() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let items: Vec<Vec<u8>> =
            (0..50_000).map(|_| (0..rng.gen_range(0..20)).map(|_| rng.gen_range(b'0'..=b'1')).collect()).collect();
        let s = StringSet::from_strings(&items).unwrap();
        let expect = oracle_sort(s.strings(), s.handles());
        for (threads, block) in [(1, DEFAULT_BLOCK), (2, 1000), (4, 64), (8, 7)] {
            let mut order = s.handles().to_vec();
            parallel_mkqs(s.strings(), &mut order, threads, block, &mut NoStats);
            assert!(s.values(&order).eq(s.values(&expect)), "p {threads} block {block}");
        }
    }

    #[test]
    fn all_equal_input_terminates() {
        for text in ["", "abcdefghijklmnopq"] {
            let items = vec![text; 20_000];
            let s = StringSet::from_strings(&items).unwrap();
            let mut order = s.handles().to_vec();
            parallel_mkqs(s.strings(), &mut order, 4, 512, &mut NoStats);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, s.handles());
        }
    }
}
