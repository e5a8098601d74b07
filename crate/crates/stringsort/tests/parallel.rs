mod common;

use std::sync::atomic::{AtomicUsize, Ordering};

use common::{distinct, naive_lcps, naive_values, random, random2, same_values, suffixes, urls, values_of, Input};
use proptest::prelude::*;
use stringsort::bench::{find_algorithm, SortParams};
use stringsort::parsort::{
    parallel_kway_lcp_merge, parallel_s5, plan_merge_split, JobQueue, MergeOptions, SplitStrategy,
};
use stringsort_core::lcpmerge::{kway_lcp_merge, MergeStream};
use stringsort_core::ssss::{ClassifyVariant, S5Config};
use stringsort_core::strset::{lcp_array_oracle, oracle_sort, verify};
use stringsort_core::{NoStats, StringSet};

/// Each parallel sorter with its sequential counterpart.
const PAIRS: [(&str, &str); 10] = [
    ("ps5-e", "seq-s5-e"),
    ("ps5-ui", "seq-s5-ui"),
    ("ps5-uic", "seq-s5-uic"),
    ("pmkqs", "mkqs-cache8"),
    ("pradix8", "radix-ci2"),
    ("pradix16", "radix-ci3"),
    ("pmerge-binary", "lcp-mergesort-kway"),
    ("pmerge-multiway", "lcp-mergesort-kway"),
    ("pmerge-lcp", "lcp-mergesort-kway"),
    ("partitioned", "lcp-mergesort-kway"),
];

const THREADS: [usize; 4] = [1, 2, 4, 8];

fn sort_with(id: &str, set: &StringSet, params: &SortParams) -> Vec<usize> {
    let algo = find_algorithm(id).unwrap();
    let mut order = set.handles().to_vec();
    (algo.plain)(set.strings(), &mut order, params);
    order
}

#[test]
fn parallel_sorters_equal_sequential_ones() {
    let inputs = [random(120_000, 1), random2(120_000, 2), suffixes(60_000, 3), urls(40_000, 4)];
    for Input { name, set } in &inputs {
        for (par, seq) in PAIRS {
            let expect = sort_with(seq, set, &SortParams::default());
            for threads in THREADS {
                let params = SortParams { threads, parts: 4, block: 4096, ..SortParams::default() };
                for rep in 0..5 {
                    let order = sort_with(par, set, &params);
                    assert!(same_values(set, &order, &expect), "{par} p={threads} rep={rep} on {name}");
                }
            }
        }
    }
}

#[test]
fn permutations_identical_on_distinct_input() {
    let Input { set, .. } = distinct(100_000, 5);
    for (par, seq) in PAIRS {
        let expect = sort_with(seq, &set, &SortParams::default());
        for threads in THREADS {
            let params = SortParams { threads, parts: 3, block: 2048, ..SortParams::default() };
            for _ in 0..5 {
                assert_eq!(sort_with(par, &set, &params), expect, "{par} p={threads}");
            }
        }
    }
}

#[test]
fn parallel_sample_sort_with_small_steps() {
    // small trees and thresholds force many parallel and sequential steps
    let Input { set, .. } = random2(50_000, 6);
    let expect = naive_values(&set);
    let lcps = naive_lcps(&expect);
    for variant in [ClassifyVariant::E, ClassifyVariant::UI, ClassifyVariant::UIC] {
        let config = S5Config {
            levels: 3,
            variant,
            sample_threshold: 64,
            insertion_threshold: 8,
            emit_lcp: true,
            emit_cached_char: true,
            ..S5Config::default()
        };
        for threads in THREADS {
            let mut order = set.handles().to_vec();
            let out = parallel_s5(set.strings(), &mut order, threads, &config, &mut NoStats);
            assert!(values_of(&set, &order) == expect, "{variant:?} p={threads}");
            assert_eq!(&out.lcp.unwrap()[1..], &lcps[1..]);
        }
    }
}

#[test]
fn queue_runs_every_job_exactly_once() {
    let slots: Vec<AtomicUsize> = (0..2000).map(|_| AtomicUsize::new(0)).collect();
    for threads in THREADS {
        slots.iter().for_each(|s| s.store(0, Ordering::Relaxed));
        let q = JobQueue::new(threads);
        fn fan<'s>(q: &JobQueue<'s>, slots: &'s [AtomicUsize]) {
            slots[0].fetch_add(1, Ordering::Relaxed);
            if slots.len() > 1 {
                let (left, right) = slots[1..].split_at((slots.len() - 1) / 2);
                for half in [left, right] {
                    if !half.is_empty() {
                        q.enqueue(move |q| fan(q, half));
                    }
                }
            }
        }
        let all = &slots[..];
        q.enqueue(move |q| fan(q, all));
        q.run();
        let counts = q.counts();
        assert_eq!(counts.enqueued, counts.executed);
        assert_eq!(counts.executed, slots.len());
        assert!(slots.iter().all(|s| s.load(Ordering::Relaxed) == 1), "p={threads}");
    }
}

#[test]
fn idle_workers_receive_shared_work() {
    // one long job polls for idle workers and publishes a piece when it sees one
    const MAX_POLLS: usize = 10_000_000;
    for threads in [2, 4] {
        let polls = AtomicUsize::new(0);
        let ran_shared = AtomicUsize::new(0);
        let q = JobQueue::new(threads);
        let (polls_ref, shared_ref) = (&polls, &ran_shared);
        q.enqueue(move |q| {
            while polls_ref.fetch_add(1, Ordering::Relaxed) < MAX_POLLS {
                if q.has_idle() {
                    q.share(move |_| {
                        shared_ref.fetch_add(1, Ordering::Relaxed);
                    });
                    break;
                }
                std::thread::yield_now();
            }
        });
        q.run();
        let used = polls.load(Ordering::Relaxed);
        assert!(used < MAX_POLLS, "p={threads}: no idle worker seen");
        assert_eq!(ran_shared.load(Ordering::Relaxed), 1);
        assert_eq!(q.counts().shared, 1);
    }
}

#[test]
fn merge_rebalances_a_single_job() {
    // all-equal streams give one multiway job; an idle worker triggers re-splits
    let set = StringSet::from_strings(vec!["equal"; 400_000]).unwrap();
    let st = set.strings();
    let chunks: Vec<Vec<usize>> = set.handles().chunks(50_000).map(<[usize]>::to_vec).collect();
    let lcps: Vec<Vec<usize>> = chunks
        .iter()
        .map(|c| (0..c.len()).map(|i| if i == 0 { 0 } else { 5 }).collect())
        .collect();
    let streams: Vec<_> = chunks.iter().zip(&lcps).map(|(c, l)| MergeStream::new(c, l)).collect();
    let options =
        MergeOptions { strategy: SplitStrategy::Multiway, threads: 2, poll_interval: 256, ..MergeOptions::default() };
    let mut resplit = false;
    for _ in 0..5 {
        let out = parallel_kway_lcp_merge(st, &streams, &options, &mut NoStats);
        assert_eq!(out.planned_jobs, 1);
        verify(st, &out.order, set.handles(), Some(&out.lcp)).unwrap();
        resplit |= out.resplits > 0;
        if resplit {
            break;
        }
    }
    assert!(resplit, "no re-split in five runs");
}

/// Sorted runs of a random partition of `items`.
fn sorted_runs(set: &StringSet, k: usize, picks: &[usize]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let st = set.strings();
    let mut parts = vec![Vec::new(); k];
    for (i, &h) in set.handles().iter().enumerate() {
        parts[picks[i % picks.len()] % k].push(h);
    }
    parts
        .into_iter()
        .map(|p| {
            let o = oracle_sort(st, &p);
            let l = lcp_array_oracle(st, &o).unwrap().into_inner();
            (o, l)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plans_cut_at_ordered_boundaries(
        items in proptest::collection::vec(proptest::collection::vec(b'a'..=b'c', 0..8), 0..400),
        picks in proptest::collection::vec(0usize..64, 1..50),
        k in 1usize..9,
        target in 1usize..40,
        seed in any::<u64>(),
    ) {
        let set = StringSet::from_strings(&items).unwrap();
        let st = set.strings();
        let runs = sorted_runs(&set, k, &picks);
        let streams: Vec<_> = runs.iter().map(|(o, l)| MergeStream::new(o, l)).collect();
        let n = set.len();
        for strategy in [SplitStrategy::Binary, SplitStrategy::Multiway, SplitStrategy::Lcp] {
            let plan = plan_merge_split(st, &streams, strategy, target, seed);
            let mut out = vec![0; n];
            let mut out_lcp = vec![0; n];
            let mut at = 0;
            let mut prev_last: Option<usize> = None;
            for job in &plan.jobs {
                prop_assert_eq!(job.out_start, at);
                prop_assert_eq!(job.ranges.len(), streams.len());
                let parts: Vec<_> = streams.iter().zip(&job.ranges).map(|(s, r)| s.slice(r.clone())).collect();
                let len = job.len();
                kway_lcp_merge(
                    st,
                    &parts,
                    job.hbar,
                    &mut out[at..at + len],
                    &mut out_lcp[at..at + len],
                    None,
                    false,
                    &mut NoStats,
                );
                let first = out[at];
                // every string of the job shares hbar characters with the first
                for &s in &out[at..at + len] {
                    prop_assert!(st.lcp(first, s) >= job.hbar);
                }
                if let Some(p) = prev_last {
                    prop_assert!(st.body(p) <= st.body(first), "{:?}", strategy);
                }
                prev_last = Some(out[at + len - 1]);
                at += len;
            }
            prop_assert_eq!(at, n);
            prop_assert!(verify(st, &out, set.handles(), None).is_ok(), "{:?}", strategy);
        }
    }

    #[test]
    fn parallel_merge_matches_naive_sort(
        items in proptest::collection::vec(proptest::collection::vec(b'a'..=b'b', 0..10), 0..3000),
        picks in proptest::collection::vec(0usize..16, 1..30),
        k in 1usize..9,
        threads in 1usize..5,
        strategy in prop_oneof![Just(SplitStrategy::Binary), Just(SplitStrategy::Multiway), Just(SplitStrategy::Lcp)],
    ) {
        let set = StringSet::from_strings(&items).unwrap();
        let runs = sorted_runs(&set, k, &picks);
        let streams: Vec<_> = runs.iter().map(|(o, l)| MergeStream::new(o, l)).collect();
        let options = MergeOptions { strategy, threads, poll_interval: 16, ..MergeOptions::default() };
        let out = parallel_kway_lcp_merge(set.strings(), &streams, &options, &mut NoStats);
        let expect = naive_values(&set);
        prop_assert_eq!(values_of(&set, &out.order), expect.clone());
        if !expect.is_empty() {
            prop_assert_eq!(&out.lcp[1..], &naive_lcps(&expect)[1..]);
        }
    }
}
