//! Catalog of runnable sorters.

use stringsort_core::lcpmerge::{binary_lcp_mergesort, kway_lcp_mergesort, lcp_insertion_sort};
use stringsort_core::seqsort::{
    caching_mkqs, caching_mkqs_lcp, insertion_sort, multikey_quicksort, radix_sort, RadixVariant,
};
use stringsort_core::ssss::{seq_s5, ClassifyVariant, S5Config};
use stringsort_core::{LcpArray, NoStats, SortStats, Strings};

use crate::parsort::{
    parallel_mkqs, parallel_radix, parallel_s5, partitioned_sort, MergeOptions, SplitStrategy, DEFAULT_BLOCK,
};

/// Run-time parameters handed to every sorter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortParams {
    pub threads: usize,
    /// Partitions for the partition-then-merge sorters.
    pub parts: usize,
    pub seed: u64,
    /// Ask for the LCP array where the sorter can produce it.
    pub lcp: bool,
    /// Block size of parallel multikey quicksort.
    pub block: usize,
}

impl Default for SortParams {
    fn default() -> Self {
        Self { threads: 1, parts: 1, seed: 1, lcp: false, block: DEFAULT_BLOCK }
    }
}

/// Sorts `order` in place; returns the LCP array if one was produced.
pub type PlainFn = fn(Strings<'_>, &mut [usize], &SortParams) -> Option<LcpArray>;
/// As [`PlainFn`], recording operation counts.
pub type CountedFn = fn(Strings<'_>, &mut [usize], &SortParams, &mut SortStats) -> Option<LcpArray>;

/// A registered sorter. Each one is compiled twice: without counters for
/// timing and with [`SortStats`] for the statistics mode.
#[derive(Clone, Copy)]
pub struct Algorithm {
    pub id: &'static str,
    pub module: &'static str,
    pub description: &'static str,
    pub plain: PlainFn,
    pub counted: CountedFn,
}

impl std::fmt::Debug for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algorithm").field("id", &self.id).field("module", &self.module).finish()
    }
}

macro_rules! algorithm {
    ($id:expr, $module:expr, $desc:expr, |$st:ident, $order:ident, $p:ident, $stats:ident| $body:expr) => {{
        fn plain($st: Strings<'_>, $order: &mut [usize], $p: &SortParams) -> Option<LcpArray> {
            let $stats = &mut NoStats;
            $body
        }
        fn counted($st: Strings<'_>, $order: &mut [usize], $p: &SortParams, $stats: &mut SortStats) -> Option<LcpArray> {
            $body
        }
        Algorithm { id: $id, module: $module, description: $desc, plain, counted }
    }};
}

fn s5_config(variant: ClassifyVariant, p: &SortParams) -> S5Config {
    S5Config { variant, emit_lcp: p.lcp, seed: p.seed, ..S5Config::default() }
}

fn merge_options(strategy: SplitStrategy, p: &SortParams) -> MergeOptions {
    MergeOptions { strategy, threads: p.threads, seed: p.seed, ..MergeOptions::default() }
}

/// Partitions used by the merge sorters when none are configured.
fn merge_parts(p: &SortParams) -> usize {
    if p.parts > 1 {
        p.parts
    } else {
        8
    }
}

/// Every registered sorter, in a stable order.
pub fn list_algorithms() -> Vec<Algorithm> {
    vec![
        algorithm!("insertion", "seqsort", "insertion sort (quadratic)", |st, o, _p, s| {
            insertion_sort(st, o, 0, s);
            None
        }),
        algorithm!("mkqs", "seqsort", "multikey quicksort, one character per step", |st, o, _p, s| {
            multikey_quicksort(st, o, 0, s);
            None
        }),
        algorithm!("mkqs-cache8", "seqsort", "caching multikey quicksort on 8-character keys", |st, o, p, s| {
            if p.lcp {
                let mut lcp = vec![0; o.len()];
                caching_mkqs_lcp(st, o, &mut lcp, 0, s);
                Some(LcpArray::new(lcp))
            } else {
                caching_mkqs(st, o, 0, s);
                None
            }
        }),
        algorithm!("radix-ce0", "seqsort", "out-of-place radix sort, characters read twice", |st, o, _p, s| {
            radix_sort(st, o, 0, RadixVariant::CE0, s);
            None
        }),
        algorithm!("radix-ce1", "seqsort", "out-of-place radix sort with character oracle", |st, o, _p, s| {
            radix_sort(st, o, 0, RadixVariant::CE1, s);
            None
        }),
        algorithm!("radix-ce2", "seqsort", "out-of-place radix sort, fissioned counting loop", |st, o, _p, s| {
            radix_sort(st, o, 0, RadixVariant::CE2, s);
            None
        }),
        algorithm!("radix-ci2", "seqsort", "in-place radix sort with character cache", |st, o, _p, s| {
            radix_sort(st, o, 0, RadixVariant::CI2, s);
            None
        }),
        algorithm!("radix-ci3", "seqsort", "in-place radix sort, 16-bit steps on large regions", |st, o, _p, s| {
            radix_sort(st, o, 0, RadixVariant::CI3, s);
            None
        }),
        algorithm!("seq-s5-e", "ssss", "string sample sort, equality-first classification", |st, o, p, s| {
            seq_s5(st, o, &s5_config(ClassifyVariant::E, p), s).lcp
        }),
        algorithm!("seq-s5-ui", "ssss", "string sample sort, unrolled interleaved descent", |st, o, p, s| {
            seq_s5(st, o, &s5_config(ClassifyVariant::UI, p), s).lcp
        }),
        algorithm!("seq-s5-uic", "ssss", "string sample sort, unrolled interleaved with equality check", |st, o, p, s| {
            seq_s5(st, o, &s5_config(ClassifyVariant::UIC, p), s).lcp
        }),
        algorithm!("lcp-mergesort-2way", "lcpmerge", "binary LCP mergesort", |st, o, _p, s| {
            Some(binary_lcp_mergesort(st, o, s))
        }),
        algorithm!("lcp-mergesort-kway", "lcpmerge", "8-way LCP mergesort on a loser tree", |st, o, _p, s| {
            Some(kway_lcp_mergesort(st, o, 8, s))
        }),
        algorithm!("lcp-insertion", "lcpmerge", "LCP insertion sort (quadratic)", |st, o, _p, s| {
            let mut lcp = vec![0; o.len()];
            lcp_insertion_sort(st, o, &mut lcp, 0, s);
            Some(LcpArray::new(lcp))
        }),
        algorithm!("ps5-e", "parsort", "parallel string sample sort, variant E", |st, o, p, s| {
            parallel_s5(st, o, p.threads, &s5_config(ClassifyVariant::E, p), s).lcp
        }),
        algorithm!("ps5-ui", "parsort", "parallel string sample sort, variant UI", |st, o, p, s| {
            parallel_s5(st, o, p.threads, &s5_config(ClassifyVariant::UI, p), s).lcp
        }),
        algorithm!("ps5-uic", "parsort", "parallel string sample sort, variant UIC", |st, o, p, s| {
            parallel_s5(st, o, p.threads, &s5_config(ClassifyVariant::UIC, p), s).lcp
        }),
        algorithm!("pmkqs", "parsort", "parallel block-wise caching multikey quicksort", |st, o, p, s| {
            parallel_mkqs(st, o, p.threads, p.block, s);
            None
        }),
        algorithm!("pradix8", "parsort", "parallel radix sort, 8-bit top-level steps", |st, o, p, s| {
            parallel_radix(st, o, p.threads, 8, s);
            None
        }),
        algorithm!("pradix16", "parsort", "parallel radix sort, 16-bit top-level steps", |st, o, p, s| {
            parallel_radix(st, o, p.threads, 16, s);
            None
        }),
        algorithm!("pmerge-binary", "parsort", "sorted parts merged in parallel, binary splitting", |st, o, p, s| {
            let options = merge_options(SplitStrategy::Binary, p);
            Some(partitioned_sort(st, o, merge_parts(p), &s5_config(ClassifyVariant::UIC, p), &options, s))
        }),
        algorithm!("pmerge-multiway", "parsort", "sorted parts merged in parallel, sampled splitters", |st, o, p, s| {
            let options = merge_options(SplitStrategy::Multiway, p);
            Some(partitioned_sort(st, o, merge_parts(p), &s5_config(ClassifyVariant::UIC, p), &options, s))
        }),
        algorithm!("pmerge-lcp", "parsort", "sorted parts merged in parallel, LCP splitting", |st, o, p, s| {
            let options = merge_options(SplitStrategy::Lcp, p);
            Some(partitioned_sort(st, o, merge_parts(p), &s5_config(ClassifyVariant::UIC, p), &options, s))
        }),
        algorithm!("partitioned", "parsort", "parallel sample sort per part, then parallel merge", |st, o, p, s| {
            let options = merge_options(SplitStrategy::Lcp, p);
            Some(partitioned_sort(st, o, p.parts.max(1), &s5_config(ClassifyVariant::UIC, p), &options, s))
        }),
        algorithm!("std-sort", "bench", "standard library sort on string slices (baseline)", |st, o, _p, s| {
            let _ = s;
            o.sort_unstable_by(|&a, &b| st.cmp(a, b));
            None
        }),
    ]
}

/// Looks up a sorter by id.
pub fn find_algorithm(id: &str) -> Option<Algorithm> {
    list_algorithms().into_iter().find(|a| a.id == id)
}
