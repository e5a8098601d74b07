mod common;

use common::{naive_l_d, naive_lcps, naive_sorted};
use proptest::collection::vec;
use proptest::prelude::*;
use stringsort_core::lcpmerge::{binary_lcp_mergesort, kway_lcp_mergesort, lcp_insertion_sort};
use stringsort_core::seqsort::{caching_mkqs, caching_mkqs_lcp, insertion_sort, multikey_quicksort, radix_sort, RadixVariant};
use stringsort_core::ssss::{classify, level_of_pre, pre_of_level, seq_s5, ClassifyVariant, S5Config, SplitterTree};
use stringsort_core::strset::{lcp_array_oracle, metrics, verify};
use stringsort_core::{NoStats, StringSet};

const VARIANTS: [ClassifyVariant; 3] = [ClassifyVariant::E, ClassifyVariant::UI, ClassifyVariant::UIC];

fn items() -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop_oneof![
        vec(vec(b'a'..=b'c', 0..12), 0..200),
        vec(vec(1u8..=255, 0..20), 0..200),
        vec(vec(b'x'..=b'x', 0..40), 0..100),
    ]
}

fn values(s: &StringSet, order: &[usize]) -> Vec<Vec<u8>> {
    s.values(order).map(<[u8]>::to_vec).collect()
}

/// Sample sort settings small enough that proptest inputs take real steps.
fn small_s5(variant: ClassifyVariant, seed: u64) -> S5Config {
    S5Config {
        levels: 2,
        variant,
        sample_threshold: 8,
        insertion_threshold: 4,
        emit_lcp: true,
        emit_cached_char: true,
        seed,
        ..S5Config::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sequential_sorters_agree_with_naive_sort(items in items()) {
        let s = StringSet::from_strings(&items).unwrap();
        let st = s.strings();
        let expect = naive_sorted(&items);
        let mut runs: Vec<(&str, Vec<usize>)> = Vec::new();
        let mut o = s.handles().to_vec();
        insertion_sort(st, &mut o, 0, &mut NoStats);
        runs.push(("insertion", o));
        let mut o = s.handles().to_vec();
        multikey_quicksort(st, &mut o, 0, &mut NoStats);
        runs.push(("mkqs", o));
        let mut o = s.handles().to_vec();
        caching_mkqs(st, &mut o, 0, &mut NoStats);
        runs.push(("caching mkqs", o));
        for v in [RadixVariant::CE0, RadixVariant::CE1, RadixVariant::CE2, RadixVariant::CI2, RadixVariant::CI3] {
            let mut o = s.handles().to_vec();
            radix_sort(st, &mut o, 0, v, &mut NoStats);
            runs.push(("radix", o));
        }
        for (name, order) in runs {
            prop_assert_eq!(values(&s, &order), expect.clone(), "{}", name);
            prop_assert!(verify(st, &order, s.handles(), None).is_ok());
        }
    }

    #[test]
    fn lcp_producing_sorters_match_naive_lcps(items in items(), seed in any::<u64>()) {
        let s = StringSet::from_strings(&items).unwrap();
        let st = s.strings();
        let expect = naive_sorted(&items);
        let expect_lcp = naive_lcps(&expect);
        let n = items.len();
        let mut runs: Vec<(&str, Vec<usize>, Vec<usize>)> = Vec::new();
        let mut o = s.handles().to_vec();
        let l = binary_lcp_mergesort(st, &mut o, &mut NoStats);
        runs.push(("binary mergesort", o, l.into_inner()));
        for k in [2, 4, 16] {
            let mut o = s.handles().to_vec();
            let l = kway_lcp_mergesort(st, &mut o, k, &mut NoStats);
            runs.push(("kway mergesort", o, l.into_inner()));
        }
        let mut o = s.handles().to_vec();
        let mut l = vec![0; n];
        lcp_insertion_sort(st, &mut o, &mut l, 0, &mut NoStats);
        runs.push(("lcp insertion", o, l));
        let mut o = s.handles().to_vec();
        let mut l = vec![0; n];
        caching_mkqs_lcp(st, &mut o, &mut l, 0, &mut NoStats);
        runs.push(("caching mkqs", o, l));
        for variant in VARIANTS {
            let mut o = s.handles().to_vec();
            let out = seq_s5(st, &mut o, &small_s5(variant, seed), &mut NoStats);
            let l = out.lcp.expect("lcp requested").into_inner();
            let cached = out.cached_chars.expect("cached chars requested");
            for (i, &h) in o.iter().enumerate() {
                let body = st.body(h);
                let depth = if i == 0 { 0 } else { l[i] };
                prop_assert_eq!(cached[i], body.get(depth).copied().unwrap_or(0));
            }
            runs.push(("sample sort", o, l));
        }
        for (name, order, lcp) in runs {
            prop_assert_eq!(values(&s, &order), expect.clone(), "{}", name);
            if n > 1 {
                prop_assert_eq!(&lcp[1..], &expect_lcp[1..], "{}", name);
            }
        }
    }

    #[test]
    fn distinguishing_prefix_bounds(items in items()) {
        let s = StringSet::from_strings(&items).unwrap();
        let (l, d) = naive_l_d(&items);
        let n = items.len();
        prop_assert!(n + l <= d && d <= 2 * l + n);
        let mut o = s.handles().to_vec();
        caching_mkqs(s.strings(), &mut o, 0, &mut NoStats);
        let lcp = lcp_array_oracle(s.strings(), &o).unwrap();
        let m = metrics(&s, &o, &lcp);
        prop_assert_eq!((m.n, m.lcp_sum, m.distinguishing), (n, l, d));
        prop_assert_eq!(m.total_chars, items.iter().map(|v| v.len() + 1).sum::<usize>());
    }

    #[test]
    fn classification_variants_agree(
        levels in 1u32..=6,
        splitter_pool in vec(0u64..64, 1..8),
        keys in vec(0u64..80, 1..300),
        interleave in 1usize..=8,
    ) {
        let v = (1usize << levels) - 1;
        let mut splitters: Vec<u64> = (0..v).map(|i| splitter_pool[i % splitter_pool.len()] << 56).collect();
        splitters.sort_unstable();
        let keys: Vec<u64> = keys.into_iter().map(|k| k << 56).collect();
        let tree = SplitterTree::new(splitters.clone(), levels).unwrap();
        let expect: Vec<u16> = keys
            .iter()
            .map(|&k| {
                let below = splitters.iter().filter(|&&x| x < k).count();
                (2 * below + usize::from(splitters.contains(&k))) as u16
            })
            .collect();
        for variant in VARIANTS {
            let mut out = vec![0u16; keys.len()];
            classify(&tree, &keys, &mut out, variant, interleave);
            prop_assert_eq!(&out, &expect, "{:?}", variant);
        }
    }

    #[test]
    fn index_maps_are_inverse(levels in 1u32..=12, seed in any::<usize>()) {
        let i = seed % ((1usize << levels) - 1) + 1;
        let p = pre_of_level(i, levels).unwrap();
        prop_assert_eq!(level_of_pre(p, levels).unwrap(), i);
        prop_assert_eq!(pre_of_level(level_of_pre(i, levels).unwrap(), levels).unwrap(), i);
    }
}
