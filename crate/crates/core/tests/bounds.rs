//! Character comparison and string access bounds, checked exactly with
//! `SortStats` on random and adversarial inputs.

mod common;

use common::{log2_ceil, naive_l_d, naive_lcps, naive_sorted, random_items, set};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stringsort_core::lcpmerge::{
    binary_lcp_mergesort, kway_lcp_merge, kway_lcp_mergesort, lcp_insertion_sort, MergeStream,
};
use stringsort_core::seqsort::caching_mkqs;
use stringsort_core::strset::oracle_sort;
use stringsort_core::{SortStats, StringSet};

/// Instance sizes for the randomized rounds; a few reach 10^5.
fn instances(rounds: usize, seed: u64) -> Vec<Vec<Vec<u8>>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..rounds)
        .map(|r| {
            let n = match r % 10 {
                0 if r < 20 => 100_000,
                0..=3 => rng.gen_range(1_000..20_000),
                _ => rng.gen_range(0..1_000),
            };
            let (max_len, hi) = [(20, b'~'), (12, b'b'), (30, b'd'), (4, b'z')][r % 4];
            random_items(n, max_len, if hi == b'~' { b'!' } else { b'a' }, hi, seed ^ r as u64)
        })
        .collect()
}

fn all_equal(n: usize) -> Vec<Vec<u8>> {
    vec![b"equal-string-value".to_vec(); n]
}

fn values(s: &StringSet, order: &[usize]) -> Vec<Vec<u8>> {
    s.values(order).map(<[u8]>::to_vec).collect()
}

#[test]
fn binary_mergesort_comparisons() {
    let mut cases = instances(100, 46);
    cases.push(all_equal(20_000));
    for items in cases {
        let s = set(&items);
        let (l, _) = naive_l_d(&items);
        let mut order = s.handles().to_vec();
        let mut stats = SortStats::new();
        let lcp = binary_lcp_mergesort(s.strings(), &mut order, &mut stats);
        let sorted = naive_sorted(&items);
        assert_eq!(values(&s, &order), sorted);
        assert_eq!(&lcp[1..], &naive_lcps(&sorted)[1.min(sorted.len())..]);
        let n = items.len();
        assert!(stats.char_cmp <= l as u64 + n as u64 * log2_ceil(n), "n={n}: {} > bound", stats.char_cmp);
    }
}

#[test]
fn kway_merge_comparisons() {
    let mut rng = StdRng::seed_from_u64(47);
    let mut cases = instances(100, 47);
    cases.push(all_equal(20_000));
    for (round, items) in cases.into_iter().enumerate() {
        let k = [2usize, 4, 8, 16, 64][round % 5];
        let s = set(&items);
        let st = s.strings();
        let mut parts = vec![Vec::new(); k];
        for &h in s.handles() {
            parts[rng.gen_range(0..k)].push(h);
        }
        let runs: Vec<(Vec<usize>, Vec<usize>)> = parts
            .into_iter()
            .map(|p| {
                let o = oracle_sort(st, &p);
                let v: Vec<Vec<u8>> = o.iter().map(|&h| st.body(h).to_vec()).collect();
                (o, naive_lcps(&v))
            })
            .collect();
        let streams: Vec<_> = runs.iter().map(|(o, l)| MergeStream::new(o, l)).collect();
        let n = s.len();
        let (mut out, mut out_lcp) = (vec![0; n], vec![0; n]);
        let mut stats = SortStats::new();
        kway_lcp_merge(st, &streams, 0, &mut out, &mut out_lcp, None, false, &mut stats);

        let sorted = naive_sorted(&items);
        assert_eq!(values(&s, &out), sorted);
        let (l_out, _) = naive_l_d(&items);
        let l_in: usize = runs.iter().map(|(_, l)| l.iter().sum::<usize>()).sum();
        let bound = (l_out - l_in) as u64 + n as u64 * u64::from(k.trailing_zeros()) + k as u64;
        assert!(stats.char_cmp <= bound, "n={n} K={k}: {} > {bound}", stats.char_cmp);
    }
}

#[test]
fn kway_mergesort_comparisons() {
    let mut cases = instances(100, 48);
    cases.push(all_equal(20_000));
    for (round, items) in cases.into_iter().enumerate() {
        let k = [2usize, 4, 8, 16][round % 4];
        let s = set(&items);
        let (l, _) = naive_l_d(&items);
        let mut order = s.handles().to_vec();
        let mut stats = SortStats::new();
        let lcp = kway_lcp_mergesort(s.strings(), &mut order, k, &mut stats);
        let sorted = naive_sorted(&items);
        assert_eq!(values(&s, &order), sorted);
        assert_eq!(&lcp[1.min(lcp.len())..], &naive_lcps(&sorted)[1.min(sorted.len())..]);
        let n = items.len();
        let mut levels = 0u32;
        while n > 0 && k.pow(levels) < n {
            levels += 1;
        }
        let bound = if n == 0 {
            0.0
        } else {
            l as f64
                + n as f64 * f64::from(levels) * f64::from(k.trailing_zeros())
                + (n - 1) as f64 * k as f64 / (k - 1) as f64
        };
        assert!(stats.char_cmp as f64 <= bound, "n={n} K={k}: {} > {bound}", stats.char_cmp);
    }
}

#[test]
fn lcp_insertion_sort_comparisons() {
    let mut rng = StdRng::seed_from_u64(49);
    let mut cases: Vec<Vec<Vec<u8>>> =
        (0..100).map(|r| random_items(rng.gen_range(0..400), 10, b'a', b'c', 4900 + r)).collect();
    cases.push(all_equal(400));
    for items in cases {
        let s = set(&items);
        let (l, _) = naive_l_d(&items);
        let n = items.len();
        let mut order = s.handles().to_vec();
        let mut lcp = vec![0; n];
        let mut stats = SortStats::new();
        lcp_insertion_sort(s.strings(), &mut order, &mut lcp, 0, &mut stats);
        let sorted = naive_sorted(&items);
        assert_eq!(values(&s, &order), sorted);
        if n > 1 {
            assert_eq!(&lcp[1..], &naive_lcps(&sorted)[1..]);
        }
        let bound = (l + n * n.saturating_sub(1) / 2) as u64;
        assert!(stats.char_cmp <= bound, "n={n}: {} > {bound}", stats.char_cmp);
    }
}

#[test]
fn caching_mkqs_string_accesses() {
    let mut cases = instances(100, 50);
    cases.push(all_equal(50_000));
    cases.push(vec![Vec::new(); 1000]);
    cases.push((0..2000).map(|i| vec![b'a'; i]).collect());
    let text = b"abracadabra".repeat(300);
    let suffixes = StringSet::from_suffixes(&text).unwrap();
    let suffix_items: Vec<Vec<u8>> = suffixes.values(suffixes.handles()).map(<[u8]>::to_vec).collect();
    cases.push(suffix_items);
    for items in cases {
        let s = set(&items);
        let (_, d) = naive_l_d(&items);
        let mut order = s.handles().to_vec();
        let mut stats = SortStats::new();
        caching_mkqs(s.strings(), &mut order, 0, &mut stats);
        assert_eq!(values(&s, &order), naive_sorted(&items));
        let n = items.len() as u64;
        let bound = d as u64 / 8 + n;
        assert!(stats.string_access <= bound, "n={n}: {} > {bound}", stats.string_access);
    }
}
