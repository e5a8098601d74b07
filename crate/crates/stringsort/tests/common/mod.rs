#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringsort::bench::{gen_random, gen_random2, gen_url_like, GenLimit};
use stringsort_core::StringSet;

/// A named test input.
pub struct Input {
    pub name: String,
    pub set: StringSet,
}

impl Input {
    pub fn new(name: impl Into<String>, set: StringSet) -> Self {
        Self { name: name.into(), set }
    }
}

/// Text over `a..=d` whose suffixes share moderately long prefixes.
pub fn suffix_text(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = Vec::with_capacity(len);
    while text.len() < len {
        if text.len() > 64 && rng.gen_bool(0.3) {
            // copy an earlier stretch to create repeats
            let start = rng.gen_range(0..text.len() - 32);
            let piece: Vec<u8> = text[start..start + 32].to_vec();
            text.extend(piece);
        } else {
            text.push(rng.gen_range(b'a'..=b'd'));
        }
    }
    text.truncate(len);
    text
}

pub fn random(n: usize, seed: u64) -> Input {
    Input::new(format!("random n={n}"), gen_random(GenLimit::strings(n), seed))
}

pub fn random2(n: usize, seed: u64) -> Input {
    Input::new(format!("random2 n={n}"), gen_random2(GenLimit::strings(n), seed))
}

pub fn suffixes(n: usize, seed: u64) -> Input {
    Input::new(format!("suffixes n={n}"), StringSet::from_suffixes(&suffix_text(n, seed)).unwrap())
}

pub fn urls(n: usize, seed: u64) -> Input {
    Input::new(format!("urls n={n}"), gen_url_like(n, seed))
}

/// All-equal, all-prefixes, empty and single-string fixtures.
pub fn adversarial(n: usize) -> Vec<Input> {
    let prefixes: Vec<Vec<u8>> = (0..n.min(3000)).map(|i| vec![b'p'; n.min(3000) - i]).collect();
    vec![
        Input::new(format!("all-equal n={n}"), StringSet::from_strings(vec!["same-string"; n]).unwrap()),
        Input::new(format!("all-empty n={n}"), StringSet::from_strings(vec![""; n]).unwrap()),
        Input::new("all-prefixes", StringSet::from_strings(&prefixes).unwrap()),
        Input::new("empty", StringSet::from_strings(Vec::<&str>::new()).unwrap()),
        Input::new("n=1", StringSet::from_strings(["lonely"]).unwrap()),
    ]
}

/// Random strings without duplicates.
pub fn distinct(n: usize, seed: u64) -> Input {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut items = Vec::with_capacity(n);
    while items.len() < n {
        let len = rng.gen_range(1..16);
        let s: Vec<u8> = (0..len).map(|_| rng.gen_range(b'a'..=b'f')).collect();
        if seen.insert(s.clone()) {
            items.push(s);
        }
    }
    Input::new(format!("distinct n={n}"), StringSet::from_strings(&items).unwrap())
}

/// Naive sort of the string values; an oracle independent of the library.
pub fn naive_values(set: &StringSet) -> Vec<&[u8]> {
    let mut v: Vec<&[u8]> = set.values(set.handles()).collect();
    v.sort_unstable();
    v
}

pub fn naive_lcps(sorted: &[&[u8]]) -> Vec<usize> {
    let mut h = vec![0; sorted.len()];
    for i in 1..sorted.len() {
        h[i] = sorted[i - 1].iter().zip(sorted[i]).take_while(|(a, b)| a == b).count();
    }
    h
}

/// String values in `order`, borrowed from the arena.
pub fn values_of<'a>(set: &'a StringSet, order: &[usize]) -> Vec<&'a [u8]> {
    set.values(order).collect()
}

/// Whether two orders list the same string values; equal handles are not
/// compared character by character.
pub fn same_values(set: &StringSet, a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| x == y || set.get(x) == set.get(y))
}
