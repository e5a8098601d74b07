//! Synthetic inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stringsort_core::StringSet;

/// Stops generating when either the string count or the character total
/// (terminators included) would be exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenLimit {
    pub strings: usize,
    pub chars: usize,
}

impl GenLimit {
    pub fn strings(n: usize) -> Self {
        Self { strings: n, chars: usize::MAX }
    }

    pub fn chars(bytes: usize) -> Self {
        Self { strings: usize::MAX, chars: bytes }
    }
}

/// Builds strings of length `[0, 20)` with characters drawn by `pick`. The
/// text is assembled as newline-separated records, which never contain a
/// newline themselves.
fn generate(limit: GenLimit, seed: u64, mut pick: impl FnMut(&mut ChaCha8Rng) -> u8) -> StringSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = Vec::new();
    let (mut n, mut chars) = (0usize, 0usize);
    while n < limit.strings {
        let len = rng.gen_range(0..20);
        if chars + len + 1 > limit.chars {
            break;
        }
        text.extend((0..len).map(|_| pick(&mut rng)));
        text.push(b'\n');
        n += 1;
        chars += len + 1;
    }
    StringSet::from_lines(&text).expect("generated text has no zero bytes")
}

/// Random strings: length uniform in `[0, 20)`, characters uniform in
/// ASCII `[33, 127)`.
pub fn gen_random(limit: GenLimit, seed: u64) -> StringSet {
    generate(limit, seed, |rng| rng.gen_range(33..127))
}

/// Like [`gen_random`] over the alphabet `{'0', '1'}`.
pub fn gen_random2(limit: GenLimit, seed: u64) -> StringSet {
    generate(limit, seed, |rng| if rng.gen() { b'1' } else { b'0' })
}

/// URL-like lines with long shared prefixes. Not a real corpus; a fixture
/// for inputs with large LCPs.
pub fn gen_url_like(n: usize, seed: u64) -> StringSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hosts = ["www.example.org", "docs.example.org", "www.example.com", "static.example.net"];
    let sections = ["wiki", "articles", "archive/2012", "archive/2013", "people"];
    let mut text = Vec::new();
    for _ in 0..n {
        let host = hosts[rng.gen_range(0..hosts.len())];
        let section = sections[rng.gen_range(0..sections.len())];
        let id: u32 = rng.gen_range(0..50_000);
        let line = format!("http://{host}/{section}/item_{id:05}/index.html");
        text.extend_from_slice(line.as_bytes());
        text.push(b'\n');
    }
    StringSet::from_lines(&text).expect("generated text has no zero bytes")
}
