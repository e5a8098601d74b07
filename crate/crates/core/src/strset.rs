//! String sets and reference oracles.
//!
//! A [`StringSet`] owns a character arena of zero-terminated strings and the
//! list of handles (arena offsets) in input order. Sorters work on a copy of
//! that handle list and read characters through the [`Strings`] view.
//!
//! The oracles here use nothing but naive byte-slice comparison. They are the
//! ground truth the sorters are tested against and must stay independent of
//! every algorithm in this crate.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Deref;

use crate::WORD_CHARS;

/// Zero bytes appended after the last string so that a full machine word can
/// always be loaded at any position up to a terminator.
const ARENA_PADDING: usize = WORD_CHARS;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrSetError {
    #[error("input contains a zero byte at offset {0}")]
    EmbeddedZeroByte(usize),
    #[error("strings at positions {prev} and {0} are in descending order", prev = .0 - 1)]
    NotSorted(usize),
}

/// First violation found by [`verify`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("result has {found} strings, input had {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("result is not a permutation of the input: unexpected handle at position {index}")]
    NotPermutation { index: usize },
    #[error("strings at positions {} and {index} are in descending order", .index - 1)]
    NotSorted { index: usize },
    #[error("LCP array entry {index} is {found}, expected {expected}")]
    LcpMismatch { index: usize, expected: usize, found: usize },
}

/// Read-only view of a character arena.
///
/// A handle is the arena offset of the first character of a zero-terminated
/// string. All accessors assume the handle is valid and the depth does not
/// pass the string's terminator.
#[derive(Clone, Copy)]
pub struct Strings<'a> {
    bytes: &'a [u8],
}

impl<'a> Strings<'a> {
    /// Character `h` of the string at `s`.
    #[inline(always)]
    pub fn at(self, s: usize, h: usize) -> u8 {
        self.bytes[s + h]
    }

    /// String body without its terminator.
    pub fn body(self, s: usize) -> &'a [u8] {
        let tail = &self.bytes[s..];
        let end = tail.iter().position(|&c| c == 0).unwrap_or(tail.len());
        &tail[..end]
    }

    /// Length including the terminator.
    pub fn len_with_terminator(self, s: usize) -> usize {
        self.body(s).len() + 1
    }

    /// Packs the characters `h..h + 8` of `s` into a word, first character
    /// most significant. Bytes after the terminator read as zero, so numeric
    /// order of keys equals lexicographic order of the 8-character windows.
    #[inline(always)]
    pub fn key(self, s: usize, h: usize) -> u64 {
        let at = s + h;
        let word: [u8; WORD_CHARS] = self.bytes[at..at + WORD_CHARS]
            .try_into()
            .expect("arena is padded for word loads");
        mask_after_terminator(u64::from_be_bytes(word))
    }

    /// Length of the longest common prefix of two strings.
    pub fn lcp(self, a: usize, b: usize) -> usize {
        self.lcp_from(a, b, 0)
    }

    /// Longest common prefix of two strings already known to share `h`
    /// characters.
    #[inline]
    pub fn lcp_from(self, a: usize, b: usize, mut h: usize) -> usize {
        loop {
            let ca = self.at(a, h);
            if ca == 0 || ca != self.at(b, h) {
                return h;
            }
            h += 1;
        }
    }

    /// Lexicographic comparison of two strings.
    pub fn cmp(self, a: usize, b: usize) -> Ordering {
        let h = self.lcp(a, b);
        self.at(a, h).cmp(&self.at(b, h))
    }
}

/// Zeroes every byte after the first zero byte of a big-endian packed word.
#[inline(always)]
fn mask_after_terminator(v: u64) -> u64 {
    const LOW7: u64 = 0x7f7f_7f7f_7f7f_7f7f;
    // Exact zero-byte detector: high bit of each byte is set iff that byte is 0.
    let zero_bytes = !(((v & LOW7).wrapping_add(LOW7)) | v | LOW7);
    if zero_bytes == 0 {
        return v;
    }
    let keep = zero_bytes.leading_zeros();
    if keep == 0 {
        0
    } else {
        v & !(u64::MAX >> keep)
    }
}

/// An arena of zero-terminated strings plus their handles in input order.
#[derive(Debug, Clone, Default)]
pub struct StringSet {
    arena: Vec<u8>,
    handles: Vec<usize>,
    total_chars: usize,
}

impl StringSet {
    /// One string per LF-delimited record; a trailing CR is stripped, and a
    /// final record without newline is accepted.
    pub fn from_lines(bytes: &[u8]) -> Result<Self, StrSetError> {
        if let Some(pos) = bytes.iter().position(|&c| c == 0) {
            return Err(StrSetError::EmbeddedZeroByte(pos));
        }
        let mut arena = Vec::with_capacity(bytes.len() + ARENA_PADDING + 1);
        let mut handles = Vec::new();
        let mut rest = bytes;
        while !rest.is_empty() {
            let (line, next) = match rest.iter().position(|&c| c == b'\n') {
                Some(nl) => (&rest[..nl], &rest[nl + 1..]),
                None => (rest, &rest[rest.len()..]),
            };
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            handles.push(arena.len());
            arena.extend_from_slice(line);
            arena.push(0);
            rest = next;
        }
        let total_chars = arena.len();
        arena.resize(arena.len() + ARENA_PADDING, 0);
        Ok(Self {
            arena,
            handles,
            total_chars,
        })
    }

    /// All suffixes of `text` as overlapping strings sharing one arena.
    pub fn from_suffixes(text: &[u8]) -> Result<Self, StrSetError> {
        if let Some(pos) = text.iter().position(|&c| c == 0) {
            return Err(StrSetError::EmbeddedZeroByte(pos));
        }
        let n = text.len();
        let mut arena = Vec::with_capacity(n + 1 + ARENA_PADDING);
        arena.extend_from_slice(text);
        arena.resize(n + 1 + ARENA_PADDING, 0);
        Ok(Self {
            arena,
            handles: (0..n).collect(),
            total_chars: n * (n + 3) / 2,
        })
    }

    /// Builds a set from individual strings, which must not contain zero bytes.
    pub fn from_strings<I, S>(strings: I) -> Result<Self, StrSetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut arena = Vec::new();
        let mut handles = Vec::new();
        for s in strings {
            let s = s.as_ref();
            if let Some(pos) = s.iter().position(|&c| c == 0) {
                return Err(StrSetError::EmbeddedZeroByte(arena.len() - handles.len() + pos));
            }
            handles.push(arena.len());
            arena.extend_from_slice(s);
            arena.push(0);
        }
        let total_chars = arena.len();
        arena.resize(arena.len() + ARENA_PADDING, 0);
        Ok(Self {
            arena,
            handles,
            total_chars,
        })
    }

    pub fn len(&self) -> usize {
        self.handles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.handles.is_empty()
    }

    /// Total characters N, terminators included.
    pub fn total_chars(&self) -> usize {
        self.total_chars
    }

    /// Handles in input order.
    pub fn handles(&self) -> &[usize] {
        &self.handles
    }

    pub fn strings(&self) -> Strings<'_> {
        Strings { bytes: &self.arena }
    }

    /// Body of the string at `handle`.
    pub fn get(&self, handle: usize) -> &[u8] {
        self.strings().body(handle)
    }

    /// Bodies in the given order, for value-sequence comparisons.
    pub fn values<'s: 'o, 'o>(&'s self, order: &'o [usize]) -> impl Iterator<Item = &'s [u8]> + 'o {
        order.iter().map(move |&h| self.get(h))
    }
}

/// LCP array of a sorted sequence: entry `i` is the LCP of strings `i - 1`
/// and `i`. Entry 0 is undefined and stored as 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LcpArray(Vec<usize>);

impl LcpArray {
    pub fn new(values: Vec<usize>) -> Self {
        Self(values)
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Sum L of all defined entries.
    pub fn sum(&self) -> usize {
        self.0.iter().skip(1).sum()
    }

    pub fn max(&self) -> usize {
        self.0.iter().skip(1).copied().max().unwrap_or(0)
    }
}

impl Deref for LcpArray {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for LcpArray {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Size measures of a sorted string set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub n: usize,
    /// Total characters N including terminators.
    pub total_chars: usize,
    /// Distinguishing prefix size D.
    pub distinguishing: usize,
    /// LCP sum L.
    pub lcp_sum: usize,
    pub max_lcp: usize,
    /// Average string length including the terminator.
    pub avg_len: f64,
}

/// Longest common prefix of two strings in the same arena.
pub fn lcp(strings: Strings<'_>, a: usize, b: usize) -> usize {
    strings.lcp(a, b)
}

/// LCP array of a sorted order, computed pairwise.
pub fn lcp_array_oracle(strings: Strings<'_>, order: &[usize]) -> Result<LcpArray, StrSetError> {
    let mut h = vec![0; order.len()];
    for i in 1..order.len() {
        let (a, b) = (order[i - 1], order[i]);
        let common = strings.lcp(a, b);
        if strings.at(a, common) > strings.at(b, common) {
            return Err(StrSetError::NotSorted(i));
        }
        h[i] = common;
    }
    Ok(LcpArray(h))
}

/// Distinguishing prefix size and LCP sum of `set` sorted as `order` with
/// LCP array `lcp`.
pub fn metrics(set: &StringSet, order: &[usize], lcp: &[usize]) -> MetricsReport {
    let n = order.len();
    assert_eq!(n, set.len(), "order must hold every string of the set");
    let at = |i: usize| if i == 0 || i >= n { 0 } else { lcp[i] };
    let distinguishing = (0..n).map(|i| at(i).max(at(i + 1)) + 1).sum();
    let total_chars = set.total_chars();
    MetricsReport {
        n,
        total_chars,
        distinguishing,
        lcp_sum: (1..n).map(at).sum(),
        max_lcp: (1..n).map(at).max().unwrap_or(0),
        avg_len: if n == 0 { 0.0 } else { total_chars as f64 / n as f64 },
    }
}

/// Ground-truth sort with naive lexicographic comparison of string bodies.
pub fn oracle_sort(strings: Strings<'_>, handles: &[usize]) -> Vec<usize> {
    let mut out = handles.to_vec();
    out.sort_by(|&a, &b| strings.cmp(a, b));
    out
}

/// Checks that `result` is a permutation of `original`, is sorted, and, when
/// given, that `lcp` is its exact LCP array (entry 0 is not checked).
pub fn verify(
    strings: Strings<'_>,
    result: &[usize],
    original: &[usize],
    lcp: Option<&[usize]>,
) -> Result<(), VerifyError> {
    let mut pool = original.to_vec();
    pool.sort_unstable();
    let mut taken = vec![false; pool.len()];
    for (index, h) in result.iter().enumerate() {
        // first untaken copy of h in the sorted pool
        let start = pool.partition_point(|x| x < h);
        let slot = (start..pool.len())
            .take_while(|&i| pool[i] == *h)
            .find(|&i| !taken[i]);
        match slot {
            Some(i) => taken[i] = true,
            None => return Err(VerifyError::NotPermutation { index }),
        }
    }
    if result.len() != original.len() {
        return Err(VerifyError::LengthMismatch {
            expected: original.len(),
            found: result.len(),
        });
    }
    for index in 1..result.len() {
        if strings.cmp(result[index - 1], result[index]) == Ordering::Greater {
            return Err(VerifyError::NotSorted { index });
        }
    }
    if let Some(lcp) = lcp {
        if lcp.len() != result.len() {
            return Err(VerifyError::LengthMismatch {
                expected: result.len(),
                found: lcp.len(),
            });
        }
        for index in 1..result.len() {
            let expected = strings.lcp(result[index - 1], result[index]);
            if lcp[index] != expected {
                return Err(VerifyError::LcpMismatch {
                    index,
                    expected,
                    found: lcp[index],
                });
            }
        }
    }
    Ok(())
}
