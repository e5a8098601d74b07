//! Instrumentation counters.
//!
//! Sorters are generic over [`Counter`]. [`NoStats`] compiles every hook away
//! for timing runs; [`SortStats`] keeps exact counts for the bound tests and
//! the benchmark's statistics mode.

/// Hooks a sorter calls while it works.
pub trait Counter {
    /// Whether the counter records anything. Lets callers skip bookkeeping
    /// that only feeds the counters.
    const ENABLED: bool;

    /// `n` ternary character comparisons were performed.
    fn char_cmp(&mut self, n: u64);

    /// `n` fetches of characters from string memory were performed.
    fn string_access(&mut self, n: u64);

    /// `bytes` of auxiliary memory were allocated.
    fn aux_alloc(&mut self, bytes: usize);

    /// `bytes` of auxiliary memory were released.
    fn aux_free(&mut self, bytes: usize);
}

/// Counter that records nothing.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct NoStats;

impl Counter for NoStats {
    const ENABLED: bool = false;

    #[inline(always)]
    fn char_cmp(&mut self, _n: u64) {}

    #[inline(always)]
    fn string_access(&mut self, _n: u64) {}

    #[inline(always)]
    fn aux_alloc(&mut self, _bytes: usize) {}

    #[inline(always)]
    fn aux_free(&mut self, _bytes: usize) {}
}

/// Exact operation counts of one sort run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SortStats {
    /// Ternary character comparisons. A comparison loop that stops at the
    /// first mismatch counts one per matching character plus one for the
    /// mismatch (or terminator) test.
    pub char_cmp: u64,
    /// Character fetch events from string memory. Loading a whole machine
    /// word of characters at once counts as one access.
    pub string_access: u64,
    /// Peak auxiliary memory in bytes.
    pub bytes_aux: usize,
    current_aux: usize,
}

impl SortStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Folds in counts from another (e.g. per-worker) counter. Peaks add up,
    /// which over-approximates the true concurrent peak.
    pub fn merge(&mut self, other: &SortStats) {
        self.char_cmp += other.char_cmp;
        self.string_access += other.string_access;
        self.bytes_aux += other.bytes_aux;
    }
}

impl Counter for SortStats {
    const ENABLED: bool = true;

    #[inline]
    fn char_cmp(&mut self, n: u64) {
        self.char_cmp += n;
    }

    #[inline]
    fn string_access(&mut self, n: u64) {
        self.string_access += n;
    }

    #[inline]
    fn aux_alloc(&mut self, bytes: usize) {
        self.current_aux += bytes;
        if self.current_aux > self.bytes_aux {
            self.bytes_aux = self.current_aux;
        }
    }

    #[inline]
    fn aux_free(&mut self, bytes: usize) {
        self.current_aux = self.current_aux.saturating_sub(bytes);
    }
}
