use alloc::vec;
use alloc::vec::Vec;
use core::mem::size_of;

use super::insertion_sort;
use crate::{Counter, Strings, INSERTION_THRESHOLD};

/// Counting MSD radix sort flavors.
///
/// `CE*` distribute out of place into a shadow array and are stable; `CI*`
/// permute in place by walking cycles and are not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadixVariant {
    /// Reads each character twice, once for counting and once for distributing.
    CE0,
    /// Caches each character in an oracle array while counting.
    CE1,
    /// Like CE1 with caching and counting split into two loops.
    CE2,
    /// In-place permutation with a character cache.
    CI2,
    /// CI2 on two characters at a time for regions of at least 2^16 strings.
    CI3,
}

/// Regions at least this large use 16-bit buckets under [`RadixVariant::CI3`].
pub const CI3_THRESHOLD: usize = 1 << 16;

const SIGMA: usize = 256;

struct Buffers {
    shadow: Vec<usize>,
    cache8: Vec<u8>,
    cache16: Vec<u16>,
    count8: [usize; SIGMA],
    count16: Vec<usize>,
}

/// Sorts `order` with counting radix sort, recursing on an explicit stack.
pub fn radix_sort<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    depth: usize,
    variant: RadixVariant,
    stats: &mut C,
) {
    let n = order.len();
    if n < 2 {
        return;
    }
    let wide = variant == RadixVariant::CI3 && n >= CI3_THRESHOLD;
    let mut buf = Buffers {
        shadow: if matches!(variant, RadixVariant::CE0 | RadixVariant::CE1 | RadixVariant::CE2) {
            vec![0; n]
        } else {
            Vec::new()
        },
        cache8: if variant == RadixVariant::CE0 { Vec::new() } else { vec![0; n] },
        cache16: if wide { vec![0; n] } else { Vec::new() },
        count8: [0; SIGMA],
        count16: if wide { vec![0; SIGMA * SIGMA] } else { Vec::new() },
    };
    let aux = buf.shadow.len() * size_of::<usize>()
        + buf.cache8.len()
        + buf.cache16.len() * size_of::<u16>()
        + (SIGMA + buf.count16.len()) * size_of::<usize>();
    stats.aux_alloc(aux);

    let mut stack: Vec<(usize, usize, usize)> = vec![(0, n, depth)];
    let mut peak = 0;
    while let Some((b, e, h)) = stack.pop() {
        let region = &mut order[b..e];
        if region.len() < INSERTION_THRESHOLD {
            insertion_sort(st, region, h, stats);
            continue;
        }
        let before = stack.len();
        match variant {
            RadixVariant::CE0 => step_ce0(st, region, b, h, &mut buf, stats),
            RadixVariant::CE1 | RadixVariant::CE2 => {
                step_ce12(st, region, b, h, variant == RadixVariant::CE2, &mut buf, stats)
            }
            RadixVariant::CI2 => step_ci2(st, region, b, h, &mut buf, stats),
            RadixVariant::CI3 if region.len() >= CI3_THRESHOLD => {
                step_ci3(st, region, b, h, &mut buf, stats, &mut stack);
            }
            RadixVariant::CI3 => step_ci2(st, region, b, h, &mut buf, stats),
        }
        if stack.len() == before {
            // 8-bit step: buckets 1..256 recurse one character deeper
            let mut start = b + buf.count8[0];
            for c in 1..SIGMA {
                let len = buf.count8[c];
                if len > 1 {
                    stack.push((start, start + len, h + 1));
                }
                start += len;
            }
        }
        if C::ENABLED && stack.len() > peak {
            stats.aux_alloc((stack.len() - peak) * size_of::<(usize, usize, usize)>());
            peak = stack.len();
        }
    }
    stats.aux_free(aux + peak * size_of::<(usize, usize, usize)>());
}

fn step_ce0<C: Counter>(
    st: Strings<'_>,
    region: &mut [usize],
    b: usize,
    h: usize,
    buf: &mut Buffers,
    stats: &mut C,
) {
    let count = &mut buf.count8;
    count.fill(0);
    for &s in region.iter() {
        count[st.at(s, h) as usize] += 1;
    }
    let mut pos = exclusive_sums(count);
    let shadow = &mut buf.shadow[b..b + region.len()];
    for &s in region.iter() {
        let c = st.at(s, h) as usize;
        shadow[pos[c]] = s;
        pos[c] += 1;
    }
    stats.string_access(2 * region.len() as u64);
    region.copy_from_slice(shadow);
}

fn step_ce12<C: Counter>(
    st: Strings<'_>,
    region: &mut [usize],
    b: usize,
    h: usize,
    fission: bool,
    buf: &mut Buffers,
    stats: &mut C,
) {
    let m = region.len();
    let count = &mut buf.count8;
    count.fill(0);
    let cache = &mut buf.cache8[b..b + m];
    if fission {
        for (o, &s) in cache.iter_mut().zip(region.iter()) {
            *o = st.at(s, h);
        }
        for &c in cache.iter() {
            count[c as usize] += 1;
        }
    } else {
        for (o, &s) in cache.iter_mut().zip(region.iter()) {
            let c = st.at(s, h);
            *o = c;
            count[c as usize] += 1;
        }
    }
    stats.string_access(m as u64);
    let mut pos = exclusive_sums(count);
    let shadow = &mut buf.shadow[b..b + m];
    for (&c, &s) in cache.iter().zip(region.iter()) {
        shadow[pos[c as usize]] = s;
        pos[c as usize] += 1;
    }
    region.copy_from_slice(shadow);
}

fn step_ci2<C: Counter>(
    st: Strings<'_>,
    region: &mut [usize],
    b: usize,
    h: usize,
    buf: &mut Buffers,
    stats: &mut C,
) {
    let m = region.len();
    let cache = &mut buf.cache8[b..b + m];
    for (o, &s) in cache.iter_mut().zip(region.iter()) {
        *o = st.at(s, h);
    }
    stats.string_access(m as u64);
    let count = &mut buf.count8;
    count.fill(0);
    for &c in cache.iter() {
        count[c as usize] += 1;
    }
    permute_in_place(region, cache, count);
}

fn step_ci3<C: Counter>(
    st: Strings<'_>,
    region: &mut [usize],
    b: usize,
    h: usize,
    buf: &mut Buffers,
    stats: &mut C,
    stack: &mut Vec<(usize, usize, usize)>,
) {
    let m = region.len();
    let cache = &mut buf.cache16[b..b + m];
    for (o, &s) in cache.iter_mut().zip(region.iter()) {
        let hi = st.at(s, h);
        // never read past a terminator
        *o = if hi == 0 { 0 } else { (u16::from(hi) << 8) | u16::from(st.at(s, h + 1)) };
    }
    stats.string_access(m as u64);
    let count = &mut buf.count16;
    count.fill(0);
    for &c in cache.iter() {
        count[c as usize] += 1;
    }
    permute_in_place(region, cache, count);
    let mut start = b;
    for (c, &len) in count.iter().enumerate() {
        if len > 1 && c >> 8 != 0 && c & 0xff != 0 {
            stack.push((start, start + len, h + 2));
        }
        start += len;
    }
}

fn exclusive_sums(count: &[usize; SIGMA]) -> [usize; SIGMA] {
    let mut pos = [0; SIGMA];
    let mut sum = 0;
    for (p, &c) in pos.iter_mut().zip(count.iter()) {
        *p = sum;
        sum += c;
    }
    pos
}

/// Cycle-walking in-place distribution. `count` is left untouched.
fn permute_in_place<T: Copy + Into<usize>>(region: &mut [usize], cache: &mut [T], count: &[usize]) {
    let m = region.len();
    // inclusive prefix sums: bkt[c] is one past the end of bucket c
    let mut bkt: Vec<usize> = Vec::with_capacity(count.len());
    let mut sum = 0;
    let mut last = 0;
    for &c in count {
        sum += c;
        bkt.push(sum);
        if c > 0 {
            last = c;
        }
    }
    // the last non-empty bucket falls into place once all others are done
    let mut i = 0;
    while i < m - last {
        let mut perm = region[i];
        let mut oracle = cache[i];
        loop {
            let slot = &mut bkt[oracle.into()];
            *slot -= 1;
            let j = *slot;
            if j <= i {
                break;
            }
            core::mem::swap(&mut perm, &mut region[j]);
            core::mem::swap(&mut oracle, &mut cache[j]);
        }
        region[i] = perm;
        i += count[oracle.into()];
    }
}
