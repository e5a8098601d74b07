use crate::{Counter, Strings};

/// Stable string insertion sort. Comparisons start at character `depth`.
pub fn insertion_sort<C: Counter>(st: Strings<'_>, order: &mut [usize], depth: usize, stats: &mut C) {
    for j in 1..order.len() {
        let x = order[j];
        let mut i = j;
        while i > 0 {
            let y = order[i - 1];
            let mut h = depth;
            let (cy, cx) = loop {
                let (cy, cx) = (st.at(y, h), st.at(x, h));
                if cy != cx || cy == 0 {
                    break (cy, cx);
                }
                h += 1;
            };
            stats.char_cmp((h - depth + 1) as u64);
            stats.string_access(2);
            if cy <= cx {
                break;
            }
            order[i] = y;
            i -= 1;
        }
        order[i] = x;
    }
}
