use crate::{Counter, Strings};

/// Insertion sort that maintains and exploits the LCP array.
///
/// All strings share `depth` characters. On return `lcp[1..]` holds the
/// absolute LCPs of adjacent output strings; `lcp[0]` is not written.
pub fn lcp_insertion_sort<C: Counter>(
    st: Strings<'_>,
    order: &mut [usize],
    lcp: &mut [usize],
    depth: usize,
    stats: &mut C,
) {
    assert_eq!(order.len(), lcp.len());
    for j in 1..order.len() {
        let x = order[j];
        let mut i = j;
        // LCP of x with the string right of the hole at i
        let mut hx = depth;
        while i > 0 {
            let hi = if i == j { hx } else { lcp[i] };
            if hi < hx {
                break;
            }
            if hi == hx {
                let y = order[i - 1];
                let mut h = hx;
                let (cx, cy) = loop {
                    let (cx, cy) = (st.at(x, h), st.at(y, h));
                    if cx == 0 || cx != cy {
                        break (cx, cy);
                    }
                    h += 1;
                };
                stats.char_cmp((h - hx + 1) as u64);
                stats.string_access(2);
                if cx >= cy {
                    lcp[i] = h;
                    break;
                }
                hx = h;
            }
            order[i] = order[i - 1];
            if i < j {
                lcp[i + 1] = lcp[i];
            }
            i -= 1;
        }
        // hx is still the LCP with the right neighbor when the loop broke in
        // case 2, since it only grows on a shift
        order[i] = x;
        if i < j {
            lcp[i + 1] = hx;
        }
    }
}
