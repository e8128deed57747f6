//! Longest repeated substring via a suffix array.

/// Suffix array by prefix doubling.
pub(crate) fn suffix_array(s: &[u16]) -> Vec<usize> {
    let n = s.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<usize> = s.iter().map(|&v| v as usize).collect();
    let mut tmp = vec![0usize; n];
    let mut k = 1;
    while n > 1 {
        let key = |i: usize, rank: &[usize]| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i, &rank));
        tmp[sa[0]] = 0;
        for w in 1..n {
            tmp[sa[w]] = tmp[sa[w - 1]] + usize::from(key(sa[w - 1], &rank) != key(sa[w], &rank));
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] == n - 1 || k >= n {
            break;
        }
        k *= 2;
    }
    sa
}

/// Kasai's longest-common-prefix array: `lcp[i]` is shared by `sa[i-1]` and `sa[i]`.
pub(crate) fn lcp_array(s: &[u16], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut rank = vec![0usize; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p] = i;
    }
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// Length of the longest substring occurring at least twice (overlaps allowed).
pub(crate) fn longest_repeat_length(s: &[u16]) -> usize {
    if s.len() < 2 {
        return 0;
    }
    let sa = suffix_array(s);
    lcp_array(s, &sa).into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(s: &[u16]) -> usize {
        let mut best = 0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let mut h = 0;
                while j + h < s.len() && s[i + h] == s[j + h] {
                    h += 1;
                }
                best = best.max(h);
            }
        }
        best
    }

    #[test]
    fn known_strings() {
        // "banana": "ana" repeats with overlap
        assert_eq!(longest_repeat_length(&[1, 0, 2, 0, 2, 0]), 3);
        assert_eq!(longest_repeat_length(&[1, 2, 3, 4]), 0);
        assert_eq!(longest_repeat_length(&[5; 10]), 9);
        assert_eq!(longest_repeat_length(&[0, 1].repeat(50)), 98);
    }

    proptest! {
        #[test]
        fn matches_naive(s in proptest::collection::vec(0u16..4, 0..120)) {
            prop_assert_eq!(longest_repeat_length(&s), naive(&s));
        }

        #[test]
        fn suffix_array_is_sorted(s in proptest::collection::vec(0u16..3, 1..80)) {
            let sa = suffix_array(&s);
            for w in sa.windows(2) {
                prop_assert!(s[w[0]..] < s[w[1]..]);
            }
        }
    }
}
