//! Exact-match unigram METEOR (no stemming or synonym stages).

/// Matched `(candidate, reference)` positions, sorted by candidate index.
///
/// Greedy tiling: repeatedly take the longest run of identical tokens that is contiguous and
/// unaligned in both sequences (earliest candidate, then reference position on ties). Every
/// matchable token ends up aligned, and long shared runs stay in one chunk.
pub fn align<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Vec<(usize, usize)> {
    let mut used_c = vec![false; candidate.len()];
    let mut used_r = vec![false; reference.len()];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..candidate.len() {
            for j in 0..reference.len() {
                let mut len = 0;
                while i + len < candidate.len()
                    && j + len < reference.len()
                    && !used_c[i + len]
                    && !used_r[j + len]
                    && candidate[i + len].as_ref() == reference[j + len].as_ref()
                {
                    len += 1;
                }
                if len > best.map_or(0, |b| b.2) {
                    best = Some((i, j, len));
                }
            }
        }
        let Some((i, j, len)) = best else { break };
        for k in 0..len {
            used_c[i + k] = true;
            used_r[j + k] = true;
            out.push((i + k, j + k));
        }
    }
    out.sort_unstable();
    out
}

/// Number of maximal runs of alignments adjacent in both sequences.
pub fn chunks(alignment: &[(usize, usize)]) -> usize {
    if alignment.is_empty() {
        return 0;
    }
    1 + alignment
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count()
}

/// METEOR in [0, 1]: `Fmean·(1 − 0.5·(chunks/matches)³)` with `Fmean = 10PR/(R + 9P)`.
pub fn meteor<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let alignment = align(candidate, reference);
    let matches = alignment.len();
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let p = m / candidate.len() as f64;
    let r = m / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (chunks(&alignment) as f64 / m).powi(3);
    fmean * (1.0 - penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn no_overlap_is_zero() {
        assert_eq!(meteor(&toks("a b c"), &toks("d e f")), 0.0);
        assert_eq!(meteor(&toks(""), &toks("d e f")), 0.0);
        assert_eq!(meteor(&toks("a"), &toks("")), 0.0);
    }

    #[test]
    fn identical_closed_form() {
        for m in 1..8 {
            let s: Vec<String> = (0..m).map(|i| format!("w{i}")).collect();
            let expect = 1.0 - 0.5 / (m as f64).powi(3);
            assert!((meteor(&s, &s) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn three_matches_two_chunks() {
        // P = R = 3/5, Fmean = 0.6, penalty = 0.5·(2/3)³ ⇒ 23/45 (exact rational)
        let c = toks("a b c d e");
        let r = toks("a b x d y");
        assert_eq!(chunks(&align(&c, &r)), 2);
        assert!((meteor(&c, &r) - 23.0 / 45.0).abs() < 1e-15);
    }

    #[test]
    fn repeated_words_align_contiguously() {
        let c = toks("the cat the dog");
        let r = toks("the dog the cat");
        let a = align(&c, &r);
        assert_eq!(a.len(), 4);
        assert_eq!(a, vec![(0, 2), (1, 3), (2, 0), (3, 1)]);
        assert_eq!(chunks(&a), 2);
    }

    proptest! {
        #[test]
        fn bounded_and_zero_iff_no_match(c in prop::collection::vec("[a-f]", 0..10), r in prop::collection::vec("[a-f]", 0..10)) {
            let s = meteor(&c, &r);
            prop_assert!((0.0..=1.0).contains(&s));
            let overlap = c.iter().any(|w| r.contains(w));
            prop_assert_eq!(s == 0.0, !overlap);
        }
    }
}
