//! Normalized Levenshtein similarity over cleaned-up text.

/// Lowercases, strips punctuation, and collapses whitespace runs to single
/// spaces (also trimming the ends).
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else if c.is_alphanumeric() {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.extend(c.to_lowercase());
        }
        // punctuation and symbols are dropped entirely
    }
    out
}

/// Classic edit distance (insert/delete/substitute, unit costs) on chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            curr[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Similarity in [0,1]: `1 - lev(a', b') / max(|a'|, |b'|)` on normalized
/// forms; two empty strings score 1.0.
pub fn similarity(a: &str, b: &str) -> f64 {
    similarity_normalized(&normalize(a), &normalize(b))
}

/// Same metric for inputs already passed through [`normalize`].
pub(crate) fn similarity_normalized(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_strings_score_one() {
        assert_eq!(similarity("abc", "abc"), 1.0);
    }

    #[test]
    fn kitten_sitting() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        let s = similarity("kitten", "sitting");
        assert!((s - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn normalization_makes_case_space_punct_irrelevant() {
        assert_eq!(similarity("ABC ", "abc"), 1.0);
        assert_eq!(similarity("- How did he do that?", "how   did he do that"), 1.0);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("", "abc"), 0.0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("ab", ""), 2);
    }

    #[test]
    fn symmetric() {
        for (a, b) in [("kitten", "sitting"), ("a", "xyz"), ("hello world", "helo wrld")] {
            assert_eq!(similarity(a, b), similarity(b, a));
            assert_eq!(levenshtein(a, b), levenshtein(b, a));
        }
    }

    #[test]
    fn distance_properties() {
        // d(a,a)=0 and d obeys the triangle inequality on a few triples
        let words = ["flaw", "lawn", "fawn", ""];
        for a in words {
            assert_eq!(levenshtein(a, a), 0);
            for b in words {
                for c in words {
                    assert!(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
                }
            }
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("  Hello,   WORLD!  "), "hello world");
        assert_eq!(normalize("don't"), "dont");
        assert_eq!(normalize("..."), "");
    }

    #[test]
    fn unicode_lowercase() {
        assert_eq!(normalize("ÉCRAN"), "écran");
    }
}
