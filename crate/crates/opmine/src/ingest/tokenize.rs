//! Rule-based tokenizer: whitespace split, then leading/trailing punctuation
//! detached one character at a time. Interior punctuation ("it's", "e.g.")
//! stays attached. Deterministic and idempotent on its own space-joined
//! output.

use super::Token;

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c, '…' | '“' | '”' | '‘' | '’' | '«' | '»' | '—' | '–' | '¡' | '¿' | '·')
}

/// Splits text into tokens with character offsets into the original string
/// (offsets count chars, not bytes). Empty text yields an empty list.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens: Vec<(String, usize, usize)> = Vec::new();

    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_piece(&chars, start, i, &mut tokens);
    }

    tokens
        .into_iter()
        .enumerate()
        .map(|(index, (surface, start_char, end_char))| Token {
            surface,
            index,
            start_char,
            end_char,
        })
        .collect()
}

/// Emits one whitespace-delimited piece `chars[lo..hi]` as tokens: leading
/// punctuation chars, the core, then trailing punctuation chars. A piece of
/// length 1 is always a single token.
fn split_piece(chars: &[char], lo: usize, hi: usize, out: &mut Vec<(String, usize, usize)>) {
    let mut left = lo;
    let mut right = hi;
    let mut leading: Vec<(String, usize, usize)> = Vec::new();
    let mut trailing: Vec<(String, usize, usize)> = Vec::new();
    while right - left > 1 && is_punct(chars[left]) {
        leading.push((chars[left].to_string(), left, left + 1));
        left += 1;
    }
    while right - left > 1 && is_punct(chars[right - 1]) {
        trailing.push((chars[right - 1].to_string(), right - 1, right));
        right -= 1;
    }
    out.extend(leading);
    out.push((chars[left..right].iter().collect(), left, right));
    out.extend(trailing.into_iter().rev());
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn detaches_sentence_final_punctuation() {
        assert_eq!(
            surfaces("I love the saturated colors!"),
            vec!["I", "love", "the", "saturated", "colors", "!"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \t\n").is_empty());
    }

    #[test]
    fn keeps_interior_apostrophe() {
        assert_eq!(surfaces("it's great."), vec!["it's", "great", "."]);
    }

    #[test]
    fn detaches_leading_and_multiple_trailing() {
        assert_eq!(surfaces("(hello)..."), vec!["(", "hello", ")", ".", ".", "."]);
        assert_eq!(surfaces("wow!?"), vec!["wow", "!", "?"]);
    }

    #[test]
    fn lone_punctuation_is_one_token() {
        assert_eq!(surfaces("!"), vec!["!"]);
        assert_eq!(surfaces("! !"), vec!["!", "!"]);
    }

    #[test]
    fn all_punctuation_piece_splits_to_chars() {
        assert_eq!(surfaces("!!!"), vec!["!", "!", "!"]);
    }

    #[test]
    fn offsets_point_into_original_text() {
        let text = "ok, fine";
        for t in tokenize(text) {
            let chars: Vec<char> = text.chars().collect();
            let got: String = chars[t.start_char..t.end_char].iter().collect();
            assert_eq!(got, t.surface);
        }
    }

    #[test]
    fn offsets_count_chars_not_bytes() {
        let toks = tokenize("é b");
        assert_eq!(toks[0].start_char, 0);
        assert_eq!(toks[0].end_char, 1);
        assert_eq!(toks[1].start_char, 2);
    }

    #[test]
    fn idempotent_on_space_joined_output() {
        for text in ["(hello)... it's great!", "a!b c?", "¡hola! “quoted”", "x"] {
            let once = surfaces(text);
            let twice = surfaces(&once.join(" "));
            assert_eq!(once, twice, "not idempotent on {text:?}");
        }
    }

    #[test]
    fn indices_are_sequential() {
        let toks = tokenize("a b c");
        let idx: Vec<usize> = toks.iter().map(|t| t.index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
    }
}
