/// Characters that end a sentence.
pub const SENTENCE_DELIMITERS: [char; 5] = ['.', ';', ':', '!', '?'];

/// Lowercases a single token and strips leading and trailing characters that
/// are neither letters nor digits. Returns `None` when nothing survives.
pub fn normalize_token(raw: &str) -> Option<String> {
    let lower = raw.to_lowercase();
    let trimmed = lower.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_string())
    }
}

/// Splits `text` into sentences on `.;:!?` and each sentence into normalized
/// tokens. Empty sentences are dropped.
pub fn normalize_and_tokenize(text: &str) -> Vec<Vec<String>> {
    text.split(|c: char| SENTENCE_DELIMITERS.contains(&c))
        .map(|sentence| {
            sentence
                .split_whitespace()
                .filter_map(normalize_token)
                .collect::<Vec<_>>()
        })
        .filter(|tokens| !tokens.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter()
            .map(|s| s.iter().map(|t| t.to_string()).collect())
            .collect()
    }

    #[test]
    fn splits_and_lowercases() {
        assert_eq!(
            normalize_and_tokenize("Rex Willelmus dedit; terram habet."),
            toks(&[&["rex", "willelmus", "dedit"], &["terram", "habet"]])
        );
    }

    #[test]
    fn empty_text() {
        assert!(normalize_and_tokenize("").is_empty());
        assert!(normalize_and_tokenize(" .;; ! ").is_empty());
    }

    #[test]
    fn delimiter_inside_word_splits_sentences() {
        assert_eq!(normalize_and_tokenize("a.b"), toks(&[&["a"], &["b"]]));
    }

    #[test]
    fn punctuation_handling() {
        assert_eq!(
            normalize_and_tokenize("(Ego) , -- \"Eadward\" rex, anno 1066"),
            toks(&[&["ego", "eadward", "rex", "anno", "1066"]])
        );
        // internal punctuation survives
        assert_eq!(normalize_and_tokenize("sancti-petri"), toks(&[&["sancti-petri"]]));
    }

    proptest! {
        #[test]
        fn retokenizing_is_idempotent(text in "\\PC{0,80}") {
            for sentence in normalize_and_tokenize(&text) {
                let again = normalize_and_tokenize(&sentence.join(" "));
                prop_assert_eq!(again, vec![sentence]);
            }
        }

        #[test]
        fn tokens_are_clean(text in "\\PC{0,80}") {
            for sentence in normalize_and_tokenize(&text) {
                prop_assert!(!sentence.is_empty());
                for tok in sentence {
                    prop_assert!(!tok.is_empty());
                    prop_assert!(!tok.chars().any(char::is_whitespace));
                }
            }
        }
    }
}
