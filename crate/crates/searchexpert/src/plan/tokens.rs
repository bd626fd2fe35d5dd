//! Token accounting for plan-size measurements.

use super::PlanError;
use std::fs;
use std::path::Path;

/// Counting modes.
///
/// `DefaultRule` is the deterministic rule used throughout the crate: split
/// on whitespace, group alphanumeric runs, every other character is its own
/// token, except `->` which counts as one token.
///
/// `ExternalVocab` counts by greedy longest-match against a vocabulary file
/// (one token per line); characters not covered by the vocabulary count as
/// one token each.
#[derive(Debug, Clone)]
pub enum TokenCounter {
    DefaultRule,
    ExternalVocab { vocab: Vec<String> },
}

impl TokenCounter {
    pub fn default_rule() -> Self {
        TokenCounter::DefaultRule
    }

    pub fn external_vocab(path: &Path) -> Result<Self, PlanError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| PlanError::VocabLoad(format!("{}: {e}", path.display())))?;
        let mut vocab: Vec<String> = raw
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        if vocab.is_empty() {
            return Err(PlanError::VocabLoad(format!(
                "{}: vocabulary file has no entries",
                path.display()
            )));
        }
        // Longest-first so greedy matching is well-defined.
        vocab.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        vocab.dedup();
        Ok(TokenCounter::ExternalVocab { vocab })
    }

    pub fn count(&self, text: &str) -> usize {
        match self {
            TokenCounter::DefaultRule => count_default(text),
            TokenCounter::ExternalVocab { vocab } => count_vocab(text, vocab),
        }
    }
}

impl Default for TokenCounter {
    fn default() -> Self {
        TokenCounter::DefaultRule
    }
}

/// Count `text` under `counter`.
pub fn count_tokens(text: &str, counter: &TokenCounter) -> usize {
    counter.count(text)
}

fn count_default(text: &str) -> usize {
    let mut total = 0;
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_alphanumeric() {
                while i < chars.len() && chars[i].is_alphanumeric() {
                    i += 1;
                }
            } else if chars[i] == '-' && chars.get(i + 1) == Some(&'>') {
                i += 2;
            } else {
                i += 1;
            }
            total += 1;
        }
    }
    total
}

fn count_vocab(text: &str, vocab: &[String]) -> usize {
    let mut total = 0;
    for chunk in text.split_whitespace() {
        let mut rest = chunk;
        while !rest.is_empty() {
            match vocab.iter().find(|entry| rest.starts_with(entry.as_str())) {
                Some(entry) => rest = &rest[entry.len()..],
                None => {
                    let ch_len = rest.chars().next().expect("rest is non-empty").len_utf8();
                    rest = &rest[ch_len..];
                }
            }
            total += 1;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn empty_text_is_zero() {
        assert_eq!(count_tokens("", &TokenCounter::DefaultRule), 0);
    }

    #[test]
    fn node_item_counts_by_hand() {
        // A, :, Japan, earthquake, impact, (, news, search, )
        assert_eq!(
            count_tokens("A: Japan earthquake impact (news search)", &TokenCounter::DefaultRule),
            9
        );
    }

    #[test]
    fn arrow_is_one_token() {
        assert_eq!(count_tokens("A -> B", &TokenCounter::DefaultRule), 3);
        assert_eq!(count_tokens("A->B", &TokenCounter::DefaultRule), 3);
    }

    #[test]
    fn punctuation_splits_alphanumeric_runs() {
        // foo, ., bar, ,, (, x1, )
        assert_eq!(count_tokens("foo.bar, (x1)", &TokenCounter::DefaultRule), 7);
    }

    #[test]
    fn additive_over_space_concatenation() {
        let a = "A: foo (news search)";
        let b = "B -> C, ok";
        let rule = TokenCounter::DefaultRule;
        assert_eq!(
            rule.count(&format!("{a} {b}")),
            rule.count(a) + rule.count(b)
        );
    }

    #[test]
    fn external_vocab_greedy_longest_match() {
        let mut file = tempfile::NamedTempFile::new().expect("create temp vocab");
        writeln!(file, "search\nsea\nrch\n->").expect("write vocab");
        let counter = TokenCounter::external_vocab(file.path()).expect("load vocab");
        // "search" matches whole; "seas" = sea + s(unknown char)
        assert_eq!(counter.count("search"), 1);
        assert_eq!(counter.count("seas"), 2);
        assert_eq!(counter.count("a -> b"), 3);
    }

    #[test]
    fn external_vocab_missing_file_errors() {
        let err = TokenCounter::external_vocab(Path::new("/nonexistent/vocab.txt")).unwrap_err();
        assert!(matches!(err, PlanError::VocabLoad(_)));
    }
}
