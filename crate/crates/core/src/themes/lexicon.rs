use std::collections::BTreeSet;

use crate::error::MinerError;

/// Splits text on non-alphanumeric boundaries and case-folds each token.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

fn doubled_consonant(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] && !b"aeiou".contains(&b[b.len() - 1])
}

/// Candidate stems for a token under the suffix rules: trailing `s`/`es`,
/// `ed` and `ing`, each with trailing-e restoration and doubled-consonant
/// reduction (`logged` -> `log`, `giving` -> `give`).
pub fn stem_candidates(token: &str) -> Vec<String> {
    let mut out = vec![token.to_string()];
    for suffix in ["ing", "ed"] {
        if let Some(base) = token.strip_suffix(suffix) {
            if base.chars().count() >= 2 {
                out.push(base.to_string());
                out.push(format!("{base}e"));
                if doubled_consonant(base) {
                    out.push(base[..base.len() - 1].to_string());
                }
            }
        }
    }
    if let Some(base) = token.strip_suffix("es") {
        if base.chars().count() >= 2 {
            out.push(base.to_string());
        }
    }
    if let Some(base) = token.strip_suffix('s') {
        if !base.ends_with('s') && base.chars().count() >= 2 {
            out.push(base.to_string());
        }
    }
    out
}

/// User-supplied action stems, kept in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionLexicon {
    entries: Vec<String>,
}

impl ActionLexicon {
    pub fn new<I, S>(entries: I) -> Result<Self, MinerError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = ActionLexicon::default();
        for (i, e) in entries.into_iter().enumerate() {
            lex.push(e.as_ref(), i + 1)?;
        }
        Ok(lex)
    }

    /// Parses a lexicon file: one stem per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MinerError> {
        let mut lex = ActionLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let entry = line.split('#').next().unwrap_or("").trim();
            if !entry.is_empty() {
                lex.push(entry, i + 1)?;
            }
        }
        Ok(lex)
    }

    fn push(&mut self, entry: &str, line: usize) -> Result<(), MinerError> {
        let stem = entry.trim().to_lowercase();
        if stem.is_empty() || !stem.chars().all(char::is_alphanumeric) {
            return Err(MinerError::Lexicon {
                line,
                message: format!("`{entry}` is not a single alphanumeric token"),
            });
        }
        if !self.entries.contains(&stem) {
            self.entries.push(stem);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Index of the lexicon entry a token inflects, if any.
    pub fn match_token(&self, token: &str) -> Option<usize> {
        stem_candidates(token)
            .iter()
            .find_map(|c| self.entries.iter().position(|e| e == c))
    }

    /// Indices of every lexicon action mentioned in `text`.
    pub fn actions_in(&self, text: &str) -> BTreeSet<usize> {
        tokenize(text)
            .filter_map(|t| self.match_token(&t))
            .collect()
    }

    pub fn mentions_action(&self, text: &str) -> bool {
        tokenize(text).any(|t| self.match_token(&t).is_some())
    }
}
