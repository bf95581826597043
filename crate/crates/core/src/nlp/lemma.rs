use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::hmm::reserved_tag;
use super::token::Token;
use crate::text::case_fold;

/// Suffix rewrite applied to words whose tag starts with `pos` (`*` matches
/// any tag).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRule {
    pub pos: String,
    pub suffix: String,
    pub replacement: String,
    pub priority: i32,
}

/// Irregular form with a fixed lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaException {
    pub pos: String,
    pub form: String,
    pub lemma: String,
}

fn pos_matches(pattern: &str, tag: Option<&str>) -> bool {
    pattern == "*" || tag.is_some_and(|t| t.starts_with(pattern))
}

/// Rule-table lemmatizer. Matching is case-folded but keeps accents, so
/// `acusó` and `acuso` stay distinct.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lemmatizer {
    rules: Vec<LemmaRule>,
    exceptions: Vec<LemmaException>,
    /// Minimum characters a rule must leave before the replacement.
    min_stem: usize,
}

impl Lemmatizer {
    /// Rules are tried longest suffix first, then by descending priority,
    /// then more specific `pos` first, then in the order given.
    pub fn new(mut rules: Vec<LemmaRule>, mut exceptions: Vec<LemmaException>) -> Lemmatizer {
        for r in &mut rules {
            r.suffix = case_fold(&r.suffix);
            r.replacement = case_fold(&r.replacement);
        }
        rules.sort_by(|a, b| {
            let key = |r: &LemmaRule| {
                (
                    core::cmp::Reverse(r.suffix.chars().count()),
                    core::cmp::Reverse(r.priority),
                    core::cmp::Reverse(if r.pos == "*" { 0 } else { r.pos.len() }),
                )
            };
            key(a).cmp(&key(b))
        });
        for e in &mut exceptions {
            e.form = case_fold(&e.form);
            e.lemma = case_fold(&e.lemma);
        }
        exceptions.sort_by_key(|e| core::cmp::Reverse(if e.pos == "*" { 0 } else { e.pos.len() }));
        Lemmatizer {
            rules,
            exceptions,
            min_stem: 2,
        }
    }

    pub fn with_min_stem(mut self, min_stem: usize) -> Self {
        self.min_stem = min_stem;
        self
    }

    pub fn rules(&self) -> &[LemmaRule] {
        &self.rules
    }

    pub fn exceptions(&self) -> &[LemmaException] {
        &self.exceptions
    }

    /// Lemma of `word` under tag `pos`; the case-folded word when nothing applies.
    pub fn lemmatize_word(&self, word: &str, pos: Option<&str>) -> String {
        let folded = case_fold(word);
        if let Some(e) = self
            .exceptions
            .iter()
            .find(|e| e.form == folded && pos_matches(&e.pos, pos))
        {
            return e.lemma.clone();
        }
        for rule in &self.rules {
            if !pos_matches(&rule.pos, pos) {
                continue;
            }
            if let Some(stem) = folded.strip_suffix(rule.suffix.as_str()) {
                if stem.chars().count() >= self.min_stem {
                    let mut out = String::from(stem);
                    out.push_str(&rule.replacement);
                    return out;
                }
            }
        }
        folded
    }

    /// Lemma of a tagged token. Tokens outside the word class keep their
    /// case-folded surface.
    pub fn lemmatize(&self, token: &Token) -> String {
        if reserved_tag(token.kind).is_some() {
            return case_fold(&token.surface);
        }
        self.lemmatize_word(&token.surface, token.pos.as_deref())
    }

    /// Fills `lemma` on every token.
    pub fn lemmatize_tokens(&self, tokens: &mut [Token]) {
        for t in tokens.iter_mut() {
            t.lemma = Some(self.lemmatize(t));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn rule(pos: &str, suffix: &str, rep: &str, prio: i32) -> LemmaRule {
        LemmaRule {
            pos: pos.to_string(),
            suffix: suffix.to_string(),
            replacement: rep.to_string(),
            priority: prio,
        }
    }

    fn lem() -> Lemmatizer {
        Lemmatizer::new(
            vec![
                rule("NC", "s", "", 1),
                rule("NC", "ciones", "ción", 5),
                rule("NC", "es", "", 2),
                rule("V", "ó", "ar", 1),
            ],
            vec![LemmaException {
                pos: "V".to_string(),
                form: "fue".to_string(),
                lemma: "ser".to_string(),
            }],
        )
    }

    #[test]
    fn longest_suffix_first() {
        let l = lem();
        assert_eq!(
            l.lemmatize_word("movilizaciones", Some("NC")),
            "movilización"
        );
        assert_eq!(l.lemmatize_word("Casas", Some("NC")), "casa");
        assert_eq!(l.lemmatize_word("casa", Some("NC")), "casa");
        assert_eq!(l.lemmatize_word("acusó", Some("VLfin")), "acusar");
    }

    #[test]
    fn pos_conditioning_and_exceptions() {
        let l = lem();
        assert_eq!(l.lemmatize_word("acusó", Some("NC")), "acusó");
        assert_eq!(l.lemmatize_word("Fue", Some("VSfin")), "ser");
        assert_eq!(l.lemmatize_word("fue", None), "fue");
        // Accents are preserved: present-tense "acuso" is not "acusó".
        assert_eq!(l.lemmatize_word("acuso", Some("VLfin")), "acuso");
    }

    #[test]
    fn short_stems_untouched() {
        assert_eq!(lem().lemmatize_word("es", Some("NC")), "es");
    }
}
