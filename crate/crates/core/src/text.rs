//! Case and accent folding shared by the lexical modules.

use alloc::string::String;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases `s`, keeping accents (`Acusó` -> `acusó`).
pub fn case_fold(s: &str) -> String {
    s.chars().flat_map(char::to_lowercase).collect()
}

/// Lowercases and strips diacritics (`Viña del Mar` -> `vina del mar`).
pub fn accent_fold(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Gazetteer lookup key: accent-folded, hyphens and runs of whitespace
/// collapsed to a single space, trimmed.
pub fn toponym_key(s: &str) -> String {
    let folded = accent_fold(s);
    let mut out = String::with_capacity(folded.len());
    for word in folded.split(|c: char| c.is_whitespace() || c == '-') {
        if word.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Case-folds and collapses whitespace; the dedup key for tweets without links.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds() {
        assert_eq!(case_fold("Acusó"), "acusó");
        assert_eq!(accent_fold("Viña del Mar"), "vina del mar");
        assert_eq!(accent_fold("CONCEPCIÓN"), "concepcion");
        assert_eq!(toponym_key("  Viña   del-Mar "), "vina del mar");
        assert_eq!(normalize_text("  Hola\t  MUNDO\n"), "hola mundo");
    }
}
