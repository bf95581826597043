use std::io::BufRead;

use mediascope_core::nlp::{FrequencyList, LemmaException, LemmaRule, Lemmatizer};

use super::{data_lines, FormatError};

fn fields(line: &str, n: usize, line_no: usize, what: &str) -> Result<Vec<String>, FormatError> {
    let parts: Vec<String> = line.trim_end_matches('\r').split('\t').map(str::to_string).collect();
    if parts.len() != n {
        return Err(FormatError::line(line_no, format!("expected {what} ({n} tab-separated fields), got {}", parts.len())));
    }
    Ok(parts)
}

/// `pos<TAB>suffix<TAB>replacement<TAB>priority`. The replacement may be
/// empty; `*` as pos matches any tag.
pub fn read_rules(reader: impl BufRead) -> Result<Vec<LemmaRule>, FormatError> {
    let mut rules = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let f = fields(&line, 4, n, "pos, suffix, replacement, priority")?;
        if f[0].is_empty() || f[1].is_empty() {
            return Err(FormatError::line(n, "pos and suffix must be non-empty"));
        }
        let priority = f[3].trim().parse().map_err(|_| FormatError::line(n, format!("bad priority {:?}", f[3])))?;
        let [pos, suffix, replacement, _] = <[String; 4]>::try_from(f).expect("four fields");
        rules.push(LemmaRule { pos, suffix, replacement, priority });
    }
    Ok(rules)
}

/// `pos<TAB>form<TAB>lemma`.
pub fn read_exceptions(reader: impl BufRead) -> Result<Vec<LemmaException>, FormatError> {
    let mut out = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let f = fields(&line, 3, n, "pos, form, lemma")?;
        if f.iter().any(String::is_empty) {
            return Err(FormatError::line(n, "empty field"));
        }
        let [pos, form, lemma] = <[String; 3]>::try_from(f).expect("three fields");
        out.push(LemmaException { pos, form, lemma });
    }
    Ok(out)
}

pub fn read_lemmatizer(rules: impl BufRead, exceptions: impl BufRead) -> Result<Lemmatizer, FormatError> {
    Ok(Lemmatizer::new(read_rules(rules)?, read_exceptions(exceptions)?))
}

/// `word<TAB>count`, most frequent first. Counts must be positive.
pub fn read_frequency_list(reader: impl BufRead) -> Result<FrequencyList, FormatError> {
    let mut entries = Vec::new();
    for item in data_lines(reader) {
        let (n, line) = item?;
        let f = fields(&line, 2, n, "word, count")?;
        let count: u64 = f[1].trim().parse().map_err(|_| FormatError::line(n, format!("bad count {:?}", f[1])))?;
        if count == 0 || f[0].is_empty() {
            return Err(FormatError::line(n, "word must be non-empty and count positive"));
        }
        entries.push((f[0].clone(), count));
    }
    Ok(FrequencyList::new(entries))
}
