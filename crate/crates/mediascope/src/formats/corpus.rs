use std::io::{BufRead, Write};

use mediascope_core::classify::TopicLabel;
use mediascope_core::nlp::TaggedSentence;
use serde::{Deserialize, Serialize};

use super::FormatError;

/// Reads `word<TAB>TAG` lines with a blank line between sentences.
pub fn read_tagged_corpus(reader: impl BufRead) -> Result<Vec<TaggedSentence>, FormatError> {
    let mut corpus = Vec::new();
    let mut sentence = TaggedSentence::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !sentence.is_empty() {
                corpus.push(std::mem::take(&mut sentence));
            }
            continue;
        }
        let (word, tag) = line
            .split_once('\t')
            .filter(|(w, t)| !w.is_empty() && !t.is_empty() && !t.contains('\t'))
            .ok_or_else(|| FormatError::line(i + 1, "expected word<TAB>TAG"))?;
        sentence.push((word.to_string(), tag.to_string()));
    }
    if !sentence.is_empty() {
        corpus.push(sentence);
    }
    Ok(corpus)
}

pub fn write_tagged_corpus(corpus: &[TaggedSentence], mut out: impl Write) -> std::io::Result<()> {
    for (i, sentence) in corpus.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        for (word, tag) in sentence {
            writeln!(out, "{word}\t{tag}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub id: String,
    pub text: String,
    pub label: TopicLabel,
}

#[derive(Deserialize)]
struct RawLabeled {
    id: String,
    text: String,
    label: String,
}

/// Reads the NDJSON labeled corpus. Labels are matched without regard to
/// accents or case, so `economia` and `Economía` both parse.
pub fn read_labeled_corpus(reader: impl BufRead) -> Result<Vec<LabeledDoc>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawLabeled = serde_json::from_str(&line).map_err(|e| FormatError::line(i + 1, e.to_string()))?;
        let label = raw.label.parse().map_err(|e| FormatError::line(i + 1, format!("{e}")))?;
        out.push(LabeledDoc { id: raw.id, text: raw.text, label });
    }
    Ok(out)
}

pub fn write_labeled_corpus(docs: &[LabeledDoc], mut out: impl Write) -> std::io::Result<()> {
    for d in docs {
        serde_json::to_writer(&mut out, d)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_split_on_blank_lines() {
        let text = "Vamos\tVLfin\na\tPREP\n\n\nel\tART\nplan\tNC\n";
        let corpus = read_tagged_corpus(text.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[1][1], ("plan".to_string(), "NC".to_string()));
        let mut buf = Vec::new();
        write_tagged_corpus(&corpus, &mut buf).unwrap();
        assert_eq!(read_tagged_corpus(buf.as_slice()).unwrap(), corpus);
    }

    #[test]
    fn missing_tag_is_reported_with_line() {
        let err = read_tagged_corpus("casa\tNC\nperro\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FormatError::Line { line: 2, .. }));
    }

    #[test]
    fn labels_accept_unaccented_spelling() {
        let text = "{\"id\":\"a\",\"text\":\"El IPC subió\",\"label\":\"economia\"}\n{\"id\":\"b\",\"text\":\"x\",\"label\":\"Política\"}\n";
        let docs = read_labeled_corpus(text.as_bytes()).unwrap();
        assert_eq!(docs[0].label, TopicLabel::Economia);
        assert_eq!(docs[1].label, TopicLabel::Politica);
        let bad = read_labeled_corpus("{\"id\":\"a\",\"text\":\"x\",\"label\":\"clima\"}".as_bytes());
        assert!(matches!(bad, Err(FormatError::Line { line: 1, .. })));
    }
}
