use std::collections::HashSet;
use std::io::{BufRead, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use mediascope_core::TweetRecord;
use serde::{Deserialize, Serialize};

use super::{FormatError, LineWarning};

/// One line of the tweet stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetLine {
    pub tweet_id: String,
    pub medium: String,
    pub created_at: String,
    pub text: String,
    #[serde(default)]
    pub urls: Vec<String>,
}

impl From<&TweetRecord> for TweetLine {
    fn from(r: &TweetRecord) -> Self {
        TweetLine {
            tweet_id: r.tweet_id.clone(),
            medium: r.medium_handle.clone(),
            created_at: r.published_at.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            text: r.text.clone(),
            urls: r.urls.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TweetStream {
    pub records: Vec<TweetRecord>,
    pub warnings: Vec<LineWarning>,
    /// Non-blank lines read, valid or not.
    pub lines: usize,
}

/// Parses an NDJSON tweet stream. Bad lines become warnings; only an I/O
/// failure is fatal. Input order is kept and a repeated `tweet_id` keeps
/// its first occurrence.
pub fn parse_tweet_stream(reader: impl BufRead) -> Result<TweetStream, FormatError> {
    let mut out = TweetStream::default();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.lines += 1;
        let n = i + 1;
        let mut warn = |message: String| out.warnings.push(LineWarning { line: n, message });
        let raw: TweetLine = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(e) => {
                warn(format!("malformed record: {e}"));
                continue;
            }
        };
        if raw.tweet_id.trim().is_empty() {
            warn("empty tweet_id".into());
            continue;
        }
        let published_at = match DateTime::parse_from_rfc3339(&raw.created_at) {
            Ok(t) => t.with_timezone(&Utc),
            Err(e) => {
                warn(format!("bad created_at {:?}: {e}", raw.created_at));
                continue;
            }
        };
        if !seen.insert(raw.tweet_id.clone()) {
            warn(format!("duplicate tweet_id {}", raw.tweet_id));
            continue;
        }
        out.records.push(TweetRecord {
            tweet_id: raw.tweet_id,
            medium_handle: raw.medium,
            published_at,
            text: raw.text,
            urls: raw.urls,
            unknown_medium: false,
        });
    }
    Ok(out)
}

pub fn write_tweet_stream<'a>(records: impl IntoIterator<Item = &'a TweetRecord>, mut out: impl Write) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &TweetLine::from(r))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_failure_keeps_valid_lines() {
        let input = concat!(
            r#"{"tweet_id":"1","medium":"emol","created_at":"2015-10-08T21:00:00Z","text":"Gol","urls":["https://emol.cl/a"]}"#,
            "\n",
            r#"{"tweet_id":"2","medium":"emol","created_at":"2015-10-08T21:05:00-03:00","text":"Gol 2"}"#,
            "\n{not json\n\n",
            r#"{"tweet_id":"3","medium":"biobio","created_at":"2015-10-09T10:00:00Z","text":"Sismo","urls":[]}"#,
            "\n",
        );
        let s = parse_tweet_stream(input.as_bytes()).unwrap();
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.warnings, [LineWarning { line: 3, message: s.warnings[0].message.clone() }]);
        assert_eq!(s.records[1].published_at.to_rfc3339(), "2015-10-09T00:05:00+00:00");
        assert_eq!(s.lines, 4);
    }

    #[test]
    fn duplicate_ids_and_bad_dates_warn() {
        let input = concat!(
            r#"{"tweet_id":"1","medium":"a","created_at":"2015-10-08T21:00:00Z","text":"x"}"#,
            "\n",
            r#"{"tweet_id":"1","medium":"a","created_at":"2015-10-08T21:00:00Z","text":"y"}"#,
            "\n",
            r#"{"tweet_id":"2","medium":"a","created_at":"ayer","text":"z"}"#,
            "\n",
            r#"{"tweet_id":"","medium":"a","created_at":"2015-10-08T21:00:00Z","text":"z"}"#,
        );
        let s = parse_tweet_stream(input.as_bytes()).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].text, "x");
        let lines: Vec<usize> = s.warnings.iter().map(|w| w.line).collect();
        assert_eq!(lines, [2, 3, 4]);
    }

    #[test]
    fn write_then_parse_roundtrips() {
        let input = r#"{"tweet_id":"7","medium":"tvn","created_at":"2015-06-01T12:30:00Z","text":"¿Qué pasó?","urls":["https://tvn.cl/x"]}"#;
        let s = parse_tweet_stream(input.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_tweet_stream(&s.records, &mut buf).unwrap();
        assert_eq!(parse_tweet_stream(buf.as_slice()).unwrap().records, s.records);
    }
}
