use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::{DateTime, Datelike, Utc};
use chrono_tz::Tz;
use core::fmt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{canonicalize_url, Emission, FetchStatus, NewsDoc, TweetRecord};
use crate::text::normalize_text;

/// Calendar month in the bucketing timezone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month out of range: {month}");
        YearMonth { year, month }
    }

    pub fn of(ts: &DateTime<Utc>, tz: Tz) -> Self {
        let local = ts.with_timezone(&tz);
        YearMonth {
            year: local.year(),
            month: local.month(),
        }
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            YearMonth {
                year: self.year + 1,
                month: 1,
            }
        } else {
            YearMonth {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DedupeOutcome {
    /// Unique news, sorted by `doc_id`.
    pub docs: Vec<NewsDoc>,
    /// Tweets folded into the output.
    pub emissions: usize,
    /// Tweets that repeated an already seen item.
    pub duplicates: usize,
    /// Tweets skipped because they fall outside the requested month.
    pub out_of_month: usize,
}

/// Hex digest identifying a news item within a month.
pub fn doc_id_for(month: YearMonth, key: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{month}\n{key}").as_bytes());
    let digest = hasher.finalize();
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

enum Key {
    Url(String),
    Broken(String),
    Text(String),
}

impl Key {
    fn of(record: &TweetRecord) -> Key {
        match record.urls.first() {
            Some(raw) => match canonicalize_url(raw) {
                Ok(url) => Key::Url(url),
                Err(_) => Key::Broken(String::from(raw.trim())),
            },
            None => Key::Text(normalize_text(&record.text)),
        }
    }

    fn dedup_string(&self) -> String {
        match self {
            Key::Url(u) => format!("url:{u}"),
            Key::Broken(u) => format!("raw:{u}"),
            Key::Text(t) => format!("text:{t}"),
        }
    }
}

/// Folds one month of tweets into unique news stubs.
///
/// Items are keyed by the canonical form of the tweet's first URL, or by the
/// normalized tweet text when it has none. The earliest tweet supplies the
/// medium, timestamp and text. Stubs with a fetchable URL start as
/// `fetch_error` until [`resolve_and_scrape`](super::resolve_and_scrape)
/// resolves them.
pub fn dedupe_news(
    records: &[TweetRecord],
    month: YearMonth,
    tz: Tz,
    country_hint: &str,
) -> DedupeOutcome {
    let mut ordered: Vec<&TweetRecord> = records.iter().collect();
    ordered.sort_by(|a, b| (a.published_at, &a.tweet_id).cmp(&(b.published_at, &b.tweet_id)));

    let mut outcome = DedupeOutcome::default();
    let mut by_key: BTreeMap<String, NewsDoc> = BTreeMap::new();
    for record in ordered {
        if YearMonth::of(&record.published_at, tz) != month {
            outcome.out_of_month += 1;
            continue;
        }
        outcome.emissions += 1;
        let key = Key::of(record);
        let emission = Emission {
            tweet_id: record.tweet_id.clone(),
            medium_handle: record.medium_handle.clone(),
            published_at: record.published_at,
        };
        let dedup = key.dedup_string();
        if let Some(doc) = by_key.get_mut(&dedup) {
            outcome.duplicates += 1;
            doc.emissions.push(emission);
            continue;
        }
        let (canonical_url, fetch_status) = match &key {
            Key::Url(u) => (Some(u.clone()), FetchStatus::FetchError),
            Key::Broken(_) => (None, FetchStatus::BrokenLink),
            Key::Text(_) => (None, FetchStatus::NoLink),
        };
        let doc = NewsDoc {
            doc_id: doc_id_for(month, &dedup),
            medium_handle: record.medium_handle.clone(),
            published_at: record.published_at,
            tweet_text: record.text.clone(),
            canonical_url,
            extra_urls: record.urls.iter().skip(1).cloned().collect(),
            title: None,
            body: None,
            fetch_status,
            topic: None,
            classified_from: None,
            keywords: Vec::new(),
            lemmas: Vec::new(),
            geo_mentions: Vec::new(),
            country_hint: String::from(country_hint),
            emissions: alloc::vec![emission],
        };
        by_key.insert(dedup, doc);
    }
    outcome.docs = by_key.into_values().collect();
    outcome.docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    outcome
}

/// Splits a stream by local calendar month and dedupes each month separately.
pub fn dedupe_stream(records: &[TweetRecord], tz: Tz, country_hint: &str) -> DedupeOutcome {
    let mut months: BTreeMap<YearMonth, Vec<TweetRecord>> = BTreeMap::new();
    for r in records {
        months
            .entry(YearMonth::of(&r.published_at, tz))
            .or_default()
            .push(r.clone());
    }
    let mut total = DedupeOutcome::default();
    for (month, recs) in months {
        let part = dedupe_news(&recs, month, tz, country_hint);
        total.emissions += part.emissions;
        total.duplicates += part.duplicates;
        total.docs.extend(part.docs);
    }
    total.docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    total
}
