//! Tweet records, deduplicated news documents and article extraction.

mod canonical;
mod dedupe;
mod scrape;

pub use canonical::{canonicalize_url, CanonicalizeError, TRACKING_PARAMS};
pub use dedupe::{dedupe_news, dedupe_stream, doc_id_for, DedupeOutcome, YearMonth};
pub use scrape::{
    extract_article, resolve_and_scrape, ArticleContent, ExtractConfig, ExtractedText, FetchError,
    FetchResponse, Fetcher,
};

use alloc::string::String;
use alloc::vec::Vec;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::classify::TopicLabel;
use crate::geo::GeoMention;

/// One tweet as published by a medium's account.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub medium_handle: String,
    pub published_at: DateTime<Utc>,
    pub text: String,
    pub urls: Vec<String>,
    /// Set when the handle is absent from the media roster.
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub unknown_medium: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetchStatus {
    Ok,
    BrokenLink,
    NoLink,
    FetchError,
}

impl FetchStatus {
    pub const ALL: [FetchStatus; 4] = [
        FetchStatus::Ok,
        FetchStatus::BrokenLink,
        FetchStatus::NoLink,
        FetchStatus::FetchError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FetchStatus::Ok => "ok",
            FetchStatus::BrokenLink => "broken_link",
            FetchStatus::NoLink => "no_link",
            FetchStatus::FetchError => "fetch_error",
        }
    }
}

/// A single tweet that announced a news item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emission {
    pub tweet_id: String,
    pub medium_handle: String,
    pub published_at: DateTime<Utc>,
}

/// Which text the topic classifier saw for a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierInput {
    TitleBody,
    TweetText,
}

/// One deduplicated news item plus its annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewsDoc {
    pub doc_id: String,
    pub medium_handle: String,
    pub published_at: DateTime<Utc>,
    pub tweet_text: String,
    pub canonical_url: Option<String>,
    /// URLs after the first one in the announcing tweet.
    #[serde(default)]
    pub extra_urls: Vec<String>,
    pub title: Option<String>,
    pub body: Option<String>,
    pub fetch_status: FetchStatus,
    pub topic: Option<TopicLabel>,
    #[serde(default)]
    pub classified_from: Option<ClassifierInput>,
    #[serde(default)]
    pub keywords: Vec<String>,
    /// Sorted, distinct lemmas of the classified text; backs full-text filters.
    #[serde(default)]
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub geo_mentions: Vec<GeoMention>,
    pub country_hint: String,
    /// Every tweet that announced this item, ordered by (time, tweet id).
    pub emissions: Vec<Emission>,
}

impl NewsDoc {
    /// Number of repeated emissions beyond the first.
    pub fn duplicate_count(&self) -> usize {
        self.emissions.len().saturating_sub(1)
    }

    /// Text the classifier should see: title and body when the article was
    /// fetched, the tweet text otherwise.
    pub fn classification_text(&self) -> (String, ClassifierInput) {
        match (self.fetch_status, &self.body) {
            (FetchStatus::Ok, Some(body)) => {
                let mut text = String::new();
                if let Some(title) = &self.title {
                    text.push_str(title);
                    text.push('\n');
                }
                text.push_str(body);
                (text, ClassifierInput::TitleBody)
            }
            _ => (self.tweet_text.clone(), ClassifierInput::TweetText),
        }
    }
}
