//! Allocation-only core of the mediascope toolkit.
//!
//! Everything here is pure computation over in-memory data: tweet-stream
//! deduplication and article text extraction, the Spanish pretreatment chain
//! (tokenizer, HMM tagger, rule lemmatizer, TF-IDF), the one-vs-rest linear
//! SVM topic classifier with its cross-validation harness, gazetteer toponym
//! resolution, and the editorial/audience indicators.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the document
//! store, HTTP fetching and serving live in the `mediascope` crate.

#![no_std]

extern crate alloc;

pub mod analytics;
pub mod classify;
pub mod geo;
pub mod ingest;
pub mod nlp;
pub mod text;

pub use analytics::{
    AudienceClass, MediumKind, MediumProfile, TendencyFlags, TopicShares, VolumeSeries,
};
pub use classify::{ClassifierModel, EvalReport, SvmParams, TopicLabel};
pub use geo::{GazetteerEntry, GazetteerIndex, GeoMention};
pub use ingest::{FetchStatus, NewsDoc, TweetRecord};
pub use nlp::{DocumentVector, FrequencyList, HmmModel, Token, TokenKind};
