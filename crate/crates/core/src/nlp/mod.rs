//! Spanish pretreatment: tokenization, HMM tagging, lemmatization, TF-IDF
//! weighting and keyword extraction.

mod hmm;
mod keywords;
mod lemma;
mod tfidf;
mod token;

pub use hmm::{reserved_tag, HmmError, HmmModel, TaggedSentence, UnknownWordModel, MAX_SUFFIX};
pub use keywords::{extract_keywords, FrequencyList, KeywordConfig};
pub use lemma::{LemmaException, LemmaRule, Lemmatizer};
pub use tfidf::{compute_tfidf, DocumentVector, TfIdfModel};
pub use token::{tokenize, Span, Token, TokenKind};
