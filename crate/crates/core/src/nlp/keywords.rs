use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::tfidf::TfIdfModel;
use crate::text::case_fold;

/// General-language word frequencies. Rank 0 is the most common word; ties
/// in count are ranked alphabetically.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrequencyList {
    ranks: BTreeMap<String, (usize, u64)>,
}

impl FrequencyList {
    /// Words are case-folded; repeated words keep their largest count and
    /// zero counts are dropped.
    pub fn new(entries: impl IntoIterator<Item = (String, u64)>) -> FrequencyList {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for (w, c) in entries {
            if c == 0 {
                continue;
            }
            let slot = counts.entry(case_fold(&w)).or_default();
            *slot = (*slot).max(c);
        }
        let mut ordered: Vec<(String, u64)> = counts.into_iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let ranks = ordered
            .into_iter()
            .enumerate()
            .map(|(rank, (w, c))| (w, (rank, c)))
            .collect();
        FrequencyList { ranks }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(&case_fold(word)).map(|(r, _)| *r)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.ranks.get(&case_fold(word)).map(|(_, c)| *c)
    }

    /// True when `word` is among the `cutoff` most common words.
    pub fn is_common(&self, word: &str, cutoff: usize) -> bool {
        self.rank(word).is_some_and(|r| r < cutoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordConfig {
    pub k: usize,
    /// Words ranked inside this many most-common entries are never keywords.
    pub commonness_cutoff: usize,
}

impl Default for KeywordConfig {
    fn default() -> Self {
        KeywordConfig {
            k: 5,
            commonness_cutoff: 500,
        }
    }
}

/// Top-`k` keywords of a lemmatized document.
///
/// The frequency list filters out common words and TF-IDF ranks the rest;
/// ties go to the alphabetically smaller lemma. Lemmas missing from the
/// document-frequency table are scored as if they occurred only in this
/// document. Zero-weight lemmas are never returned, so fewer than `k`
/// keywords may come back.
pub fn extract_keywords<S: AsRef<str>>(
    lemmas: &[S],
    stats: &TfIdfModel,
    freq: &FrequencyList,
    config: &KeywordConfig,
) -> Vec<String> {
    if config.k == 0 {
        return Vec::new();
    }
    let n = stats.n_docs().max(1) as f64;
    let mut scored: Vec<(f64, &str)> = TfIdfModel::term_counts(lemmas)
        .into_iter()
        .filter(|(lemma, _)| !freq.is_common(lemma, config.commonness_cutoff))
        .map(|(lemma, tf)| {
            let df = stats.df(lemma).unwrap_or(1).max(1);
            (f64::from(tf) * libm::log(n / f64::from(df)), lemma)
        })
        .filter(|(score, _)| *score > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored
        .into_iter()
        .take(config.k)
        .map(|(_, l)| String::from(l))
        .collect()
}
