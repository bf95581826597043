use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Bound;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use chrono_tz::Tz;
use mediascope_core::text::case_fold;
use mediascope_core::{NewsDoc, TopicLabel};
use serde::{Deserialize, Serialize};

type Postings = BTreeSet<u32>;

/// Conjunctive document filter. Within `media` and `topics` any listed
/// value matches; every entry of `terms` must be among the doc's lemmas.
/// Empty fields do not constrain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocFilter {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub media: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub topics: Vec<TopicLabel>,
    /// Inclusive start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<DateTime<Utc>>,
    /// Exclusive end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geoname_id: Option<u64>,
}

impl DocFilter {
    pub fn validate(&self) -> Result<(), QueryError> {
        if let (Some(s), Some(e)) = (self.start, self.end) {
            if s >= e {
                return Err(QueryError::DateRange { start: s, end: e });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("date range start {start} is not before end {end}")]
    DateRange { start: DateTime<Utc>, end: DateTime<Utc> },
    #[error("limit must be at least 1")]
    Limit,
    #[error("unknown facet field {0:?} (expected medium, topic, locality or day)")]
    FacetField(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacetField {
    Medium,
    Topic,
    Locality,
    Day,
}

impl FromStr for FacetField {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "medium" => Ok(FacetField::Medium),
            "topic" => Ok(FacetField::Topic),
            "locality" => Ok(FacetField::Locality),
            "day" => Ok(FacetField::Day),
            other => Err(QueryError::FacetField(other.to_string())),
        }
    }
}

impl fmt::Display for FacetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FacetField::Medium => "medium",
            FacetField::Topic => "topic",
            FacetField::Locality => "locality",
            FacetField::Day => "day",
        })
    }
}

/// Exact per-value document counts. Locality values are geoname ids and a
/// doc counts once per distinct locality it mentions; day values are local
/// dates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetCount {
    pub field: FacetField,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub offset: usize,
    pub limit: usize,
}

impl Default for Page {
    fn default() -> Self {
        Page { offset: 0, limit: 50 }
    }
}

/// One page of matches, newest first, then by `doc_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub docs: Vec<NewsDoc>,
}

/// In-memory inverted index over the documents of a store. Slots are
/// assigned in log order, so replaying a log rebuilds an identical index.
#[derive(Debug, Clone, PartialEq)]
pub struct DocIndex {
    tz: Tz,
    docs: Vec<NewsDoc>,
    slot_of: HashMap<String, u32>,
    medium: BTreeMap<String, Postings>,
    topic: BTreeMap<TopicLabel, Postings>,
    day: BTreeMap<NaiveDate, Postings>,
    lemma: HashMap<String, Postings>,
    locality: BTreeMap<u64, Postings>,
    by_time: BTreeSet<(DateTime<Utc>, u32)>,
}

fn localities(doc: &NewsDoc) -> BTreeSet<u64> {
    doc.geo_mentions.iter().map(|m| m.entry.geoname_id).collect()
}

impl DocIndex {
    pub fn new(tz: Tz) -> Self {
        DocIndex {
            tz,
            docs: Vec::new(),
            slot_of: HashMap::new(),
            medium: BTreeMap::new(),
            topic: BTreeMap::new(),
            day: BTreeMap::new(),
            lemma: HashMap::new(),
            locality: BTreeMap::new(),
            by_time: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&NewsDoc> {
        self.slot_of.get(doc_id).map(|&s| &self.docs[s as usize])
    }

    /// Documents in insertion order.
    pub fn docs(&self) -> &[NewsDoc] {
        &self.docs
    }

    fn local_day(&self, ts: &DateTime<Utc>) -> NaiveDate {
        ts.with_timezone(&self.tz).date_naive()
    }

    /// Adds or replaces a document.
    pub fn put(&mut self, doc: NewsDoc) {
        let slot = match self.slot_of.get(&doc.doc_id) {
            Some(&s) => {
                self.unpost(s);
                s
            }
            None => {
                let s = self.docs.len() as u32;
                self.slot_of.insert(doc.doc_id.clone(), s);
                self.docs.push(doc.clone());
                s
            }
        };
        self.docs[slot as usize] = doc;
        self.post(slot);
    }

    fn post(&mut self, slot: u32) {
        let doc = &self.docs[slot as usize];
        let day = self.local_day(&doc.published_at);
        self.medium.entry(doc.medium_handle.clone()).or_default().insert(slot);
        if let Some(t) = doc.topic {
            self.topic.entry(t).or_default().insert(slot);
        }
        self.day.entry(day).or_default().insert(slot);
        for l in &doc.lemmas {
            self.lemma.entry(l.clone()).or_default().insert(slot);
        }
        for id in localities(doc) {
            self.locality.entry(id).or_default().insert(slot);
        }
        self.by_time.insert((doc.published_at, slot));
    }

    fn unpost(&mut self, slot: u32) {
        fn remove<K: Ord>(map: &mut BTreeMap<K, Postings>, key: K, slot: u32) {
            if let Some(p) = map.get_mut(&key) {
                p.remove(&slot);
                if p.is_empty() {
                    map.remove(&key);
                }
            }
        }
        let doc = self.docs[slot as usize].clone();
        remove(&mut self.medium, doc.medium_handle.clone(), slot);
        if let Some(t) = doc.topic {
            remove(&mut self.topic, t, slot);
        }
        let day = self.local_day(&doc.published_at);
        remove(&mut self.day, day, slot);
        for l in &doc.lemmas {
            if let Some(p) = self.lemma.get_mut(l) {
                p.remove(&slot);
                if p.is_empty() {
                    self.lemma.remove(l);
                }
            }
        }
        for id in localities(&doc) {
            remove(&mut self.locality, id, slot);
        }
        self.by_time.remove(&(doc.published_at, slot));
    }

    /// Slots matching `filter`, unordered.
    fn matching(&self, filter: &DocFilter) -> Vec<u32> {
        // Each constraint is a union of posting lists; a doc must be in
        // every constraint.
        let mut constraints: Vec<Vec<&Postings>> = Vec::new();
        let empty = Postings::new();
        if !filter.media.is_empty() {
            constraints.push(filter.media.iter().map(|m| self.medium.get(m).unwrap_or(&empty)).collect());
        }
        if !filter.topics.is_empty() {
            constraints.push(filter.topics.iter().map(|t| self.topic.get(t).unwrap_or(&empty)).collect());
        }
        for term in &filter.terms {
            constraints.push(vec![self.lemma.get(&case_fold(term)).unwrap_or(&empty)]);
        }
        if let Some(id) = filter.geoname_id {
            constraints.push(vec![self.locality.get(&id).unwrap_or(&empty)]);
        }
        let in_range: Option<Postings> = (filter.start.is_some() || filter.end.is_some()).then(|| {
            let lo = filter.start.map_or(Bound::Unbounded, |s| Bound::Included((s, 0)));
            let hi = filter.end.map_or(Bound::Unbounded, |e| Bound::Excluded((e, 0)));
            self.by_time.range((lo, hi)).map(|(_, s)| *s).collect()
        });
        if let Some(r) = &in_range {
            constraints.push(vec![r]);
        }
        if constraints.is_empty() {
            return (0..self.docs.len() as u32).collect();
        }
        let size = |c: &Vec<&Postings>| c.iter().map(|p| p.len()).sum::<usize>();
        let (seed_at, _) = constraints.iter().enumerate().min_by_key(|(_, c)| size(c)).expect("non-empty");
        let seed: BTreeSet<u32> = constraints[seed_at].iter().flat_map(|p| p.iter().copied()).collect();
        seed.into_iter()
            .filter(|slot| {
                constraints
                    .iter()
                    .enumerate()
                    .all(|(i, c)| i == seed_at || c.iter().any(|p| p.contains(slot)))
            })
            .collect()
    }

    pub fn query(&self, filter: &DocFilter, page: Page) -> Result<QueryResult, QueryError> {
        filter.validate()?;
        if page.limit == 0 {
            return Err(QueryError::Limit);
        }
        let mut hits = self.matching(filter);
        hits.sort_by(|&a, &b| {
            let (da, db) = (&self.docs[a as usize], &self.docs[b as usize]);
            db.published_at.cmp(&da.published_at).then_with(|| da.doc_id.cmp(&db.doc_id))
        });
        let docs = hits.iter().skip(page.offset).take(page.limit).map(|&s| self.docs[s as usize].clone()).collect();
        Ok(QueryResult { total: hits.len(), offset: page.offset, limit: page.limit, docs })
    }

    /// Every matching document, unpaginated, in `doc_id` order.
    pub fn select(&self, filter: &DocFilter) -> Result<Vec<&NewsDoc>, QueryError> {
        filter.validate()?;
        let mut docs: Vec<&NewsDoc> = self.matching(filter).into_iter().map(|s| &self.docs[s as usize]).collect();
        docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Ok(docs)
    }

    pub fn facet_counts(&self, filter: &DocFilter, field: FacetField) -> Result<FacetCount, QueryError> {
        filter.validate()?;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for slot in self.matching(filter) {
            let doc = &self.docs[slot as usize];
            let values: Vec<String> = match field {
                FacetField::Medium => vec![doc.medium_handle.clone()],
                FacetField::Topic => doc.topic.map(|t| t.as_str().to_string()).into_iter().collect(),
                FacetField::Locality => localities(doc).into_iter().map(|id| id.to_string()).collect(),
                FacetField::Day => vec![self.local_day(&doc.published_at).to_string()],
            };
            for v in values {
                *counts.entry(v).or_default() += 1;
            }
        }
        Ok(FacetCount { field, counts })
    }
}
