#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use chrono_tz::Tz;
use mediascope::config::PipelineConfig;
use mediascope::fetch::fetcher_from;
use mediascope::store::{DocFilter, FacetField, Page};
use mediascope::synth::{self, FixtureManifest};
use mediascope::{run_pipeline, Resources, RunSummary};
use mediascope_core::text::case_fold;
use mediascope_core::{NewsDoc, TopicLabel};
use rand::seq::SliceRandom;
use rand::Rng;

pub const TZ: Tz = chrono_tz::America::Santiago;

pub fn fixture(dir: &Path, docs: usize, seed: u64) -> (PipelineConfig, FixtureManifest) {
    let manifest = synth::write_pipeline_fixture(dir, docs, seed).unwrap();
    let config = PipelineConfig::load(&dir.join(synth::FIXTURE_CONFIG), &[]).unwrap();
    (config, manifest)
}

pub fn run(config: &PipelineConfig) -> RunSummary {
    let resources = Resources::load(config).unwrap();
    let fetcher = fetcher_from(config).unwrap();
    run_pipeline(config, &resources, fetcher.as_ref()).unwrap()
}

/// Linear-scan reference for the index.
pub fn oracle_matches(doc: &NewsDoc, f: &DocFilter) -> bool {
    (f.media.is_empty() || f.media.contains(&doc.medium_handle))
        && (f.topics.is_empty() || doc.topic.is_some_and(|t| f.topics.contains(&t)))
        && f.start.is_none_or(|s| doc.published_at >= s)
        && f.end.is_none_or(|e| doc.published_at < e)
        && f.terms.iter().all(|t| doc.lemmas.contains(&case_fold(t)))
        && f.geoname_id.is_none_or(|id| doc.geo_mentions.iter().any(|m| m.entry.geoname_id == id))
}

/// Matching ids, newest first then by id, plus the total.
pub fn oracle_page(docs: &[NewsDoc], f: &DocFilter, page: Page) -> (usize, Vec<String>) {
    let mut hits: Vec<&NewsDoc> = docs.iter().filter(|d| oracle_matches(d, f)).collect();
    hits.sort_by(|a, b| b.published_at.cmp(&a.published_at).then(a.doc_id.cmp(&b.doc_id)));
    let ids = hits.iter().skip(page.offset).take(page.limit).map(|d| d.doc_id.clone()).collect();
    (hits.len(), ids)
}

pub fn oracle_facets(docs: &[NewsDoc], f: &DocFilter, field: FacetField, tz: Tz) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for d in docs.iter().filter(|d| oracle_matches(d, f)) {
        let values: Vec<String> = match field {
            FacetField::Medium => vec![d.medium_handle.clone()],
            FacetField::Topic => d.topic.iter().map(|t| t.as_str().to_string()).collect(),
            FacetField::Locality => {
                let ids: BTreeSet<u64> = d.geo_mentions.iter().map(|m| m.entry.geoname_id).collect();
                ids.iter().map(u64::to_string).collect()
            }
            FacetField::Day => vec![d.published_at.with_timezone(&tz).date_naive().to_string()],
        };
        for v in values {
            *out.entry(v).or_insert(0) += 1;
        }
    }
    out
}

/// A random valid filter over the value space `synth::store_docs` draws from.
pub fn random_filter(rng: &mut impl Rng, docs: &[NewsDoc]) -> DocFilter {
    let handles = synth::roster_handles();
    let mut f = DocFilter::default();
    if rng.gen_bool(0.4) {
        let n = rng.gen_range(1..4);
        f.media = handles.choose_multiple(rng, n).cloned().collect();
    }
    if rng.gen_bool(0.4) {
        let n = rng.gen_range(1..3);
        f.topics = TopicLabel::ALL.choose_multiple(rng, n).copied().collect();
    }
    if rng.gen_bool(0.4) {
        let base: DateTime<Utc> = Utc.with_ymd_and_hms(2015, 6, 1, 0, 0, 0).unwrap();
        let a = base + Duration::hours(rng.gen_range(0..24 * 180));
        let b = a + Duration::hours(rng.gen_range(1..24 * 60));
        match rng.gen_range(0..3) {
            0 => f.start = Some(a),
            1 => f.end = Some(b),
            _ => (f.start, f.end) = (Some(a), Some(b)),
        }
    }
    if rng.gen_bool(0.3) {
        let n = rng.gen_range(1..3);
        f.terms = (0..n).map(|_| format!("lema{}", rng.gen_range(0..40))).collect();
        if rng.gen_bool(0.2) {
            f.terms[0] = f.terms[0].to_uppercase();
        }
    }
    if rng.gen_bool(0.2) {
        let with_geo: Vec<&NewsDoc> = docs.iter().filter(|d| !d.geo_mentions.is_empty()).collect();
        f.geoname_id = match with_geo.choose(rng) {
            Some(d) if rng.gen_bool(0.9) => Some(d.geo_mentions[0].entry.geoname_id),
            _ => Some(1),
        };
    }
    f
}
