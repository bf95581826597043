//! ingest → scrape → nlp → classify → geotag → index.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use mediascope_core::analytics::{AudienceThresholds, MediumProfile};
use mediascope_core::classify::ClassifierModel;
use mediascope_core::geo::{disambiguate, match_toponyms, GazetteerIndex, RejectTags};
use mediascope_core::ingest::{dedupe_stream, resolve_and_scrape, ExtractConfig, Fetcher};
use mediascope_core::nlp::{extract_keywords, FrequencyList, KeywordConfig, TfIdfModel, Token};
use mediascope_core::NewsDoc;
use serde::{Deserialize, Serialize};

use crate::analyzer::{word_lemmas, Analyzer};
use crate::config::{ConfigError, PipelineConfig};
use crate::formats::{flag_unknown_media, parse_tweet_stream, read_file, read_frequency_list, read_gazetteer, read_roster, FormatError, ModelKind};
use crate::store::{IndexOutcome, Store, StoreError};
use crate::training::{self, TrainingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Scrape,
    Nlp,
    Classify,
    Geotag,
    Index,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Scrape => "scrape",
            Stage::Nlp => "nlp",
            Stage::Classify => "classify",
            Stage::Geotag => "geotag",
            Stage::Index => "index",
        })
    }
}

/// Bad input or configuration, as opposed to a failure of the tool itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Data,
    Internal,
}

#[derive(Debug, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: FailureKind,
    pub message: String,
}

impl PipelineError {
    fn data(stage: Stage, e: impl fmt::Display) -> Self {
        PipelineError { stage, kind: FailureKind::Data, message: e.to_string() }
    }

    fn from_format(stage: Stage, e: FormatError) -> Self {
        let kind = if e.is_io() { FailureKind::Internal } else { FailureKind::Data };
        PipelineError { stage, kind, message: e.to_string() }
    }

    fn from_training(stage: Stage, e: TrainingError) -> Self {
        match e {
            TrainingError::Format(f) => PipelineError::from_format(stage, f),
            other => PipelineError::data(stage, other),
        }
    }

    fn from_store(e: StoreError) -> Self {
        let kind = match e {
            StoreError::Corrupt { .. } | StoreError::BadHeader(_) | StoreError::Locked(_) => FailureKind::Data,
            _ => FailureKind::Internal,
        };
        PipelineError { stage: Stage::Index, kind, message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: Stage,
    pub docs_in: usize,
    pub docs_out: usize,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub lines: usize,
    pub records: usize,
    pub invalid_lines: usize,
    pub unknown_media: usize,
    pub emissions: usize,
    pub unique_docs: usize,
    pub duplicates: usize,
    pub fetch_status: BTreeMap<String, usize>,
    pub with_lemmas: usize,
    pub classified: usize,
    pub low_confidence: usize,
    pub topics: BTreeMap<String, usize>,
    pub geo_mentions: usize,
    pub docs_with_geo: usize,
    pub inserted: usize,
    pub unchanged: usize,
    pub overwritten: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub stages: Vec<StageSummary>,
    pub counts: RunCounts,
    pub warnings: Vec<String>,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8} {:>8} {:>9}", "stage", "in", "out", "ms")?;
        for s in &self.stages {
            writeln!(f, "{:<10} {:>8} {:>8} {:>9}", s.stage.to_string(), s.docs_in, s.docs_out, s.elapsed_ms)?;
        }
        let c = &self.counts;
        writeln!(f, "emissions {} -> unique docs {} ({} repeats)", c.emissions, c.unique_docs, c.duplicates)?;
        let status: Vec<String> = c.fetch_status.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(f, "fetch: {}", status.join(" "))?;
        writeln!(f, "store: {} inserted, {} unchanged, {} overwritten", c.inserted, c.unchanged, c.overwritten)?;
        if !self.warnings.is_empty() {
            writeln!(f, "{} warnings", self.warnings.len())?;
        }
        Ok(())
    }
}

/// Models and reference data the annotation stages need.
pub struct Resources {
    pub analyzer: Analyzer,
    pub classifier: ClassifierModel,
    pub gazetteer: GazetteerIndex,
    pub frequency: FrequencyList,
    pub roster: Vec<MediumProfile>,
}

pub fn load_roster(config: &PipelineConfig) -> Result<Vec<MediumProfile>, FormatError> {
    match &config.paths.media_roster {
        Some(p) => read_file(p, |r| read_roster(r, &AudienceThresholds::default())),
        None => Ok(Vec::new()),
    }
}

impl Resources {
    /// Loads or trains every model. Freshly trained models are saved under
    /// `<store>/models/` when a store is configured.
    pub fn load(config: &PipelineConfig) -> Result<Resources, PipelineError> {
        let roster = load_roster(config).map_err(|e| PipelineError::from_format(Stage::Ingest, e))?;
        let analyzer = training::analyzer_from(config).map_err(|e| PipelineError::from_training(Stage::Nlp, e))?;
        let frequency = match &config.paths.frequency_list {
            Some(p) => read_file(p, read_frequency_list).map_err(|e| PipelineError::from_format(Stage::Nlp, e))?,
            None => FrequencyList::default(),
        };
        let classifier = training::classifier_from(config, &analyzer).map_err(|e| PipelineError::from_training(Stage::Classify, e))?;
        let gazetteer_path = config.require("paths.gazetteer", &config.paths.gazetteer).map_err(|e| PipelineError::data(Stage::Geotag, e))?;
        let load = read_file(gazetteer_path, read_gazetteer).map_err(|e| PipelineError::from_format(Stage::Geotag, e))?;
        if load.skipped > 0 {
            log::warn!("gazetteer: skipped {} malformed rows", load.skipped);
        }
        if let Some(store) = &config.paths.store {
            let models = store.join("models");
            let save = |kind, res: Result<(), FormatError>| res.map_err(|e| PipelineError::from_format(kind, e));
            if config.paths.tagger_model.is_none() {
                save(Stage::Nlp, training::save_model_file(ModelKind::Tagger, &analyzer.tagger, &models.join("tagger.json")))?;
            }
            if config.paths.classifier_model.is_none() {
                save(Stage::Classify, training::save_model_file(ModelKind::Classifier, &classifier, &models.join("classifier.json")))?;
            }
        }
        Ok(Resources { analyzer, classifier, gazetteer: load.index, frequency, roster })
    }
}

/// Order-preserving parallel map over contiguous chunks.
fn par_map<T: Send, R: Send>(items: Vec<T>, workers: usize, f: impl Fn(T) -> R + Sync) -> Vec<R> {
    let workers = workers.max(1);
    if workers == 1 || items.len() < 2 {
        return items.into_iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut chunks: Vec<Vec<T>> = Vec::new();
    let mut it = items.into_iter().peekable();
    while it.peek().is_some() {
        chunks.push(it.by_ref().take(chunk).collect());
    }
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = chunks.into_iter().map(|c| s.spawn(move || c.into_iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

struct Timer {
    start: Instant,
}

impl Timer {
    fn start() -> Self {
        Timer { start: Instant::now() }
    }

    fn stage(self, stage: Stage, docs_in: usize, docs_out: usize) -> StageSummary {
        StageSummary { stage, docs_in, docs_out, elapsed_ms: self.start.elapsed().as_millis() as u64 }
    }
}

/// Runs every stage over the configured tweet stream and indexes the result.
/// The store ends up the same whatever the fetch timing: documents are
/// written in `doc_id` order and re-running over the same input writes
/// nothing.
pub fn run_pipeline(config: &PipelineConfig, resources: &Resources, fetcher: &(dyn Fetcher + Sync)) -> Result<RunSummary, PipelineError> {
    config.validate().map_err(|e: ConfigError| PipelineError::data(Stage::Ingest, e))?;
    let tz = config.timezone().map_err(|e| PipelineError::data(Stage::Ingest, e))?;
    let store_dir = config.require("paths.store", &config.paths.store).map_err(|e| PipelineError::data(Stage::Index, e))?;
    let tweets = config.require("paths.tweets", &config.paths.tweets).map_err(|e| PipelineError::data(Stage::Ingest, e))?;
    let mut summary = RunSummary::default();
    let workers = config.ingest.workers;

    let t = Timer::start();
    let mut stream = read_file(tweets, parse_tweet_stream).map_err(|e| PipelineError::from_format(Stage::Ingest, e))?;
    let c = &mut summary.counts;
    c.lines = stream.lines;
    c.records = stream.records.len();
    c.invalid_lines = stream.warnings.len();
    summary.warnings.extend(stream.warnings.iter().map(|w| format!("ingest: {w}")));
    if !resources.roster.is_empty() {
        c.unknown_media = flag_unknown_media(&mut stream.records, &resources.roster);
    }
    let deduped = dedupe_stream(&stream.records, tz, &config.ingest.country_hint);
    c.emissions = deduped.emissions;
    c.unique_docs = deduped.docs.len();
    c.duplicates = deduped.duplicates;
    summary.stages.push(t.stage(Stage::Ingest, stream.lines, deduped.docs.len()));

    let t = Timer::start();
    let extract = ExtractConfig { min_density: config.ingest.min_density };
    let n = deduped.docs.len();
    let docs: Vec<NewsDoc> = par_map(deduped.docs, workers, |d| resolve_and_scrape(d, fetcher, &extract));
    for d in &docs {
        *summary.counts.fetch_status.entry(d.fetch_status.as_str().to_string()).or_default() += 1;
    }
    let fetched = summary.counts.fetch_status.get("ok").copied().unwrap_or(0);
    summary.stages.push(t.stage(Stage::Scrape, n, fetched));

    let t = Timer::start();
    let analyzed: Vec<(NewsDoc, Vec<Token>, Vec<String>)> = par_map(docs, workers, |mut d| {
        let (text, input) = d.classification_text();
        let tokens = resources.analyzer.analyze(&text);
        let bag = word_lemmas(&tokens);
        let mut distinct = bag.clone();
        distinct.sort();
        distinct.dedup();
        d.lemmas = distinct;
        d.classified_from = Some(input);
        (d, tokens, bag)
    });
    let bags: Vec<Vec<&str>> = analyzed.iter().map(|(_, _, b)| b.iter().map(String::as_str).collect()).collect();
    let df = TfIdfModel::fit(&bags);
    let kw = KeywordConfig { k: config.nlp.keywords_k, commonness_cutoff: config.nlp.commonness_cutoff };
    let mut analyzed = analyzed;
    for (d, _, bag) in &mut analyzed {
        d.keywords = extract_keywords(bag, &df, &resources.frequency, &kw);
    }
    summary.counts.with_lemmas = analyzed.iter().filter(|(d, _, _)| !d.lemmas.is_empty()).count();
    summary.stages.push(t.stage(Stage::Nlp, n, summary.counts.with_lemmas));

    let t = Timer::start();
    for (d, _, bag) in &mut analyzed {
        let c = resources.classifier.classify(&resources.classifier.featurize(&d.doc_id, bag));
        if c.low_confidence {
            summary.counts.low_confidence += 1;
            summary.warnings.push(format!("classify: {} has no known lemmas; label from biases only", d.doc_id));
        }
        d.topic = Some(c.label);
        *summary.counts.topics.entry(c.label.as_str().to_string()).or_default() += 1;
    }
    summary.counts.classified = analyzed.len();
    summary.stages.push(t.stage(Stage::Classify, n, summary.counts.classified));

    let t = Timer::start();
    let reject = RejectTags::default();
    let mut docs = Vec::with_capacity(n);
    for (mut d, tokens, _) in analyzed {
        let candidates = match_toponyms(&tokens, &resources.gazetteer, config.geo.max_ngram, &reject);
        d.geo_mentions = disambiguate(&candidates, &d.country_hint);
        summary.counts.geo_mentions += d.geo_mentions.len();
        summary.counts.docs_with_geo += usize::from(!d.geo_mentions.is_empty());
        docs.push(d);
    }
    summary.stages.push(t.stage(Stage::Geotag, n, summary.counts.docs_with_geo));

    let t = Timer::start();
    let mut store = Store::open_writer(store_dir, tz).map_err(PipelineError::from_store)?;
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    for d in docs {
        match store.index_doc(d).map_err(PipelineError::from_store)? {
            IndexOutcome::Inserted => summary.counts.inserted += 1,
            IndexOutcome::Unchanged => summary.counts.unchanged += 1,
            IndexOutcome::Overwritten { .. } => summary.counts.overwritten += 1,
        }
    }
    store.commit().map_err(PipelineError::from_store)?;
    let c = &summary.counts;
    summary.stages.push(t.stage(Stage::Index, n, c.inserted + c.overwritten));
    Ok(summary)
}
