//! Model loading and training from the configured corpora.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use mediascope_core::classify::{
    cross_validate_with, train_text_classifier, ClassifierModel, EvalError, EvalReport, SvmError, SvmParams, TopicLabel,
};
use mediascope_core::nlp::{HmmModel, Lemmatizer};

use crate::analyzer::Analyzer;
use crate::config::{ConfigError, PipelineConfig};
use crate::formats::{load_model, read_file, read_labeled_corpus, read_lemmatizer, read_tagged_corpus, save_model, FormatError, LabeledDoc, ModelKind};

#[derive(Debug, thiserror::Error)]
pub enum TrainingError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("tagger: {0}")]
    Tagger(#[from] mediascope_core::nlp::HmmError),
    #[error("classifier: {0}")]
    Svm(#[from] SvmError),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
}

pub fn train_tagger_file(corpus: &Path, alpha: f64) -> Result<HmmModel, TrainingError> {
    let sentences = read_file(corpus, read_tagged_corpus)?;
    Ok(HmmModel::train(&sentences, alpha)?)
}

pub fn load_tagger(path: &Path) -> Result<HmmModel, TrainingError> {
    Ok(read_file(path, |r| load_model(ModelKind::Tagger, r))?)
}

pub fn load_classifier(path: &Path) -> Result<ClassifierModel, TrainingError> {
    Ok(read_file(path, |r| load_model(ModelKind::Classifier, r))?)
}

pub fn save_model_file<T: serde::Serialize>(kind: ModelKind, model: &T, path: &Path) -> Result<(), FormatError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    save_model(kind, model, BufWriter::new(File::create(path)?))
}

/// Lemmatizer from the configured rule table and (optional) exception list.
pub fn lemmatizer_from(config: &PipelineConfig) -> Result<Lemmatizer, TrainingError> {
    let rules = config.require("paths.lemma_rules", &config.paths.lemma_rules)?;
    let rules = read_file(rules, |r| Ok(std::io::read_to_string(r)?))?;
    let exceptions = match &config.paths.lemma_exceptions {
        Some(p) => read_file(p, |r| Ok(std::io::read_to_string(r)?))?,
        None => String::new(),
    };
    Ok(read_lemmatizer(rules.as_bytes(), exceptions.as_bytes())?)
}

/// The configured pretrained tagger, else one trained on the tagged corpus.
pub fn tagger_from(config: &PipelineConfig) -> Result<HmmModel, TrainingError> {
    match &config.paths.tagger_model {
        Some(p) => load_tagger(p),
        None => train_tagger_file(config.require("paths.tagged_corpus", &config.paths.tagged_corpus)?, config.nlp.hmm_alpha),
    }
}

pub fn analyzer_from(config: &PipelineConfig) -> Result<Analyzer, TrainingError> {
    Ok(Analyzer::new(tagger_from(config)?, lemmatizer_from(config)?))
}

pub fn labeled_lemmas(docs: &[LabeledDoc], analyzer: &Analyzer) -> Vec<(Vec<String>, TopicLabel)> {
    docs.iter().map(|d| (analyzer.lemmas(&d.text), d.label)).collect()
}

/// The configured pretrained classifier, else one trained on the labeled
/// corpus.
pub fn classifier_from(config: &PipelineConfig, analyzer: &Analyzer) -> Result<ClassifierModel, TrainingError> {
    if let Some(p) = &config.paths.classifier_model {
        return load_classifier(p);
    }
    let corpus = config.require("paths.labeled_corpus", &config.paths.labeled_corpus)?;
    let docs = read_file(corpus, read_labeled_corpus)?;
    let (model, skipped) = train_text_classifier(&labeled_lemmas(&docs, analyzer), &config.classifier.svm_params())?;
    for i in skipped {
        log::warn!("labeled doc {} has no usable lemmas; skipped", docs[i].id);
    }
    Ok(model)
}

/// k-fold evaluation on lemmatized text. Each fold fits its own TF-IDF
/// vocabulary on the training part only.
pub fn evaluate_lemmatized(
    corpus: &[(Vec<String>, TopicLabel)],
    folds: usize,
    seed: u64,
    params: &SvmParams,
) -> Result<EvalReport, TrainingError> {
    let labels: Vec<TopicLabel> = corpus.iter().map(|(_, l)| *l).collect();
    let report = cross_validate_with(&labels, folds, seed, |train, test| {
        let subset: Vec<(Vec<String>, TopicLabel)> = train.iter().map(|&i| corpus[i].clone()).collect();
        let (model, _) = train_text_classifier(&subset, params)?;
        Ok(test.iter().map(|&i| model.classify(&model.featurize(&i.to_string(), &corpus[i].0)).label).collect())
    })?;
    Ok(report)
}
