use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::svm::{train_svm, SvmError, SvmParams};
use super::TopicLabel;
use crate::nlp::{DocumentVector, TfIdfModel};

/// Counts indexed `[actual][predicted]` by label ordinal.
pub type ConfusionMatrix = [[u64; TopicLabel::COUNT]; TopicLabel::COUNT];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: TopicLabel,
    /// Correct predictions of the class over all predictions of it; absent
    /// when the class was never predicted.
    pub precision: Option<f64>,
    /// Correct predictions of the class over its true members; absent when
    /// the class has no members.
    pub recall: Option<f64>,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub folds: usize,
    /// Mean over the classes where the value is defined.
    pub macro_precision: Option<f64>,
    pub macro_recall: Option<f64>,
    /// How fold results were combined; always `"pooled"` (one confusion
    /// matrix summed over folds).
    pub aggregation: String,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn from_confusion(
        confusion: ConfusionMatrix,
        folds: usize,
        warnings: Vec<String>,
    ) -> EvalReport {
        let per_class = precision_recall(&confusion);
        let mean = |xs: Vec<f64>| {
            if xs.is_empty() {
                None
            } else {
                Some(xs.iter().sum::<f64>() / xs.len() as f64)
            }
        };
        let macro_precision = mean(per_class.iter().filter_map(|m| m.precision).collect());
        let macro_recall = mean(per_class.iter().filter_map(|m| m.recall).collect());
        EvalReport {
            per_class,
            confusion,
            folds,
            macro_precision,
            macro_recall,
            aggregation: String::from("pooled"),
            warnings,
        }
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn metrics(&self, label: TopicLabel) -> &ClassMetrics {
        &self.per_class[label.ordinal()]
    }
}

/// Per-class precision `M[c][c] / Σ_r M[r][c]` and recall
/// `M[c][c] / Σ_k M[c][k]`, absent on a zero denominator.
pub fn precision_recall(confusion: &ConfusionMatrix) -> Vec<ClassMetrics> {
    TopicLabel::ALL
        .iter()
        .map(|&label| {
            let c = label.ordinal();
            let tp = confusion[c][c];
            let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
            let support: u64 = confusion[c].iter().sum();
            let ratio = |den: u64| {
                if den == 0 {
                    None
                } else {
                    Some(tp as f64 / den as f64)
                }
            };
            ClassMetrics {
                label,
                precision: ratio(predicted),
                recall: ratio(support),
                support,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("corpus of {size} documents is smaller than {folds} folds")]
    CorpusTooSmall { size: usize, folds: usize },
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: SvmError },
    #[error("fold {fold}: predictor returned {got} labels for {expected} documents")]
    PredictionCount {
        fold: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    /// Fold of each document.
    pub fold_of: Vec<usize>,
    pub warnings: Vec<String>,
}

impl FoldAssignment {
    pub fn held_out(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn training(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

/// Stratified fold assignment. Each class is shuffled with a seeded RNG and
/// dealt round-robin, the deal continuing where the previous class stopped
/// so fold sizes stay within one of each other.
pub fn stratified_folds(labels: &[TopicLabel], folds: usize, seed: u64) -> FoldAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut warnings = Vec::new();
    let mut next = 0;
    for label in TopicLabel::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < folds {
            warnings.push(format!(
                "class {label} has {} documents for {folds} folds; some folds hold none",
                members.len()
            ));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    FoldAssignment { fold_of, warnings }
}

/// k-fold evaluation with a caller-supplied learner. `fit_predict` receives
/// training and held-out indices and returns one label per held-out index.
pub fn cross_validate_with<F>(
    labels: &[TopicLabel],
    folds: usize,
    seed: u64,
    mut fit_predict: F,
) -> Result<EvalReport, EvalError>
where
    F: FnMut(&[usize], &[usize]) -> Result<Vec<TopicLabel>, SvmError>,
{
    if folds < 2 {
        return Err(EvalError::TooFewFolds(folds));
    }
    if labels.len() < folds {
        return Err(EvalError::CorpusTooSmall {
            size: labels.len(),
            folds,
        });
    }
    let assignment = stratified_folds(labels, folds, seed);
    let mut confusion = [[0u64; TopicLabel::COUNT]; TopicLabel::COUNT];
    for fold in 0..folds {
        let test = assignment.held_out(fold);
        if test.is_empty() {
            continue;
        }
        let train = assignment.training(fold);
        let predicted =
            fit_predict(&train, &test).map_err(|source| EvalError::Fold { fold, source })?;
        if predicted.len() != test.len() {
            return Err(EvalError::PredictionCount {
                fold,
                got: predicted.len(),
                expected: test.len(),
            });
        }
        for (&i, p) in test.iter().zip(&predicted) {
            confusion[labels[i].ordinal()][p.ordinal()] += 1;
        }
    }
    Ok(EvalReport::from_confusion(
        confusion,
        folds,
        assignment.warnings,
    ))
}

/// k-fold evaluation of the linear SVM on precomputed vectors.
pub fn cross_validate(
    corpus: &[(DocumentVector, TopicLabel)],
    folds: usize,
    seed: u64,
    params: &SvmParams,
) -> Result<EvalReport, EvalError> {
    let labels: Vec<TopicLabel> = corpus.iter().map(|(_, l)| *l).collect();
    cross_validate_with(&labels, folds, seed, |train, test| {
        let subset: Vec<(DocumentVector, TopicLabel)> =
            train.iter().map(|&i| corpus[i].clone()).collect();
        let model = train_svm(&subset, TfIdfModel::default(), params)?;
        Ok(test
            .iter()
            .map(|&i| model.classify(&corpus[i].0).label)
            .collect())
    })
}
