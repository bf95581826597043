//! Topic classification: one-vs-rest linear SVM over TF-IDF lemma vectors,
//! plus stratified k-fold evaluation with per-class precision and recall.

mod eval;
mod svm;
mod topic;

pub use eval::{
    cross_validate, cross_validate_with, precision_recall, stratified_folds, ClassMetrics,
    ConfusionMatrix, EvalError, EvalReport, FoldAssignment,
};
pub use svm::{
    train_svm, train_text_classifier, Classification, ClassifierModel, SvmError, SvmParams,
    TrainingMetadata,
};
pub use topic::{ParseTopicError, TopicLabel};
