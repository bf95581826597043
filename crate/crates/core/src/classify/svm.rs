use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TopicLabel;
use crate::nlp::{DocumentVector, TfIdfModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Hinge-loss weight against the L2 penalty.
    pub c: f64,
    pub epochs: usize,
    /// Stop once an epoch changes the objective by less than this fraction.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            epochs: 200,
            tolerance: 1e-6,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvmError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training corpus has a single label ({0}); at least two are needed")]
    SingleClass(TopicLabel),
    #[error("document {0} has an empty feature vector")]
    EmptyVector(String),
    #[error("C must be positive and finite, got {0}")]
    BadC(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub corpus_size: usize,
    /// Free-form training date, filled in by the caller.
    pub trained_at: Option<String>,
    /// Best primal objective after each epoch, per label (non-increasing).
    pub objective_trace: Vec<Vec<f64>>,
}

/// One-vs-rest linear SVM. `weights[k]` and `biases[k]` score `labels[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    /// Lemma vocabulary and document frequencies used to build inputs.
    pub vocabulary: TfIdfModel,
    pub labels: Vec<TopicLabel>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub params: SvmParams,
    pub metadata: TrainingMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: TopicLabel,
    /// `w·x + b` for each trained label, in label order.
    pub margins: Vec<(TopicLabel, f64)>,
    /// Set when the input vector was empty and only biases decided.
    pub low_confidence: bool,
}

/// Pegasos-style primal subgradient solver for
/// `½(‖w‖² + b²) + C Σ max(0, 1 − yᵢ(w·xᵢ + b))`.
///
/// The bias is folded in as a constant feature, so it is regularized too.
/// `w` is stored as `scale · v` to keep the shrink step O(1).
struct BinaryTrainer<'a> {
    xs: &'a [&'a DocumentVector],
    dim: usize,
    lambda: f64,
    c: f64,
}

struct Iterate {
    v: Vec<f64>,
    vb: f64,
    scale: f64,
}

impl Iterate {
    fn new(dim: usize) -> Self {
        Iterate {
            v: vec![0.0; dim],
            vb: 0.0,
            scale: 1.0,
        }
    }

    fn margin(&self, x: &DocumentVector) -> f64 {
        self.scale * (x.dot(&self.v) + self.vb)
    }

    fn dense(&self) -> (Vec<f64>, f64) {
        (
            self.v.iter().map(|v| v * self.scale).collect(),
            self.vb * self.scale,
        )
    }

    fn renormalize(&mut self) {
        for v in &mut self.v {
            *v *= self.scale;
        }
        self.vb *= self.scale;
        self.scale = 1.0;
    }
}

impl BinaryTrainer<'_> {
    fn objective(&self, w: &[f64], b: f64, ys: &[f64]) -> f64 {
        let reg = 0.5 * (w.iter().map(|x| x * x).sum::<f64>() + b * b);
        let hinge: f64 = self
            .xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (1.0 - y * (x.dot(w) + b)).max(0.0))
            .sum();
        reg + self.c * hinge
    }

    fn train(
        &self,
        ys: &[f64],
        orders: &[Vec<usize>],
        tolerance: f64,
    ) -> (Vec<f64>, f64, Vec<f64>) {
        let mut it = Iterate::new(self.dim);
        let mut t = 0usize;
        let mut best = (vec![0.0; self.dim], 0.0);
        let mut best_obj = self.objective(&best.0, best.1, ys);
        let mut trace = Vec::with_capacity(orders.len());
        let mut prev_obj = best_obj;
        for order in orders {
            for &i in order {
                t += 1;
                let eta = 1.0 / (self.lambda * t as f64);
                let x = self.xs[i];
                let y = ys[i];
                let margin = it.margin(x);
                let shrink = 1.0 - 1.0 / t as f64;
                if shrink == 0.0 {
                    it = Iterate::new(self.dim);
                } else {
                    it.scale *= shrink;
                    if it.scale < 1e-9 {
                        it.renormalize();
                    }
                }
                if y * margin < 1.0 {
                    let step = eta * y / it.scale;
                    for (id, w) in x.entries() {
                        it.v[*id as usize] += step * w;
                    }
                    it.vb += step;
                }
            }
            let (w, b) = it.dense();
            let obj = self.objective(&w, b, ys);
            if obj < best_obj {
                best_obj = obj;
                best = (w, b);
            }
            trace.push(best_obj);
            let converged =
                (prev_obj - obj).abs() <= tolerance * prev_obj.abs().max(f64::MIN_POSITIVE);
            prev_obj = obj;
            if converged {
                break;
            }
        }
        (best.0, best.1, trace)
    }
}

/// Trains one binary machine per label present in `labeled`.
///
/// Every machine walks the examples in the same seeded order each epoch,
/// so flipping all labels flips every weight exactly. The returned machine
/// is the best iterate seen at an epoch boundary. Feature dimension is the
/// larger of the vocabulary size and the highest id used plus one.
pub fn train_svm(
    labeled: &[(DocumentVector, TopicLabel)],
    vocabulary: TfIdfModel,
    params: &SvmParams,
) -> Result<ClassifierModel, SvmError> {
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(SvmError::BadC(params.c));
    }
    if labeled.is_empty() {
        return Err(SvmError::EmptyCorpus);
    }
    if let Some((v, _)) = labeled.iter().find(|(v, _)| v.is_empty()) {
        return Err(SvmError::EmptyVector(v.doc_id.clone()));
    }
    let labels: Vec<TopicLabel> = labeled
        .iter()
        .map(|(_, l)| *l)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() < 2 {
        return Err(SvmError::SingleClass(labels[0]));
    }
    let max_id = labeled
        .iter()
        .flat_map(|(v, _)| v.entries().last().map(|(i, _)| *i as usize + 1))
        .max()
        .unwrap_or(0);
    let dim = vocabulary.len().max(max_id);
    let n = labeled.len();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let orders: Vec<Vec<usize>> = (0..params.epochs.max(1))
        .map(|_| {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();

    let xs: Vec<&DocumentVector> = labeled.iter().map(|(v, _)| v).collect();
    let trainer = BinaryTrainer {
        xs: &xs,
        dim,
        lambda: 1.0 / (params.c * n as f64),
        c: params.c,
    };
    let mut weights = Vec::with_capacity(labels.len());
    let mut biases = Vec::with_capacity(labels.len());
    let mut traces = Vec::with_capacity(labels.len());
    for label in &labels {
        let ys: Vec<f64> = labeled
            .iter()
            .map(|(_, l)| if l == label { 1.0 } else { -1.0 })
            .collect();
        let (w, b, trace) = trainer.train(&ys, &orders, params.tolerance);
        weights.push(w);
        biases.push(b);
        traces.push(trace);
    }
    Ok(ClassifierModel {
        vocabulary,
        labels,
        weights,
        biases,
        params: *params,
        metadata: TrainingMetadata {
            corpus_size: n,
            trained_at: None,
            objective_trace: traces,
        },
    })
}

/// Fits TF-IDF on lemmatized documents, L2-normalizes the vectors and trains
/// the SVM. Documents whose vector comes out empty are skipped; their
/// positions are returned.
pub fn train_text_classifier<S: AsRef<str>>(
    docs: &[(Vec<S>, TopicLabel)],
    params: &SvmParams,
) -> Result<(ClassifierModel, Vec<usize>), SvmError> {
    let lemmas: Vec<Vec<&str>> = docs
        .iter()
        .map(|(l, _)| l.iter().map(AsRef::as_ref).collect())
        .collect();
    let vocabulary = TfIdfModel::fit(&lemmas);
    let mut skipped = Vec::new();
    let mut labeled = Vec::with_capacity(docs.len());
    for (i, ((_, label), doc)) in docs.iter().zip(&lemmas).enumerate() {
        let v = vocabulary
            .transform(alloc::format!("{i}"), doc)
            .normalized();
        if v.is_empty() {
            skipped.push(i);
        } else {
            labeled.push((v, *label));
        }
    }
    let model = train_svm(&labeled, vocabulary, params)?;
    Ok((model, skipped))
}

impl ClassifierModel {
    /// Unit-length TF-IDF vector of a lemmatized text against the training
    /// vocabulary.
    pub fn featurize<S: AsRef<str>>(&self, doc_id: &str, lemmas: &[S]) -> DocumentVector {
        self.vocabulary.transform(doc_id, lemmas).normalized()
    }

    pub fn margins(&self, vector: &DocumentVector) -> Vec<(TopicLabel, f64)> {
        self.labels
            .iter()
            .zip(self.weights.iter().zip(&self.biases))
            .map(|(l, (w, b))| (*l, vector.dot(w) + b))
            .collect()
    }

    /// Highest-margin label; ties go to the earlier label. Ids outside the
    /// trained dimension are ignored.
    pub fn classify(&self, vector: &DocumentVector) -> Classification {
        let margins = self.margins(vector);
        let mut best = 0;
        for (i, (_, m)) in margins.iter().enumerate() {
            if *m > margins[best].1 {
                best = i;
            }
        }
        Classification {
            label: margins[best].0,
            margins,
            low_confidence: vector.is_empty(),
        }
    }
}
