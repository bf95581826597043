use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Sparse TF-IDF vector. Entries are sorted by lemma id and never zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentVector {
    pub doc_id: String,
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl DocumentVector {
    /// Drops zero weights, sums duplicate ids and caches the Euclidean norm.
    pub fn new(
        doc_id: impl Into<String>,
        entries: impl IntoIterator<Item = (u32, f64)>,
    ) -> DocumentVector {
        let mut merged: BTreeMap<u32, f64> = BTreeMap::new();
        for (id, w) in entries {
            *merged.entry(id).or_default() += w;
        }
        let entries: Vec<(u32, f64)> = merged.into_iter().filter(|(_, w)| *w != 0.0).collect();
        let norm = libm::sqrt(entries.iter().map(|(_, w)| w * w).sum());
        DocumentVector {
            doc_id: doc_id.into(),
            entries,
            norm,
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&id, |(i, _)| *i)
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// Dot product with a dense weight vector; ids past its end count as zero.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter_map(|(i, w)| dense.get(*i as usize).map(|d| d * w))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> DocumentVector {
        DocumentVector::new(
            self.doc_id.clone(),
            self.entries.iter().map(|(i, w)| (*i, w * factor)),
        )
    }

    /// Unit-length copy; empty vectors stay empty.
    pub fn normalized(&self) -> DocumentVector {
        if self.norm == 0.0 {
            return self.clone();
        }
        self.scaled(1.0 / self.norm)
    }
}

/// Vocabulary and document frequencies of a lemmatized corpus.
///
/// Weights are raw term count times `ln(N / df)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    /// Sorted lemmas; a lemma's id is its position.
    vocabulary: Vec<String>,
    df: Vec<u32>,
    n_docs: usize,
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(corpus: &[Vec<S>]) -> TfIdfModel {
        let mut df: BTreeMap<&str, u32> = BTreeMap::new();
        for doc in corpus {
            let distinct: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
            for lemma in distinct {
                *df.entry(lemma).or_default() += 1;
            }
        }
        let (vocabulary, df): (Vec<String>, Vec<u32>) =
            df.into_iter().map(|(l, c)| (l.to_string(), c)).unzip();
        TfIdfModel {
            vocabulary,
            df,
            n_docs: corpus.len(),
        }
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocabulary.is_empty()
    }

    pub fn id_of(&self, lemma: &str) -> Option<u32> {
        self.vocabulary
            .binary_search_by(|v| v.as_str().cmp(lemma))
            .ok()
            .map(|i| i as u32)
    }

    pub fn lemma(&self, id: u32) -> Option<&str> {
        self.vocabulary.get(id as usize).map(String::as_str)
    }

    pub fn df(&self, lemma: &str) -> Option<u32> {
        self.id_of(lemma).map(|i| self.df[i as usize])
    }

    /// `ln(N / df)` for a known id.
    pub fn idf(&self, id: u32) -> f64 {
        libm::log(self.n_docs as f64 / f64::from(self.df[id as usize]))
    }

    /// Raw term counts of a lemma list.
    pub fn term_counts<S: AsRef<str>>(lemmas: &[S]) -> BTreeMap<&str, u32> {
        let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
        for l in lemmas {
            *tf.entry(l.as_ref()).or_default() += 1;
        }
        tf
    }

    /// Vector of a document against this model; lemmas outside the
    /// vocabulary are ignored.
    pub fn transform<S: AsRef<str>>(
        &self,
        doc_id: impl Into<String>,
        lemmas: &[S],
    ) -> DocumentVector {
        let entries = Self::term_counts(lemmas)
            .into_iter()
            .filter_map(|(lemma, tf)| {
                self.id_of(lemma)
                    .map(|id| (id, f64::from(tf) * self.idf(id)))
            });
        DocumentVector::new(doc_id, entries)
    }
}

/// TF-IDF vectors of every document in `corpus`, fitted on the corpus
/// itself. Document ids are positions.
pub fn compute_tfidf<S: AsRef<str>>(corpus: &[Vec<S>]) -> (TfIdfModel, Vec<DocumentVector>) {
    let model = TfIdfModel::fit(corpus);
    let vectors = corpus
        .iter()
        .enumerate()
        .map(|(i, doc)| model.transform(alloc::format!("{i}"), doc))
        .collect();
    (model, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ubiquitous_term_dropped() {
        let corpus = vec![vec!["chile", "gol"], vec!["chile", "sismo"]];
        let (m, vs) = compute_tfidf(&corpus);
        let chile = m.id_of("chile").unwrap();
        assert!(vs.iter().all(|v| v.get(chile).is_none()));
    }

    #[test]
    fn two_doc_ln2() {
        let corpus = vec![vec!["gol"], vec!["sismo"]];
        let (m, vs) = compute_tfidf(&corpus);
        let w = vs[0].get(m.id_of("gol").unwrap()).unwrap();
        assert!((w - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn norm_cached() {
        let v = DocumentVector::new("d", vec![(3, 3.0), (1, 4.0), (2, 0.0)]);
        assert_eq!(v.entries(), &[(1, 4.0), (3, 3.0)]);
        assert!((v.norm() - 5.0).abs() < 1e-12);
        assert!((v.normalized().norm() - 1.0).abs() < 1e-12);
    }
}
