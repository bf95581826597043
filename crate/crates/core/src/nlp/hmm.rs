use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::token::{tokenize, Token, TokenKind};
use crate::text::case_fold;

/// Longest suffix, in characters, consulted by the unknown-word model.
pub const MAX_SUFFIX: usize = 4;

/// One training sentence as (word, tag) pairs.
pub type TaggedSentence = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HmmError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("sentence {0} is empty")]
    EmptySentence(usize),
    #[error("smoothing constant must be positive and finite, got {0}")]
    BadSmoothing(f64),
    #[error("tagset is empty")]
    EmptyTagset,
    #[error("{what} has wrong dimensions")]
    Shape { what: &'static str },
    #[error("{what} sums to {sum}, expected 1")]
    NotStochastic { what: String, sum: f64 },
}

/// Fixed tag for tokens that bypass the model, `None` for words.
pub fn reserved_tag(kind: TokenKind) -> Option<&'static str> {
    match kind {
        TokenKind::Word => None,
        TokenKind::Number => Some("CARD"),
        TokenKind::Punctuation => Some("PUNCT"),
        TokenKind::Url => Some("URL"),
        TokenKind::Mention => Some("MENTION"),
        TokenKind::Hashtag => Some("HASHTAG"),
    }
}

/// Tag distribution for words never seen in training, estimated from hapax
/// words and keyed by capitalization plus a suffix of up to [`MAX_SUFFIX`]
/// characters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UnknownWordModel {
    /// `"C:" | "l:"` + lowercased suffix -> log P(tag | key).
    pub suffixes: BTreeMap<String, Vec<f64>>,
}

impl UnknownWordModel {
    fn key(capitalized: bool, suffix: &str) -> String {
        let mut k = String::from(if capitalized { "C:" } else { "l:" });
        k.push_str(suffix);
        k
    }

    fn lookup(&self, word: &str) -> Option<&[f64]> {
        let capitalized = word.chars().next().is_some_and(char::is_uppercase);
        let folded = case_fold(word);
        let chars: Vec<(usize, char)> = folded.char_indices().collect();
        for len in (0..=MAX_SUFFIX.min(chars.len())).rev() {
            let start = if len == 0 {
                folded.len()
            } else {
                chars[chars.len() - len].0
            };
            if let Some(dist) = self.suffixes.get(&Self::key(capitalized, &folded[start..])) {
                return Some(dist);
            }
        }
        None
    }
}

/// First-order HMM over a corpus-defined tagset. All probabilities are kept
/// as natural logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmModel {
    tagset: Vec<String>,
    alpha: f64,
    initial: Vec<f64>,
    /// `transition[from][to]`
    transition: Vec<Vec<f64>>,
    /// Case-folded word -> log P(word | tag) for every tag.
    emission: BTreeMap<String, Vec<f64>>,
    /// log of the emission mass each tag reserves for unseen words.
    unknown_mass: Vec<f64>,
    unknown: UnknownWordModel,
}

fn log(x: f64) -> f64 {
    libm::log(x)
}

fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// True when a corpus entry is something the tokenizer calls a single word.
fn is_word_entry(word: &str) -> bool {
    let toks = tokenize(word);
    toks.len() == 1 && toks[0].kind == TokenKind::Word
}

impl HmmModel {
    /// Maximum-likelihood estimate with additive smoothing `alpha`.
    ///
    /// Entries that are not plain words (punctuation, numbers, links) are
    /// dropped, since tagging assigns them reserved tags. The tagset is the
    /// sorted set of tags seen on words, so the model does not depend on
    /// sentence order.
    pub fn train(corpus: &[TaggedSentence], alpha: f64) -> Result<HmmModel, HmmError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HmmError::BadSmoothing(alpha));
        }
        if corpus.is_empty() {
            return Err(HmmError::EmptyCorpus);
        }
        if let Some(i) = corpus.iter().position(Vec::is_empty) {
            return Err(HmmError::EmptySentence(i));
        }
        let sentences: Vec<Vec<(&str, &str)>> = corpus
            .iter()
            .map(|s| {
                s.iter()
                    .filter(|(w, _)| is_word_entry(w))
                    .map(|(w, t)| (w.as_str(), t.as_str()))
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        let tagset: Vec<String> = sentences
            .iter()
            .flatten()
            .map(|(_, t)| String::from(*t))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if tagset.is_empty() {
            return Err(HmmError::EmptyTagset);
        }
        let n = tagset.len();
        let idx = |t: &str| tagset.binary_search_by(|x| x.as_str().cmp(t)).unwrap_or(0);

        let mut init_counts = vec![0.0; n];
        let mut trans_counts = vec![vec![0.0; n]; n];
        let mut tag_counts = vec![0.0; n];
        let mut word_tag: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        let mut word_total: BTreeMap<String, usize> = BTreeMap::new();
        for s in &sentences {
            init_counts[idx(s[0].1)] += 1.0;
            for pair in s.windows(2) {
                trans_counts[idx(pair[0].1)][idx(pair[1].1)] += 1.0;
            }
            for (w, t) in s {
                let key = case_fold(w);
                tag_counts[idx(t)] += 1.0;
                word_tag.entry(key.clone()).or_insert_with(|| vec![0.0; n])[idx(t)] += 1.0;
                *word_total.entry(key).or_default() += 1;
            }
        }

        let sentence_count = sentences.len() as f64;
        let nf = n as f64;
        let initial = init_counts
            .iter()
            .map(|c| log((c + alpha) / (sentence_count + alpha * nf)))
            .collect();
        let transition = trans_counts
            .iter()
            .map(|row| {
                let out: f64 = row.iter().sum();
                row.iter()
                    .map(|c| log((c + alpha) / (out + alpha * nf)))
                    .collect()
            })
            .collect();

        let vocab = word_tag.len() as f64;
        let denom: Vec<f64> = tag_counts
            .iter()
            .map(|c| c + alpha * (vocab + 1.0))
            .collect();
        let emission = word_tag
            .into_iter()
            .map(|(w, counts)| {
                let row = counts
                    .iter()
                    .zip(&denom)
                    .map(|(c, d)| log((c + alpha) / d))
                    .collect();
                (w, row)
            })
            .collect();
        let unknown_mass = denom.iter().map(|d| log(alpha / d)).collect();

        // Hapax words stand in for the unknown-word population.
        let mut suffix_counts: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for s in &sentences {
            for (w, t) in s {
                if word_total.get(&case_fold(w)) != Some(&1) {
                    continue;
                }
                let capitalized = w.chars().next().is_some_and(char::is_uppercase);
                let folded = case_fold(w);
                let chars: Vec<usize> = folded.char_indices().map(|(i, _)| i).collect();
                for len in 0..=MAX_SUFFIX.min(chars.len()) {
                    let start = if len == 0 {
                        folded.len()
                    } else {
                        chars[chars.len() - len]
                    };
                    let key = UnknownWordModel::key(capitalized, &folded[start..]);
                    suffix_counts.entry(key).or_insert_with(|| vec![0.0; n])[idx(t)] += 1.0;
                }
            }
        }
        let suffixes = suffix_counts
            .into_iter()
            .map(|(k, counts)| {
                let total: f64 = counts.iter().sum();
                (
                    k,
                    counts
                        .iter()
                        .map(|c| log((c + alpha) / (total + alpha * nf)))
                        .collect(),
                )
            })
            .collect();

        Ok(HmmModel {
            tagset,
            alpha,
            initial,
            transition,
            emission,
            unknown_mass,
            unknown: UnknownWordModel { suffixes },
        })
    }

    /// Builds a model from probabilities (not logs). `emission` maps each
    /// word to P(word | tag) per tag; `unknown_mass[t]` is what tag `t`
    /// leaves for unseen words. Every distribution must sum to 1 within 1e-9.
    pub fn from_probabilities(
        tagset: Vec<String>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        emission: BTreeMap<String, Vec<f64>>,
        unknown_mass: Vec<f64>,
    ) -> Result<HmmModel, HmmError> {
        let logs = |v: &[f64]| v.iter().map(|p| log(*p)).collect::<Vec<f64>>();
        let model = HmmModel {
            alpha: 0.0,
            initial: logs(&initial),
            transition: transition.iter().map(|r| logs(r)).collect(),
            emission: emission
                .iter()
                .map(|(w, r)| (case_fold(w), logs(r)))
                .collect(),
            unknown_mass: logs(&unknown_mass),
            unknown: UnknownWordModel::default(),
            tagset,
        };
        model.validate(1e-9)?;
        Ok(model)
    }

    /// Checks dimensions and that each distribution sums to 1 within `tol`.
    pub fn validate(&self, tol: f64) -> Result<(), HmmError> {
        let n = self.tagset.len();
        if n == 0 {
            return Err(HmmError::EmptyTagset);
        }
        if self.initial.len() != n || self.unknown_mass.len() != n {
            return Err(HmmError::Shape {
                what: "initial/unknown mass",
            });
        }
        if self.transition.len() != n || self.transition.iter().any(|r| r.len() != n) {
            return Err(HmmError::Shape {
                what: "transition matrix",
            });
        }
        if self.emission.values().any(|r| r.len() != n)
            || self.unknown.suffixes.values().any(|r| r.len() != n)
        {
            return Err(HmmError::Shape {
                what: "emission table",
            });
        }
        let check = |what: String, sum: f64| {
            if (sum - 1.0).abs() > tol {
                Err(HmmError::NotStochastic { what, sum })
            } else {
                Ok(())
            }
        };
        check(
            String::from("initial"),
            self.initial.iter().map(|l| exp(*l)).sum(),
        )?;
        for (i, row) in self.transition.iter().enumerate() {
            check(
                alloc::format!("transition row {}", self.tagset[i]),
                row.iter().map(|l| exp(*l)).sum(),
            )?;
        }
        for t in 0..n {
            let sum: f64 =
                self.emission.values().map(|r| exp(r[t])).sum::<f64>() + exp(self.unknown_mass[t]);
            check(alloc::format!("emission row {}", self.tagset[t]), sum)?;
        }
        Ok(())
    }

    pub fn tagset(&self) -> &[String] {
        &self.tagset
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tag_index(&self, tag: &str) -> Option<usize> {
        self.tagset.iter().position(|t| t == tag)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.emission.len()
    }

    pub fn initial_log_prob(&self, tag: usize) -> f64 {
        self.initial[tag]
    }

    pub fn transition_log_prob(&self, from: usize, to: usize) -> f64 {
        self.transition[from][to]
    }

    pub fn unknown_log_mass(&self, tag: usize) -> f64 {
        self.unknown_mass[tag]
    }

    /// Emission score of `word` under `tag`: the smoothed log-probability for
    /// known words; for unseen words the tag's unknown mass times the suffix
    /// model's P(tag | suffix), or a uniform split when no suffix matches.
    pub fn emission_log_prob(&self, tag: usize, word: &str) -> f64 {
        if let Some(row) = self.emission.get(&case_fold(word)) {
            return row[tag];
        }
        let spread = match self.unknown.lookup(word) {
            Some(dist) => dist[tag],
            None => -log(self.tagset.len() as f64),
        };
        self.unknown_mass[tag] + spread
    }

    /// Joint log-probability of `words` under the tag path `tags`.
    pub fn path_log_prob(&self, words: &[&str], tags: &[usize]) -> f64 {
        assert_eq!(words.len(), tags.len());
        let mut score = 0.0;
        for (i, (w, &t)) in words.iter().zip(tags).enumerate() {
            score += if i == 0 {
                self.initial[t]
            } else {
                self.transition[tags[i - 1]][t]
            };
            score += self.emission_log_prob(t, w);
        }
        score
    }

    /// Most probable tag path and its joint log-probability. Ties go to the
    /// tag that comes first in the tagset.
    pub fn viterbi(&self, words: &[&str]) -> (Vec<usize>, f64) {
        if words.is_empty() {
            return (Vec::new(), 0.0);
        }
        let n = self.tagset.len();
        let mut score: Vec<f64> = (0..n)
            .map(|t| self.initial[t] + self.emission_log_prob(t, words[0]))
            .collect();
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(words.len());
        back.push(vec![0; n]);
        for w in &words[1..] {
            let mut next = vec![f64::NEG_INFINITY; n];
            let mut ptr = vec![0; n];
            for to in 0..n {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for (from, s) in score.iter().enumerate() {
                    let cand = s + self.transition[from][to];
                    if cand > best {
                        best = cand;
                        arg = from;
                    }
                }
                next[to] = best + self.emission_log_prob(to, w);
                ptr[to] = arg;
            }
            score = next;
            back.push(ptr);
        }
        let mut last = 0;
        for t in 1..n {
            if score[t] > score[last] {
                last = t;
            }
        }
        let best = score[last];
        let mut path = vec![0; words.len()];
        path[words.len() - 1] = last;
        for i in (1..words.len()).rev() {
            path[i - 1] = back[i][path[i]];
        }
        (path, best)
    }

    /// Fills `pos` on every token. Words are decoded with Viterbi, one
    /// sequence per sentence (split after `.`, `!`, `?`, `…`); other tokens get
    /// their reserved tag.
    pub fn tag_tokens(&self, tokens: &mut [Token]) {
        let mut sentence: Vec<usize> = Vec::new();
        for i in 0..tokens.len() {
            match reserved_tag(tokens[i].kind) {
                None => sentence.push(i),
                Some(tag) => {
                    tokens[i].pos = Some(String::from(tag));
                    if matches!(tokens[i].surface.as_str(), "." | "!" | "?" | "…") {
                        self.tag_run(tokens, &sentence);
                        sentence.clear();
                    }
                }
            }
        }
        self.tag_run(tokens, &sentence);
    }

    fn tag_run(&self, tokens: &mut [Token], run: &[usize]) {
        if run.is_empty() {
            return;
        }
        let words: Vec<&str> = run.iter().map(|&i| tokens[i].surface.as_str()).collect();
        let (path, _) = self.viterbi(&words);
        let tags: Vec<String> = path.iter().map(|&t| self.tagset[t].clone()).collect();
        for (&i, tag) in run.iter().zip(tags) {
            tokens[i].pos = Some(tag);
        }
    }

    /// Owned-vector form of [`tag_tokens`](Self::tag_tokens).
    pub fn pos_tag(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        self.tag_tokens(&mut tokens);
        tokens
    }
}
