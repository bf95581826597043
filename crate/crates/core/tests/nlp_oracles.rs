//! Oracle and property checks for the pretreatment chain.

use std::collections::{BTreeMap, BTreeSet};

use mediascope_core::nlp::{
    compute_tfidf, extract_keywords, tokenize, FrequencyList, HmmModel, KeywordConfig,
    TaggedSentence, TfIdfModel,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every path, scored independently of the dynamic program.
fn brute_force(model: &HmmModel, words: &[&str]) -> (Vec<usize>, f64) {
    let n = model.tagset().len();
    let len = words.len();
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    let mut path = vec![0usize; len];
    for code in 0..n.pow(len as u32) {
        let mut c = code;
        for slot in path.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        let mut score =
            model.initial_log_prob(path[0]) + model.emission_log_prob(path[0], words[0]);
        for i in 1..len {
            score += model.transition_log_prob(path[i - 1], path[i])
                + model.emission_log_prob(path[i], words[i]);
        }
        if score > best.1 {
            best = (path.clone(), score);
        }
    }
    best
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn random_model(rng: &mut ChaCha8Rng, tags: usize, vocab: &[&str]) -> HmmModel {
    let tagset: Vec<String> = (0..tags).map(|i| format!("T{i}")).collect();
    let initial = random_distribution(rng, tags);
    let transition = (0..tags).map(|_| random_distribution(rng, tags)).collect();
    // Column per tag over vocab + unknown mass.
    let columns: Vec<Vec<f64>> = (0..tags)
        .map(|_| random_distribution(rng, vocab.len() + 1))
        .collect();
    let emission: BTreeMap<String, Vec<f64>> = vocab
        .iter()
        .enumerate()
        .map(|(w, word)| (word.to_string(), columns.iter().map(|c| c[w]).collect()))
        .collect();
    let unknown = columns.iter().map(|c| c[vocab.len()]).collect();
    HmmModel::from_probabilities(tagset, initial, transition, emission, unknown).unwrap()
}

const VOCAB: [&str; 10] = [
    "el", "gol", "de", "chile", "sismo", "la", "serena", "vamos", "plan", "caen",
];

#[test]
fn viterbi_matches_enumeration_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for tags in 1..=4 {
        for _ in 0..5 {
            let model = random_model(&mut rng, tags, &VOCAB);
            for len in 1..=6 {
                for _ in 0..40 {
                    let words: Vec<&str> = (0..len)
                        .map(|_| VOCAB[rng.gen_range(0..VOCAB.len())])
                        .collect();
                    let (path, score) = model.viterbi(&words);
                    let (bf_path, bf_score) = brute_force(&model, &words);
                    assert!((score - bf_score).abs() <= 1e-12, "{score} vs {bf_score}");
                    assert!((model.path_log_prob(&words, &path) - bf_score).abs() <= 1e-12);
                    // Repeated words give genuinely tied paths; those can
                    // differ in the last bit depending on summation order.
                    if path != bf_path {
                        assert!((model.path_log_prob(&words, &bf_path) - score).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn viterbi_ties_go_to_first_tag() {
    // Uniform model: every path scores the same.
    let tagset = vec!["A".to_string(), "B".to_string(), "C".to_string()];
    let third = 1.0 / 3.0;
    let emission = BTreeMap::from([("x".to_string(), vec![0.5; 3])]);
    let model = HmmModel::from_probabilities(
        tagset,
        vec![third; 3],
        vec![vec![third; 3]; 3],
        emission,
        vec![0.5; 3],
    )
    .unwrap();
    assert_eq!(model.viterbi(&["x", "x", "x"]).0, [0, 0, 0]);
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<TaggedSentence> {
    let tags = ["NC", "VLfin", "ART", "PREP", "NP"];
    let words = [
        "casa", "perro", "corre", "la", "de", "Chile", "gol", "votó", "sismo", "Valdivia", "hoy",
        "plan",
    ];
    (0..rng.gen_range(1..30))
        .map(|_| {
            (0..rng.gen_range(1..8))
                .map(|_| {
                    (
                        words[rng.gen_range(0..words.len())].to_string(),
                        tags[rng.gen_range(0..tags.len())].to_string(),
                    )
                })
                .collect()
        })
        .collect()
}

#[test]
fn trained_models_are_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let corpus = random_corpus(&mut rng);
        let alpha = rng.gen_range(0.001..1.0);
        let model = HmmModel::train(&corpus, alpha).unwrap();
        model.validate(1e-9).unwrap();
    }
}

#[test]
fn training_is_sentence_order_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let corpus = random_corpus(&mut rng);
    let mut reversed = corpus.clone();
    reversed.reverse();
    let a = HmmModel::train(&corpus, 0.01).unwrap();
    let b = HmmModel::train(&reversed, 0.01).unwrap();
    assert_eq!(a.tagset(), b.tagset());
    for i in 0..a.tagset().len() {
        assert!((a.initial_log_prob(i) - b.initial_log_prob(i)).abs() < 1e-12);
        for j in 0..a.tagset().len() {
            assert!((a.transition_log_prob(i, j) - b.transition_log_prob(i, j)).abs() < 1e-12);
        }
    }
}

#[test]
fn model_json_roundtrip_tags_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let corpus = random_corpus(&mut rng);
    let model = HmmModel::train(&corpus, 0.01).unwrap();
    let json = serde_json::to_string(&model).unwrap();
    let back: HmmModel = serde_json::from_str(&json).unwrap();
    assert_eq!(back, model);
    let words = [
        "casa", "perro", "corre", "la", "de", "Chile", "Temuco", "marchó", "gol",
    ];
    for _ in 0..100 {
        let sentence: Vec<&str> = (0..rng.gen_range(1..10))
            .map(|_| words[rng.gen_range(0..words.len())])
            .collect();
        let text = sentence.join(" ");
        assert_eq!(
            model.pos_tag(tokenize(&text)),
            back.pos_tag(tokenize(&text))
        );
    }
}

/// weight(t, d) = count(t in d) * ln(N / df(t)), straight from the definition.
fn tfidf_oracle(corpus: &[Vec<String>]) -> Vec<BTreeMap<String, f64>> {
    let n = corpus.len() as f64;
    corpus
        .iter()
        .map(|doc| {
            let mut out = BTreeMap::new();
            for term in doc.iter().collect::<BTreeSet<_>>() {
                let tf = doc.iter().filter(|t| *t == term).count() as f64;
                let df = corpus.iter().filter(|d| d.contains(term)).count() as f64;
                let w = tf * (n / df).ln();
                if w != 0.0 {
                    out.insert(term.clone(), w);
                }
            }
            out
        })
        .collect()
}

#[test]
fn tfidf_matches_direct_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let vocab = rng.gen_range(1..=50);
        let docs = rng.gen_range(1..=200);
        let corpus: Vec<Vec<String>> = (0..docs)
            .map(|_| {
                (0..rng.gen_range(0..30))
                    .map(|_| format!("w{}", rng.gen_range(0..vocab)))
                    .collect()
            })
            .collect();
        let (model, vectors) = compute_tfidf(&corpus);
        let oracle = tfidf_oracle(&corpus);
        for (v, expected) in vectors.iter().zip(&oracle) {
            assert_eq!(v.entries().len(), expected.len());
            for (id, w) in v.entries() {
                assert!(*w > 0.0);
                let want = expected[model.lemma(*id).unwrap()];
                assert!((w - want).abs() <= 1e-12, "{w} vs {want}");
            }
            let norm: f64 = expected.values().map(|w| w * w).sum::<f64>().sqrt();
            assert!((v.norm() - norm).abs() <= 1e-9);
        }
    }
}

#[test]
fn planted_keywords_recovered() {
    // 20 docs share filler lemmas; each also repeats one planted lemma that
    // occurs nowhere else, so its tf-idf is the largest in the doc.
    let filler = ["gobierno", "anuncio", "semana", "medida", "país"];
    let corpus: Vec<Vec<String>> = (0..20)
        .map(|i| {
            let mut doc: Vec<String> = filler.iter().map(|s| s.to_string()).collect();
            doc.push(format!("plantado{}", (b'a' + i as u8) as char));
            doc.push(format!("plantado{}", (b'a' + i as u8) as char));
            doc.push(filler[i % filler.len()].to_string());
            doc.push("ruido".to_string());
            if i % 2 == 0 {
                doc.push("ocasional".to_string());
            }
            doc
        })
        .collect();
    let stats = TfIdfModel::fit(&corpus);
    let freq = FrequencyList::new([("gobierno".to_string(), 10u64), ("país".to_string(), 9)]);
    let cfg = KeywordConfig {
        k: 1,
        commonness_cutoff: 500,
    };
    for (i, doc) in corpus.iter().enumerate() {
        let kw = extract_keywords(doc, &stats, &freq, &cfg);
        assert_eq!(kw, [format!("plantado{}", (b'a' + i as u8) as char)]);
    }
}

proptest! {
    #[test]
    fn token_spans_rebuild_input(text in "\\PC{0,80}") {
        let tokens = tokenize(&text);
        let mut rebuilt = String::new();
        let mut last = 0;
        for t in &tokens {
            prop_assert!(t.span.start >= last);
            prop_assert!(t.span.end > t.span.start);
            let gap = &text[last..t.span.start];
            prop_assert!(gap.chars().all(char::is_whitespace));
            rebuilt.push_str(gap);
            prop_assert_eq!(&text[t.span.start..t.span.end], t.surface.as_str());
            rebuilt.push_str(&t.surface);
            last = t.span.end;
        }
        rebuilt.push_str(&text[last..]);
        prop_assert_eq!(rebuilt, text);
    }

    #[test]
    fn tweetish_spans_rebuild_input(words in proptest::collection::vec("(#|@|¿|¡)?[a-zA-Zñáé0-9]{1,6}[.,!?]?|https://t\\.co/[a-z0-9]{3}", 0..12)) {
        let text = words.join(" ");
        let tokens = tokenize(&text);
        let joined: String = tokens.iter().map(|t| t.surface.as_str()).collect();
        let squeezed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        prop_assert_eq!(joined, squeezed);
    }
}
