//! The pretreatment chain applied to a text: tokenize, tag, lemmatize.

use mediascope_core::nlp::{tokenize, HmmModel, Lemmatizer, Token, TokenKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analyzer {
    pub tagger: HmmModel,
    pub lemmatizer: Lemmatizer,
}

impl Analyzer {
    pub fn new(tagger: HmmModel, lemmatizer: Lemmatizer) -> Self {
        Analyzer { tagger, lemmatizer }
    }

    /// Tokens with `pos` and `lemma` filled.
    pub fn analyze(&self, text: &str) -> Vec<Token> {
        let mut tokens = self.tagger.pos_tag(tokenize(text));
        self.lemmatizer.lemmatize_tokens(&mut tokens);
        tokens
    }

    /// Lemmas of the word tokens, in text order with repeats. This is the
    /// bag TF-IDF, keywords and the classifier see.
    pub fn lemmas(&self, text: &str) -> Vec<String> {
        word_lemmas(&self.analyze(text))
    }
}

pub fn word_lemmas(tokens: &[Token]) -> Vec<String> {
    tokens.iter().filter(|t| t.kind == TokenKind::Word).filter_map(|t| t.lemma.clone()).collect()
}
