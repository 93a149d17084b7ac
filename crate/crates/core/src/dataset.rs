//! Featurised articles as consumed by training, evaluation and
//! attribution.

use alloc::string::String;
use alloc::vec::Vec;

use crate::encoder::EmbeddingStore;
use crate::text::{extract_stat_features, preprocess, Article, Label, Lexicon, StatFeatureVector};
use crate::{Error, Result};

/// One article after feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: String,
    pub label: Label,
    /// Raw (not yet Z-scored) statistics.
    pub stats: StatFeatureVector,
    /// Title tokens followed by body tokens.
    pub tokens: crate::text::TokenList,
    /// Precomputed semantic vector, when that encoder is in use.
    pub embedding: Option<Vec<f64>>,
}

impl Example {
    pub fn from_article(article: &Article, lexicon: &Lexicon, store: Option<&EmbeddingStore>) -> Result<Self> {
        let embedding = match store {
            Some(s) => Some(
                s.get(&article.id)
                    .ok_or_else(|| Error::MissingEmbedding(article.id.clone()))?
                    .to_vec(),
            ),
            None => None,
        };
        Ok(Self {
            id: article.id.clone(),
            label: article.label,
            stats: extract_stat_features(article, lexicon),
            tokens: preprocess(&article.title).concat(&preprocess(&article.body)),
            embedding,
        })
    }
}

pub fn featurize(articles: &[Article], lexicon: &Lexicon, store: Option<&EmbeddingStore>) -> Result<Vec<Example>> {
    articles
        .iter()
        .map(|a| Example::from_article(a, lexicon, store))
        .collect()
}

pub fn labels(examples: &[Example]) -> Vec<Label> {
    examples.iter().map(|e| e.label).collect()
}
