//! Semantic side of the model: vocabulary, the built-in mean-pooled
//! embedding encoder and the in-memory store for precomputed vectors.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::text::{FitTag, TokenList};
use crate::{Error, Matrix, Result};

pub const DEFAULT_VOCAB_CAP: usize = 20_000;
pub const DEFAULT_BUILTIN_DIM: usize = 64;
pub const OOV_TOKEN: &str = "<oov>";

/// Dense semantic vector of one article.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticEmbedding(pub Vec<f64>);

/// Token → dense index. Index 0 is reserved for out-of-vocabulary tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: BTreeMap<String, u32>,
    pub fitted_on: FitTag,
}

impl Vocab {
    /// Rebuilds a vocabulary from its tokens in index order; the first
    /// entry must be [`OOV_TOKEN`].
    pub fn from_tokens(tokens: Vec<String>, fitted_on: FitTag) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some(OOV_TOKEN) {
            return Err(Error::InvalidArgument(
                "vocabulary must start with the OOV token".to_string(),
            ));
        }
        let mut index = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate().skip(1) {
            if index.insert(t.clone(), i as u32).is_some() || t == OOV_TOKEN {
                return Err(Error::InvalidArgument(alloc::format!(
                    "duplicate vocabulary token {t:?}"
                )));
            }
        }
        Ok(Self {
            tokens,
            index,
            fitted_on,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id(&self, token: &str) -> u32 {
        self.index.get(token).copied().unwrap_or(0)
    }

    pub fn ids(&self, tokens: &TokenList) -> Vec<u32> {
        tokens.iter().map(|t| self.id(t)).collect()
    }
}

/// Keeps the `cap` most frequent tokens, ties broken lexicographically,
/// after the reserved OOV entry.
pub fn build_vocab<'a, I>(corpus: I, cap: usize, fitted_on: FitTag) -> Result<Vocab>
where
    I: IntoIterator<Item = &'a TokenList>,
{
    if cap == 0 {
        return Err(Error::InvalidArgument("vocabulary cap must be at least 1".to_string()));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for list in corpus {
        for t in list.iter() {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    // BTreeMap order is lexicographic, so a stable sort on count keeps ties ordered.
    ranked.sort_by_key(|r| core::cmp::Reverse(r.1));
    let tokens = core::iter::once(OOV_TOKEN.to_string())
        .chain(
            ranked
                .into_iter()
                .filter(|(t, _)| *t != OOV_TOKEN)
                .take(cap)
                .map(|(t, _)| t.to_string()),
        )
        .collect();
    Vocab::from_tokens(tokens, fitted_on)
}

/// Mean of the embedding rows of `ids`; zero vector for no tokens.
pub fn mean_pool(ids: &[u32], table: &Matrix) -> Vec<f64> {
    let mut out = vec![0.0; table.cols()];
    if ids.is_empty() {
        return out;
    }
    for &id in ids {
        for (o, x) in out.iter_mut().zip(table.row(id as usize)) {
            *o += x;
        }
    }
    let inv = 1.0 / ids.len() as f64;
    out.iter_mut().for_each(|x| *x *= inv);
    out
}

/// Scatters the gradient of a mean-pooled embedding back into the table.
pub fn mean_pool_backward(ids: &[u32], upstream: &[f64], table_grad: &mut Matrix) {
    if ids.is_empty() {
        return;
    }
    let inv = 1.0 / ids.len() as f64;
    for &id in ids {
        for (g, u) in table_grad.row_mut(id as usize).iter_mut().zip(upstream) {
            *g += u * inv;
        }
    }
}

/// Built-in encoder: mean-pooled trainable embeddings, OOV tokens mapped to
/// row 0.
pub fn encode_builtin(tokens: &TokenList, vocab: &Vocab, table: &Matrix) -> Result<SemanticEmbedding> {
    if table.rows() != vocab.len() {
        return Err(Error::Length {
            what: "embedding table rows",
            expected: vocab.len(),
            found: table.rows(),
        });
    }
    Ok(SemanticEmbedding(mean_pool(&vocab.ids(tokens), table)))
}

/// Article id → precomputed semantic vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    pub source: String,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, source: impl Into<String>) -> Self {
        Self {
            dim,
            source: source.into(),
            vectors: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.dim {
            return Err(Error::Length {
                what: "embedding",
                expected: self.dim,
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("embedding"));
        }
        self.vectors.insert(id.into(), values);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vectors.contains_key(id)
    }

    /// Entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}
