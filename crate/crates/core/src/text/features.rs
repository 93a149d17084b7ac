use alloc::string::String;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{preprocess, sentiment_polarity, Lexicon};

pub const STAT_DIM: usize = 8;

/// Frozen order of the statistical features. Changing it requires bumping
/// [`FEATURE_ORDER_VERSION`].
pub const FEATURE_NAMES: [&str; STAT_DIM] = [
    "title_len_tokens",
    "body_len_tokens",
    "title_punct_count",
    "body_punct_count",
    "title_caps_ratio",
    "body_caps_ratio",
    "numeric_token_freq",
    "sentiment_polarity",
];

pub const FEATURE_ORDER_VERSION: u32 = 1;

/// Characters counted as punctuation.
pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '\'', '"', '(', ')', '-'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    /// Class index used by the classifier: fake is the positive class 1.
    pub fn class_index(self) -> usize {
        match self {
            Label::Real => 0,
            Label::Fake => 1,
        }
    }

    pub fn from_class_index(i: usize) -> Self {
        if i == 1 {
            Label::Fake
        } else {
            Label::Real
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub title: String,
    pub body: String,
    pub label: Label,
}

impl Article {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>, label: Label) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            body: body.into(),
            label,
        }
    }
}

/// Text statistics in [`FEATURE_NAMES`] order, raw or Z-scored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StatFeatureVector(pub [f64; STAT_DIM]);

impl StatFeatureVector {
    pub fn as_array(&self) -> &[f64; STAT_DIM] {
        &self.0
    }

    pub fn title_caps_ratio(&self) -> f64 {
        self.0[4]
    }

    pub fn body_caps_ratio(&self) -> f64 {
        self.0[5]
    }

    pub fn numeric_token_freq(&self) -> f64 {
        self.0[6]
    }

    pub fn sentiment_polarity(&self) -> f64 {
        self.0[7]
    }
}

impl Index<usize> for StatFeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StatFeatureVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

pub fn punct_count(raw: &str) -> usize {
    raw.chars().filter(|c| PUNCTUATION.contains(c)).count()
}

/// Uppercase letters over all letters; 0 when there are no letters.
pub fn caps_ratio(raw: &str) -> f64 {
    let (upper, letters) = raw
        .chars()
        .filter(|c| c.is_alphabetic())
        .fold((0usize, 0usize), |(u, n), c| (u + c.is_uppercase() as usize, n + 1));
    if letters == 0 {
        0.0
    } else {
        upper as f64 / letters as f64
    }
}

/// Share of raw whitespace tokens that contain a numeric character.
pub fn numeric_token_freq(raw: &str) -> f64 {
    let (numeric, total) = raw
        .split_whitespace()
        .fold((0usize, 0usize), |(d, n), t| {
            (d + t.chars().any(char::is_numeric) as usize, n + 1)
        });
    if total == 0 {
        0.0
    } else {
        numeric as f64 / total as f64
    }
}

/// Raw statistical features of an article. Token lengths use
/// [`preprocess`]; punctuation and capitalisation are measured on the raw
/// fields; the numeric frequency and sentiment cover title and body
/// together.
pub fn extract_stat_features(article: &Article, lexicon: &Lexicon) -> StatFeatureVector {
    let title_tokens = preprocess(&article.title);
    let body_tokens = preprocess(&article.body);
    let mut raw_joined = String::with_capacity(article.title.len() + article.body.len() + 1);
    raw_joined.push_str(&article.title);
    raw_joined.push(' ');
    raw_joined.push_str(&article.body);
    StatFeatureVector([
        title_tokens.len() as f64,
        body_tokens.len() as f64,
        punct_count(&article.title) as f64,
        punct_count(&article.body) as f64,
        caps_ratio(&article.title),
        caps_ratio(&article.body),
        numeric_token_freq(&raw_joined),
        sentiment_polarity(&title_tokens.concat(&body_tokens), lexicon),
    ])
}
