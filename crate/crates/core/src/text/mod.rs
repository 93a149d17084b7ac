//! Text preprocessing, statistical feature extraction and Z-score
//! normalisation.

mod features;
mod normalize;
mod preprocess;
mod sentiment;

pub use features::{
    caps_ratio, extract_stat_features, numeric_token_freq, punct_count, Article, Label,
    StatFeatureVector, FEATURE_NAMES, FEATURE_ORDER_VERSION, PUNCTUATION, STAT_DIM,
};
pub use normalize::{apply_zscore, fit_normalizer, FitTag, NormalizationStats};
pub use preprocess::{preprocess, stem, TokenList};
pub use sentiment::{sentiment_polarity, Lexicon};
