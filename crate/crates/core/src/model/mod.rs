//! The fusion model: statistical and semantic features mapped to a shared
//! token space, multi-head attention across feature tokens, the cross
//! interaction matrix and the two-class classifier head, each with an
//! analytic backward pass.
//!
//! Token order is fixed: the eight statistical features in
//! [`FEATURE_NAMES`](crate::text::FEATURE_NAMES) order followed by the
//! semantic token. Without statistical features only the semantic token is
//! present.

mod attention;
mod classifier;
mod config;
mod interaction;
mod network;
mod params;
mod transform;

pub use attention::{feature_attention, AttentionMap};
pub use classifier::classify;
pub use config::{Ablation, EncoderKind, ModelConfig};
pub use interaction::{cross_interaction, InteractionMatrix};
pub use network::{Forward, FusionModel, SemanticInput};
pub use params::{AttentionParams, Dense, LayerNormParams, Params, SemanticProjection, StatEmbedder};
pub use transform::{transform_features, FeatureTokens};

/// Display names of the feature tokens for a configuration, in token order.
pub fn token_labels(config: &ModelConfig) -> alloc::vec::Vec<&'static str> {
    let mut labels = alloc::vec::Vec::with_capacity(config.n_tokens());
    if config.use_stat {
        labels.extend_from_slice(&crate::text::FEATURE_NAMES);
    }
    labels.push("semantic");
    labels
}
