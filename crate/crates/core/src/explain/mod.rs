//! Attention heatmaps, Shapley attribution over the nine model inputs
//! (eight statistics plus the semantic embedding) and permutation
//! importance.

mod heatmap;
mod importance;
mod shapley;

pub use heatmap::{attention_heatmap, HeatmapExport};
pub use importance::{permutation_importance, PermutationImportance, MIN_IMPORTANCE_SAMPLES};
pub use shapley::{
    exact_shapley, exact_shapley_game, sampled_shapley, sampled_shapley_game, shapley_players, ShapleyReport,
    MAX_EXACT_PLAYERS, SHAPLEY_PLAYERS,
};
