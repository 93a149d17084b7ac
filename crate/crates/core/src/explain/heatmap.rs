use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::Example;
use crate::model::token_labels;
use crate::train::TrainedModel;
use crate::{Error, Matrix, Result};

/// Attention weights of one article, labelled by feature token.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapExport {
    /// Row and column labels.
    pub labels: Vec<String>,
    pub heads: Vec<Matrix>,
    /// Head-averaged map.
    pub mean: Matrix,
}

pub fn attention_heatmap(trained: &TrainedModel, example: &Example) -> Result<HeatmapExport> {
    if !trained.model.config.use_attention {
        return Err(Error::NoAttention);
    }
    let forward = trained.forward(example)?;
    let map = forward.attention.ok_or(Error::NoAttention)?;
    Ok(HeatmapExport {
        labels: token_labels(&trained.model.config).into_iter().map(String::from).collect(),
        mean: map.mean(),
        heads: map.heads,
    })
}
